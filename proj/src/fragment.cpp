#include "aecspace/fragment.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <unordered_set>

#include "aecspace/compiled.hpp"
#include "aecspace/error.hpp"

namespace aecspace {

FragmentBudget FragmentBudget::for_block_bound(std::uint32_t b) {
  FragmentBudget out;
  out.variables = 2 * b + 1;
  out.max_free = b;
  out.seed_free = 2 * b;
  return out;
}

bool fits_seed(const Formula& f, const FragmentBudget& budget) {
  return f.max_variable() <= budget.variables && f.max_term_depth() <= budget.max_term_depth &&
         f.free_variables().size() <= budget.seed_free;
}

bool fits_constructed(const Formula& f, const FragmentBudget& budget) {
  return f.max_variable() <= budget.variables && f.max_term_depth() <= budget.max_term_depth &&
         f.free_variables().size() <= budget.max_free && f.height() <= budget.max_depth &&
         f.max_width() <= budget.max_width;
}

bool Fragment::is_seed_derived(const Formula& f) const {
  const auto it = index_.find(f.text());
  return it != index_.end() && it->second;
}

namespace {

std::vector<Term> build_terms(const Vocabulary& vocab, const FragmentBudget& budget) {
  std::vector<Term> out;
  for (std::uint32_t v = 0; v < budget.variables; ++v) out.push_back(Term::variable(v));
  for (const auto& c : vocab.constants()) out.push_back(Term::constant(c));
  std::size_t previous_begin = 0;
  for (std::uint32_t depth = 1; depth <= budget.max_term_depth; ++depth) {
    const std::vector<Term> below(out.begin(), out.end());
    const std::size_t begin = out.size();
    for (const auto& fn : vocab.functions()) {
      if (fn.arity == 0) continue;
      // Arguments range over every shallower term; at least one must come
      // from the previous level so each term is produced at its own depth.
      std::vector<std::size_t> pick(fn.arity, 0);
      while (true) {
        const bool fresh = std::any_of(pick.begin(), pick.end(), [&](std::size_t i) { return i >= previous_begin; });
        if (fresh || depth == 1) {
          std::vector<Term> args;
          for (auto i : pick) args.push_back(below[i]);
          out.push_back(Term::apply(fn.name, std::move(args)));
        }
        std::size_t k = fn.arity;
        while (k > 0 && ++pick[k - 1] == below.size()) pick[--k] = 0;
        if (k == 0) break;
      }
    }
    previous_begin = begin;
    if (out.size() > 1'000'000) throw BudgetExceeded("term set too large");
  }
  return out;
}

// Every atom over the term set with at most max_free variables.
template <class Visit>
void for_each_atom(const Vocabulary& vocab, const std::vector<Term>& terms, const FragmentBudget& budget,
                   Visit&& visit) {
  std::vector<std::set<std::uint32_t>> term_vars(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i].collect_variables(term_vars[i]);

  auto tuples = [&](std::uint32_t arity, auto&& emit) {
    std::vector<std::size_t> pick;
    std::function<void(std::set<std::uint32_t>)> rec = [&](std::set<std::uint32_t> used) {
      if (pick.size() == arity) {
        emit(pick);
        return;
      }
      for (std::size_t i = 0; i < terms.size(); ++i) {
        auto next = used;
        next.insert(term_vars[i].begin(), term_vars[i].end());
        if (next.size() > budget.max_free) continue;
        pick.push_back(i);
        rec(std::move(next));
        pick.pop_back();
      }
    };
    rec({});
  };

  for (const auto& r : vocab.relations())
    tuples(r.arity, [&](const std::vector<std::size_t>& pick) {
      std::vector<Term> args;
      for (auto i : pick) args.push_back(terms[i]);
      visit(Formula::relation(r.name, std::move(args)));
    });
  tuples(2, [&](const std::vector<std::size_t>& pick) { visit(Formula::equals(terms[pick[0]], terms[pick[1]])); });
}

// Results of rules 2 and 3 on `f`: children and substitution instances.
template <class Visit>
void for_each_inherited(const Formula& f, const std::vector<Term>& terms, const FragmentBudget& budget,
                        bool substitution, Visit&& visit) {
  for (const auto& c : f.children()) visit(2, c);
  if (!substitution) return;
  for (auto v : f.free_variables())
    for (const auto& t : terms) {
      if (t.kind == Term::Kind::Variable && t.index == v) continue;
      try {
        visit(3, substitute(f, v, t, budget.variables));
      } catch (const VariablesExhausted&) {
        // the instance needs a bound variable outside V
      }
    }
}

// Results of rules 4 and 5.
template <class Visit>
void for_each_built(const Formula& f, const FragmentBudget& budget, Visit&& visit) {
  if (f.height() + 1 > budget.max_depth) return;
  visit(4, Formula::negation(f));
  for (std::uint32_t v = 0; v < budget.variables; ++v) visit(5, Formula::exists({v}, f));
}

bool eligible_for_family(const Formula& f, const FragmentBudget& budget) {
  return fits_constructed(f, budget) && f.height() + 1 <= budget.max_depth;
}

// Ordered families of length 1..max_width over `pool`, each containing
// `pool[must]` when must < pool.size(), with free-variable union in budget.
template <class Visit>
void for_each_family(const std::vector<Formula>& pool, std::size_t must, const FragmentBudget& budget, Visit&& visit) {
  std::vector<Formula> family;
  std::function<void(const std::set<std::uint32_t>&, bool)> rec = [&](const std::set<std::uint32_t>& vars,
                                                                       bool has_must) {
    if (!family.empty() && (has_must || must >= pool.size())) visit(Formula::conjunction(family));
    if (family.size() == budget.max_width) return;
    // The last slot of a family still missing `must` can only take it.
    const bool last_chance = must < pool.size() && !has_must && family.size() + 1 == budget.max_width;
    for (std::size_t i = last_chance ? must : 0; i < pool.size(); ++i) {
      auto next = vars;
      next.insert(pool[i].free_variables().begin(), pool[i].free_variables().end());
      if (next.size() > budget.max_free) continue;
      family.push_back(pool[i]);
      rec(next, has_must || i == must);
      family.pop_back();
    }
  };
  rec({}, false);
}

}  // namespace

Fragment fragment_closure(const std::vector<Formula>& seed, const VocabularyPtr& vocab, const FragmentBudget& budget) {
  if (budget.variables == 0 || budget.max_width == 0) throw Error("fragment budget needs variables and width");
  Fragment out;
  out.vocab_ = vocab;
  out.budget_ = budget;
  out.terms_ = build_terms(*vocab, budget);

  std::deque<Formula> queue;
  std::vector<Formula> pool;  // rule 6 candidates in insertion order
  auto add = [&](const Formula& f, bool seed_flag) {
    auto [it, fresh] = out.index_.try_emplace(f.text(), seed_flag);
    if (fresh) {
      out.members_.push_back(f);
      if (out.members_.size() > budget.max_count)
        throw BudgetExceeded("fragment exceeds " + std::to_string(budget.max_count) + " members");
      queue.push_back(f);
    } else if (seed_flag && !it->second) {
      it->second = true;
      queue.push_back(f);
    }
  };

  for (const auto& s : seed) {
    if (s.max_variable() > budget.variables)
      throw Error("seed formula uses variables outside V: " + s.text());
    CompiledFormula check(s, *vocab);  // throws on unknown symbols
    (void)check;
    if (!fits_seed(s, budget)) throw BudgetExceeded("seed formula outside the budget: " + s.text());
    add(s, true);
  }
  for_each_atom(*vocab, out.terms_, budget, [&](const Formula& a) {
    if (fits_constructed(a, budget)) add(a, false);
  });

  std::unordered_set<std::string> in_pool;
  while (!queue.empty()) {
    const Formula f = queue.front();
    queue.pop_front();
    const bool seed_flag = out.index_.at(f.text());
    for_each_inherited(f, out.terms_, budget, !seed_flag || budget.seed_substitution, [&](int, const Formula& r) {
      const bool from_seed = seed_flag && fits_seed(r, budget);
      if (from_seed || fits_constructed(r, budget)) add(r, from_seed);
    });
    if (!fits_constructed(f, budget)) continue;
    for_each_built(f, budget, [&](int, const Formula& r) {
      if (fits_constructed(r, budget)) add(r, false);
    });
    if (eligible_for_family(f, budget) && in_pool.insert(f.text()).second) {
      pool.push_back(f);
      for_each_family(pool, pool.size() - 1, budget, [&](const Formula& r) { add(r, false); });
    }
  }

  std::sort(out.members_.begin(), out.members_.end(), [](const Formula& a, const Formula& b) {
    return a.height() != b.height() ? a.height() < b.height() : a.text() < b.text();
  });
  out.seed_ = seed;
  return out;
}

Report audit_fragment(const Fragment& fr) {
  const auto& budget = fr.budget();
  Report report;
  std::vector<CheckResult> rules;
  for (int i = 1; i <= 7; ++i) rules.push_back({"rule-" + std::to_string(i), true, 0, {}, {}});
  auto require = [&](int rule, const Formula& r) {
    auto& c = rules[rule - 1];
    ++c.cases;
    if (!fr.contains(r)) c.fail("missing " + r.text());
  };

  // Seed-derived members recomputed from the seed alone.
  std::unordered_set<std::string> derived;
  {
    std::deque<Formula> queue;
    for (const auto& s : fr.seed_)
      if (derived.insert(s.text()).second) queue.push_back(s);
    while (!queue.empty()) {
      const Formula f = queue.front();
      queue.pop_front();
      for_each_inherited(f, fr.terms(), budget, budget.seed_substitution, [&](int, const Formula& r) {
        if (fits_seed(r, budget) && derived.insert(r.text()).second) queue.push_back(r);
      });
    }
  }

  for_each_atom(*fr.vocabulary(), fr.terms(), budget, [&](const Formula& a) {
    if (fits_constructed(a, budget)) require(1, a);
  });

  std::vector<Formula> pool;
  for (const auto& f : fr.members()) {
    const bool from_seed = derived.count(f.text()) != 0;
    for_each_inherited(f, fr.terms(), budget, !from_seed || budget.seed_substitution, [&](int rule, const Formula& r) {
      if ((from_seed && fits_seed(r, budget)) || fits_constructed(r, budget)) require(rule, r);
    });
    auto& r7 = rules[6];
    ++r7.cases;
    if (f.max_variable() > budget.variables) r7.fail("variable outside V in " + f.text());
    if (!(from_seed ? fits_seed(f, budget) : fits_constructed(f, budget))) r7.fail("member outside the budget: " + f.text());
    if (!fits_constructed(f, budget)) continue;
    for_each_built(f, budget, [&](int rule, const Formula& r) {
      if (fits_constructed(r, budget)) require(rule, r);
    });
    if (eligible_for_family(f, budget)) pool.push_back(f);
  }
  for_each_family(pool, pool.size(), budget, [&](const Formula& r) { require(6, r); });
  for (const auto& s : fr.seed_) {
    auto& r2 = rules[1];
    ++r2.cases;
    if (!fr.contains(s)) r2.fail("seed formula missing: " + s.text());
  }
  report.checks = std::move(rules);
  return report;
}

}  // namespace aecspace
