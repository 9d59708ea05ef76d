#include "aecspace/presentation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "aecspace/error.hpp"

namespace aecspace {

namespace {

// All duplicate-free k-tuples over {0..n-1}, lexicographic.
std::vector<Tuple> injective_tuples(std::uint32_t n, std::uint32_t k) {
  std::vector<Tuple> out;
  Tuple cur;
  std::vector<bool> used(n, false);
  std::function<void()> rec = [&]() {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::uint32_t v = 0; v < n; ++v) {
      if (used[v]) continue;
      used[v] = true;
      cur.push_back(v);
      rec();
      cur.pop_back();
      used[v] = false;
    }
  };
  rec();
  return out;
}

std::vector<Term> variables(std::uint32_t from, std::uint32_t count) {
  std::vector<Term> out;
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(Term::variable(from + i));
  return out;
}

std::vector<std::uint32_t> indices(std::uint32_t from, std::uint32_t count) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(from + i);
  return out;
}

std::vector<Term> concat(std::vector<Term> a, const std::vector<Term>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Formula conj_or_single(std::vector<Formula> f) { return f.size() == 1 ? f.front() : Formula::conjunction(std::move(f)); }

std::string join_map(const UniverseMap& m) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) out += (i ? "," : "") + std::to_string(m[i]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- catalog

std::optional<std::size_t> BlockCatalog::find_block(const Structure& canonical) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].rep == canonical) return i;
  return std::nullopt;
}

BlockCatalog enumerate_blocks(const ToyAEC& a) {
  BlockCatalog c;
  c.block_bound = a.block_bound;
  for (std::uint32_t n = 1; n <= a.block_bound; ++n) {
    std::map<std::vector<std::uint32_t>, Structure> reps;
    for (const auto& m : members(a, n)) {
      auto cf = canonical_form(m);
      reps.emplace(cf.structure.encoding(), std::move(cf.structure));
    }
    for (auto& [key, rep] : reps) c.blocks.push_back({rep.signature(), std::move(rep)});
  }
  for (std::size_t s = 0; s < c.blocks.size(); ++s)
    for (std::size_t l = 0; l < c.blocks.size(); ++l) {
      const auto& small = c.blocks[s].rep;
      const auto& large = c.blocks[l].rep;
      if (small.size() > large.size()) continue;
      for (const auto& j : injective_tuples(large.size(), small.size()))
        if (a.is_strong_embedding(small, j, large))
          c.pairs.push_back({c.blocks[s].name + "<" + c.blocks[l].name + "/" + join_map(j), s, l, j});
    }
  return c;
}

ExpandedVocabulary build_expanded_vocabulary(const BlockCatalog& c, const VocabularyPtr& tau) {
  ExpandedVocabulary out;
  out.tau = tau;
  Vocabulary v = *tau;
  auto add = [&](const std::string& base, std::uint32_t arity) {
    std::string name = "R[" + base + "]";
    if (v.contains(name)) {
      std::string candidate;
      for (int k = 1;; ++k) {
        candidate = name + "_" + std::to_string(k);
        if (!v.contains(candidate)) break;
      }
      out.renamed.push_back(name + " -> " + candidate);
      name = candidate;
    }
    v.add_relation(name, arity);
    return name;
  };
  for (const auto& b : c.blocks) out.block_symbols.push_back(add(b.name, b.rep.size()));
  for (const auto& p : c.pairs)
    out.pair_symbols.push_back(add(p.name, c.blocks[p.small].rep.size() + c.blocks[p.large].rep.size()));
  out.tau_star = share(std::move(v));
  return out;
}

// ---------------------------------------------------------------- T*

std::vector<Formula> PresentationTheory::formulas() const {
  std::vector<Formula> out;
  out.reserve(axioms.size());
  for (const auto& a : axioms) out.push_back(a.formula);
  return out;
}

std::size_t PresentationTheory::count(int schema) const {
  return static_cast<std::size_t>(
      std::count_if(axioms.begin(), axioms.end(), [schema](const Axiom& a) { return a.schema == schema; }));
}

namespace {

// Atomic and negated atomic τ-facts of a block over x0..x_{k-1}.
std::vector<Formula> block_facts(const Structure& rep) {
  const auto& tau = rep.vocabulary();
  const auto k = rep.size();
  std::vector<Formula> out;
  for (std::size_t r = 0; r < tau.relations().size(); ++r) {
    const auto arity = tau.relations()[r].arity;
    Tuple t(arity);
    for (std::size_t code = 0; code < rep.relation_table(r).size(); ++code) {
      decode_tuple(code, k, t);
      std::vector<Term> args;
      for (auto i : t) args.push_back(Term::variable(i));
      auto atom = Formula::relation(tau.relations()[r].name, std::move(args));
      out.push_back(rep.holds_code(r, code) ? atom : Formula::negation(atom));
    }
  }
  for (std::uint32_t i = 0; i < k; ++i)
    for (std::uint32_t j = i + 1; j < k; ++j)
      out.push_back(Formula::negation(Formula::equals(Term::variable(i), Term::variable(j))));
  for (std::size_t f = 0; f < tau.functions().size(); ++f) {
    const auto& sym = tau.functions()[f];
    Tuple t(sym.arity);
    for (std::size_t code = 0; code < rep.function_table(f).size(); ++code) {
      decode_tuple(code, k, t);
      std::vector<Term> args;
      for (auto i : t) args.push_back(Term::variable(i));
      const Term lhs = sym.arity == 0 ? Term::constant(sym.name) : Term::apply(sym.name, std::move(args));
      const auto value = rep.apply_code(f, code);
      for (std::uint32_t l = 0; l < k; ++l) {
        auto eq = Formula::equals(lhs, Term::variable(l));
        out.push_back(l == value ? eq : Formula::negation(eq));
      }
    }
  }
  return out;
}

}  // namespace

PresentationTheory generate_Tstar(const BlockCatalog& c, const ExpandedVocabulary& v, std::uint32_t tuple_budget) {
  if (tuple_budget < c.block_bound)
    throw Error("tuple-length budget " + std::to_string(tuple_budget) + " is below the block bound " +
                std::to_string(c.block_bound));
  PresentationTheory t;
  t.catalog = c;
  t.vocab = v;
  t.tuple_budget = tuple_budget;
  const auto b = c.block_bound;
  auto size_of = [&](std::size_t block) { return c.blocks[block].rep.size(); };

  // (1) a tuple in R[M] carries the diagram of M
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    const auto k = size_of(i);
    const auto guard = Formula::relation(v.block_symbols[i], variables(0, k));
    for (auto& fact : block_facts(c.blocks[i].rep))
      t.axioms.push_back({Formula::forall(indices(0, k), Formula::implies(guard, fact)), 1, c.blocks[i].name});
  }

  // Pieces shared by (2) and (5): x̄ = x0.., ȳ = x_k..
  struct PairParts {
    std::vector<std::uint32_t> xs, ys;
    Formula pair, small, large, overlap;
  };
  auto parts = [&](std::size_t p) {
    const auto& pc = c.pairs[p];
    const auto k = size_of(pc.small);
    const auto l = size_of(pc.large);
    const auto x = variables(0, k);
    const auto y = variables(k, l);
    std::vector<Formula> eqs;
    for (std::uint32_t i = 0; i < k; ++i) eqs.push_back(Formula::equals(x[i], y[pc.map[i]]));
    return PairParts{indices(0, k), indices(k, l), Formula::relation(v.pair_symbols[p], concat(x, y)),
                     Formula::relation(v.block_symbols[pc.small], x), Formula::relation(v.block_symbols[pc.large], y),
                     conj_or_single(std::move(eqs))};
  };

  // (2) a pair tuple is two block tuples with the right overlap
  for (std::size_t p = 0; p < c.pairs.size(); ++p) {
    const auto q = parts(p);
    auto body = Formula::implies(q.pair, Formula::conjunction({q.small, q.large, q.overlap}));
    t.axioms.push_back({Formula::forall(q.xs, Formula::forall(q.ys, body)), 2, c.pairs[p].name});
  }

  // (3) every tuple of length ≤ b lies inside some block tuple
  for (std::uint32_t len = 1; len <= b; ++len) {
    const auto x = variables(0, len);
    const auto y = variables(len, b);
    std::vector<Formula> options;
    for (std::size_t i = 0; i < c.blocks.size(); ++i) {
      const auto k = size_of(i);
      std::vector<Term> prefix(y.begin(), y.begin() + k);
      std::vector<Formula> covered;
      for (std::uint32_t xi = 0; xi < len; ++xi) {
        std::vector<Formula> somewhere;
        for (std::uint32_t j = 0; j < k; ++j) somewhere.push_back(Formula::equals(x[xi], y[j]));
        covered.push_back(Formula::disjunction(std::move(somewhere)));
      }
      options.push_back(Formula::conjunction(
          {Formula::relation(v.block_symbols[i], std::move(prefix)), conj_or_single(std::move(covered))}));
    }
    auto body = Formula::disjunction(std::move(options));
    t.axioms.push_back({Formula::forall(indices(0, len), Formula::exists(indices(len, b), body)), 3,
                        "length-" + std::to_string(len)});
  }

  // (4) a block tuple of N yields the pair tuple for each strong M inside it
  for (std::size_t p = 0; p < c.pairs.size(); ++p) {
    const auto& pc = c.pairs[p];
    const auto l = size_of(pc.large);
    const auto x = variables(0, l);
    std::vector<Term> sub;
    for (auto j : pc.map) sub.push_back(x[j]);
    auto body = Formula::implies(Formula::relation(v.block_symbols[pc.large], x),
                                 Formula::relation(v.pair_symbols[p], concat(sub, x)));
    t.axioms.push_back({Formula::forall(indices(0, l), body), 4, pc.name});
  }

  // (5) coherence: overlapping block tuples stand in the pair relation
  for (std::size_t p = 0; p < c.pairs.size(); ++p) {
    const auto q = parts(p);
    auto body = Formula::implies(Formula::conjunction({q.small, q.large, q.overlap}), q.pair);
    t.axioms.push_back({Formula::forall(q.xs, Formula::forall(q.ys, body)), 5, c.pairs[p].name});
  }
  return t;
}

PresentationTheory build_presentation(const ToyAEC& a, std::uint32_t tuple_budget) {
  const auto catalog = enumerate_blocks(a);
  return generate_Tstar(catalog, build_expanded_vocabulary(catalog, a.vocab), tuple_budget);
}

std::string export_Tstar(const PresentationTheory& t) {
  std::ostringstream out;
  for (const auto& a : t.axioms) out << "# schema:" << a.schema << " class:" << a.source << "\n" << a.formula.text() << "\n";
  return out.str();
}

// ---------------------------------------------------------------- expansion

Structure expand(const ToyAEC& a, const PresentationTheory& t, const Structure& m) {
  if (!a.is_member(m)) throw Error("structure " + m.signature() + " is not in the class");
  const auto& c = t.catalog;
  const auto& vs = *t.vocab.tau_star;
  Structure out(t.vocab.tau_star, m.size());
  {
    PartialStructure p(t.vocab.tau_star, m.size());
    p.fix_from(m);
    out = p.complete();
  }
  std::vector<std::set<Tuple>> block_tuples(c.blocks.size());
  std::map<std::uint32_t, std::vector<Tuple>> tuples_of_length;
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    const auto k = c.blocks[i].rep.size();
    auto [it, fresh] = tuples_of_length.try_emplace(k);
    if (fresh) it->second = injective_tuples(m.size(), k);
    const auto r = *vs.find_relation(t.vocab.block_symbols[i]);
    for (const auto& tup : it->second)
      if (a.is_strong_embedding(c.blocks[i].rep, tup, m)) {
        block_tuples[i].insert(tup);
        out.set(r, tup, true);
      }
  }
  for (std::size_t p = 0; p < c.pairs.size(); ++p) {
    const auto& pc = c.pairs[p];
    const auto r = *vs.find_relation(t.vocab.pair_symbols[p]);
    for (const auto& ys : block_tuples[pc.large]) {
      Tuple xs;
      for (auto j : pc.map) xs.push_back(ys[j]);
      if (!block_tuples[pc.small].count(xs)) continue;
      Tuple both = xs;
      both.insert(both.end(), ys.begin(), ys.end());
      out.set(r, both, true);
    }
  }
  return out;
}

namespace {

std::vector<CompiledFormula> compile_axioms(const PresentationTheory& t, const std::vector<std::size_t>* subset) {
  std::vector<CompiledFormula> out;
  if (subset) {
    for (auto i : *subset) out.emplace_back(t.axioms.at(i).formula, *t.vocab.tau_star);
  } else {
    for (const auto& a : t.axioms) out.emplace_back(a.formula, *t.vocab.tau_star);
  }
  return out;
}

bool by_encoding(const Structure& a, const Structure& b) { return a.encoding() < b.encoding(); }

std::vector<std::uint32_t> sized_key(const Structure& m) {
  auto key = m.encoding();
  key.insert(key.begin(), m.size());
  return key;
}

}  // namespace

std::optional<Axiom> first_violated_axiom(const PresentationTheory& t, const Structure& m) {
  const DefiniteModel dm(m);
  for (const auto& a : t.axioms) {
    const CompiledFormula cf(a.formula, m.vocabulary());
    if (cf.evaluate(dm) != Truth::True) return a;
  }
  return std::nullopt;
}

std::vector<Structure> models_of_Tstar(const PresentationTheory& t, std::uint32_t size, const Structure* fixed_reduct,
                                       SearchStats* stats, const std::vector<std::size_t>* axiom_subset) {
  PartialStructure start(t.vocab.tau_star, size);
  if (fixed_reduct) start.fix_from(*fixed_reduct);
  const auto sentences = compile_axioms(t, axiom_subset);
  std::vector<Structure> out;
  const auto s = search_models(start, sentences, [&](const Structure& m) {
    out.push_back(m);
    return true;
  });
  if (stats) *stats = s;
  std::sort(out.begin(), out.end(), by_encoding);
  return out;
}

std::vector<Structure> models_of_Tstar_brute_force(const PresentationTheory& t, std::uint32_t size,
                                                   const Structure* fixed_reduct, std::uint64_t limit) {
  const auto& star = t.vocab.tau_star;
  VocabularyPtr space = star;
  if (fixed_reduct) {
    Vocabulary only_r;
    for (const auto& r : star->relations())
      if (!t.vocab.tau->contains(r.name)) only_r.add_relation(r.name, r.arity);
    space = share(std::move(only_r));
  }
  if (structure_count(*space, size) > limit)
    throw BudgetExceeded("literal enumeration of " + std::to_string(size) + "-element candidates exceeds the limit");
  const auto sentences = compile_axioms(t, nullptr);
  std::vector<Structure> out;
  for_each_structure(
      space, size,
      [&](const Structure& candidate) {
        PartialStructure p(star, size);
        if (fixed_reduct) p.fix_from(*fixed_reduct);
        p.fix_from(candidate);
        const Structure m = p.complete();
        const DefiniteModel dm(m);
        for (const auto& s : sentences)
          if (s.evaluate(dm) != Truth::True) return true;
        out.push_back(m);
        return true;
      },
      limit);
  std::sort(out.begin(), out.end(), by_encoding);
  return out;
}

bool is_substructure_embedding(const Structure& m, const UniverseMap& e, const Structure& n) {
  const auto& v = m.vocabulary();
  if (!(v == n.vocabulary())) throw VocabularyError("substructure test across vocabularies");
  if (e.size() != m.size()) return false;
  for (auto x : e)
    if (x >= n.size()) return false;
  for (std::size_t r = 0; r < v.relations().size(); ++r) {
    Tuple t(v.relations()[r].arity), image(t.size());
    for (std::size_t code = 0; code < m.relation_table(r).size(); ++code) {
      decode_tuple(code, m.size(), t);
      for (std::size_t i = 0; i < t.size(); ++i) image[i] = e[t[i]];
      if (m.holds_code(r, code) != n.holds(r, image)) return false;
    }
  }
  for (std::size_t f = 0; f < v.functions().size(); ++f) {
    Tuple t(v.functions()[f].arity), image(t.size());
    for (std::size_t code = 0; code < m.function_table(f).size(); ++code) {
      decode_tuple(code, m.size(), t);
      for (std::size_t i = 0; i < t.size(); ++i) image[i] = e[t[i]];
      if (e[m.apply_code(f, code)] != n.apply(f, image)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- verification

namespace {

class PresentationVerifier {
 public:
  PresentationVerifier(const ToyAEC& a, const PresentationTheory& t, const VerifyOptions& o) : a_(a), t_(t), o_(o) {
    for (std::uint32_t n = 1; n <= a.cap; ++n)
      for (const auto& m : members(a, n)) {
        members_.push_back(m);
        expansions_.emplace(sized_key(m), expand(a, t, m));
      }
  }

  Report run() {
    Report r;
    r.checks.push_back(expansions_model());
    r.checks.push_back(equivariance());
    r.checks.push_back(clause1());
    r.checks.push_back(clause2());
    r.checks.push_back(clause3());
    r.checks.push_back(clause4());
    r.checks.push_back(clause5());
    r.checks.push_back(brute_force_agreement());
    return r;
  }

 private:
  const Structure& star(const Structure& m) const { return expansions_.at(sized_key(m)); }

  CheckResult expansions_model() {
    CheckResult c{"expansions-model-Tstar", true, 0, {}, {}};
    for (const auto& m : members_) {
      ++c.cases;
      const auto& s = star(m);
      if (auto bad = first_violated_axiom(t_, s))
        c.fail("expansion of " + m.signature() + " violates schema " + std::to_string(bad->schema) + " axiom " +
               bad->formula.text());
      if (s.reduct(t_.vocab.tau) != m) c.fail("reduct of the expansion of " + m.signature() + " differs");
    }
    return c;
  }

  CheckResult equivariance() {
    CheckResult c{"expand-equivariance", true, 0, {}, {}};
    for (const auto& m : members_) {
      UniverseMap sigma = identity_map(m.size());
      do {
        ++c.cases;
        if (expand(a_, t_, m.permuted(sigma)) != star(m).permuted(sigma))
          c.fail("expand does not commute with a relabelling of " + m.signature());
      } while (std::next_permutation(sigma.begin(), sigma.end()));
    }
    return c;
  }

  CheckResult clause1() {
    CheckResult c{"clause-1", true, 0, {}, {}};
    for (std::uint32_t n = 1; n <= o_.search_cap; ++n) {
      for (const auto& ms : models_of_Tstar(t_, n)) {
        ++c.cases;
        const auto reduct = ms.reduct(t_.vocab.tau);
        if (!a_.is_member(reduct)) {
          c.fail("model of T* with reduct outside K:\n" + serialize(ms));
          continue;
        }
        for (std::size_t i = 0; i < t_.catalog.blocks.size(); ++i) {
          const auto& rep = t_.catalog.blocks[i].rep;
          const auto r = *ms.vocabulary().find_relation(t_.vocab.block_symbols[i]);
          Tuple tup(rep.size());
          for (std::size_t code = 0; code < ms.relation_table(r).size(); ++code) {
            if (!ms.holds_code(r, code)) continue;
            decode_tuple(code, n, tup);
            if (!a_.is_strong_embedding(rep, tup, reduct))
              c.fail(t_.vocab.block_symbols[i] + " holds of a tuple that does not enumerate a strong submodel");
          }
        }
      }
    }
    return c;
  }

  CheckResult clause2() {
    CheckResult c{"clause-2", true, 0, {}, {}};
    for (const auto& m : members_) {
      if (m.size() > o_.search_cap) continue;
      ++c.cases;
      const auto found = models_of_Tstar(t_, m.size(), &m);
      if (found.size() != 1)
        c.fail(m.signature() + " has " + std::to_string(found.size()) + " expansions satisfying T*");
      else if (found.front() != star(m))
        c.fail("the unique T*-expansion of " + m.signature() + " is not the canonical expansion");
    }
    return c;
  }

  // Strong subsets S of N with the induced member M.
  template <class Visit>
  void strong_pairs(bool strong_only, Visit&& visit) {
    for (const auto& n : members_) {
      for (std::uint32_t mask = 1; mask < (1u << n.size()); ++mask) {
        const auto s = subset_elements(mask);
        if (!n.is_closed(s)) continue;
        const auto m = n.induced(s);
        if (!a_.is_member(m)) continue;
        const bool strong = a_.is_strong_subset(s, n);
        if (strong_only && !strong) continue;
        visit(m, UniverseMap(s.begin(), s.end()), n, strong);
      }
    }
  }

  CheckResult clause3() {
    CheckResult c{"clause-3", true, 0, {}, {}};
    strong_pairs(true, [&](const Structure& m, const UniverseMap& e, const Structure& n, bool) {
      ++c.cases;
      if (!is_substructure_embedding(star(m), e, star(n)))
        c.fail("expansion of strong " + m.signature() + " is not a substructure of the expansion of " + n.signature());
    });
    return c;
  }

  CheckResult clause4() {
    CheckResult c{"clause-4", true, 0, {}, {}};
    strong_pairs(false, [&](const Structure& m, const UniverseMap& e, const Structure& n, bool strong) {
      if (!is_substructure_embedding(star(m), e, star(n))) return;
      ++c.cases;
      if (!strong) c.fail("expansions nest but " + m.signature() + " is not strong in " + n.signature());
    });
    return c;
  }

  CheckResult clause5() {
    CheckResult c{"clause-5", true, 0, {}, {}};
    strong_pairs(true, [&](const Structure& m, const UniverseMap& e, const Structure& n, bool) {
      ++c.cases;
      const auto& witness = star(n);
      if (witness.reduct(t_.vocab.tau) != n || first_violated_axiom(t_, witness) ||
          !is_substructure_embedding(star(m), e, witness))
        c.fail("no T*-expansion of " + n.signature() + " extends the expansion of " + m.signature());
    });
    return c;
  }

  CheckResult brute_force_agreement() {
    CheckResult c{"brute-force-agreement", true, 0, {}, {}};
    for (std::uint32_t n = 1; n <= o_.search_cap; ++n) {
      if (structure_count(*t_.vocab.tau_star, n) <= o_.brute_force_limit) {
        ++c.cases;
        if (models_of_Tstar_brute_force(t_, n, nullptr, o_.brute_force_limit) != models_of_Tstar(t_, n))
          c.fail("literal enumeration and search disagree on " + std::to_string(n) + "-element models");
      }
      for (const auto& m : members_) {
        if (m.size() != n) continue;
        Vocabulary only_r;
        for (const auto& r : t_.vocab.tau_star->relations())
          if (!t_.vocab.tau->contains(r.name)) only_r.add_relation(r.name, r.arity);
        if (structure_count(only_r, n) > o_.brute_force_limit) continue;
        ++c.cases;
        if (models_of_Tstar_brute_force(t_, n, &m, o_.brute_force_limit) != models_of_Tstar(t_, n, &m))
          c.fail("literal enumeration and search disagree on expansions of " + m.signature());
      }
    }
    return c;
  }

  const ToyAEC& a_;
  const PresentationTheory& t_;
  const VerifyOptions& o_;
  std::vector<Structure> members_;
  std::map<std::vector<std::uint32_t>, Structure> expansions_;
};

}  // namespace

Report verify_presentation(const ToyAEC& a, const PresentationTheory& t, const VerifyOptions& options) {
  return PresentationVerifier(a, t, options).run();
}

}  // namespace aecspace
