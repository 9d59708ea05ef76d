#include "aecspace/logicspace.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "aecspace/error.hpp"
#include "aecspace/model_search.hpp"

namespace aecspace {

namespace {

std::vector<Term> element_terms(const Tuple& t) {
  std::vector<Term> out;
  for (auto e : t) out.push_back(Term::element(e));
  return out;
}

Tuple tuple_of(std::size_t code, std::uint32_t n, std::uint32_t arity) {
  Tuple t(arity);
  decode_tuple(code, n, t);
  return t;
}

// ¬ as an involution, so closing under it terminates.
Formula neg(const Formula& f) { return f.kind() == FormulaKind::Not ? f.child() : Formula::negation(f); }

// Every assignment of elements to `vars`, first variable most significant.
template <class Visit>
void for_each_assignment(const std::vector<std::uint32_t>& vars, std::uint32_t n, Visit&& visit) {
  const std::uint64_t total = saturating_pow(n, vars.size());
  Tuple t(vars.size());
  for (std::uint64_t code = 0; code < total; ++code) {
    decode_tuple(code, n, t);
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = t[i];
    visit(a, t);
  }
}

// Subsentences, quantifier instances and negations of a sentence, in
// discovery order.
std::vector<Formula> sentence_closure(const Formula& root, std::uint32_t n) {
  std::vector<Formula> out;
  std::unordered_set<std::string> seen;
  std::deque<Formula> queue;
  auto push = [&](const Formula& f) {
    if (seen.insert(f.text()).second) {
      out.push_back(f);
      queue.push_back(f);
    }
  };
  push(root);
  while (!queue.empty()) {
    const Formula f = queue.front();
    queue.pop_front();
    push(neg(f));
    switch (f.kind()) {
      case FormulaKind::Not:
      case FormulaKind::And:
      case FormulaKind::Or:
        for (const auto& c : f.children()) push(c);
        break;
      case FormulaKind::Exists:
      case FormulaKind::Forall:
        for_each_assignment(f.bound_variables(), n, [&](const Assignment& a, const Tuple&) { push(ground(f.child(), a)); });
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace

std::vector<Formula> atomic_sentences(const Vocabulary& vocab, std::uint32_t n) {
  std::vector<Formula> out;
  for (const auto& r : vocab.relations()) {
    const auto cells = saturating_pow(n, r.arity);
    for (std::uint64_t code = 0; code < cells; ++code)
      out.push_back(Formula::relation(r.name, element_terms(tuple_of(code, n, r.arity))));
  }
  for (const auto& fn : vocab.functions()) {
    const auto cells = saturating_pow(n, fn.arity);
    for (std::uint64_t code = 0; code < cells; ++code) {
      const Term value = Term::apply(fn.name, element_terms(tuple_of(code, n, fn.arity)));
      for (std::uint32_t l = 0; l < n; ++l) out.push_back(Formula::equals(value, Term::element(l)));
    }
  }
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) out.push_back(Formula::equals(Term::element(i), Term::element(j)));
  return out;
}

void SentenceIndex::push(const Formula& f) {
  if (index_.try_emplace(f.text(), sentences_.size()).second) sentences_.push_back(f);
}

void SentenceIndex::finish() {
  compiled_.clear();
  compiled_.reserve(sentences_.size());
  for (const auto& f : sentences_) {
    if (!f.is_sentence()) throw Error("not a sentence: " + f.text());
    if (f.max_element() > n_) throw Error("sentence names an element outside the universe: " + f.text());
    compiled_.emplace_back(f, *vocab_);
  }
  negations_.clear();
  disjunctions_.clear();
  existentials_.clear();
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    const auto& f = sentences_[i];
    switch (f.kind()) {
      case FormulaKind::Not:
        if (auto j = find(f.child())) negations_.emplace_back(*j, i);
        break;
      case FormulaKind::Or: {
        std::vector<std::size_t> parts;
        for (const auto& c : f.children())
          if (auto j = find(c)) parts.push_back(*j);
        disjunctions_.emplace_back(i, std::move(parts));
        break;
      }
      case FormulaKind::Exists: {
        std::vector<std::size_t> parts;
        for_each_assignment(f.bound_variables(), n_, [&](const Assignment& a, const Tuple&) {
          if (auto j = find(ground(f.child(), a))) parts.push_back(*j);
        });
        std::sort(parts.begin(), parts.end());
        parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
        existentials_.emplace_back(i, std::move(parts));
        break;
      }
      default:
        break;
    }
  }
  std::sort(negations_.begin(), negations_.end());
}

std::optional<std::size_t> SentenceIndex::find(const Formula& f) const {
  const auto it = index_.find(f.text());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SentenceIndex SentenceIndex::atomic(const VocabularyPtr& vocab, std::uint32_t n) {
  if (n == 0) throw Error("sentence index needs a non-empty universe");
  SentenceIndex s;
  s.vocab_ = vocab;
  s.n_ = n;
  for (const auto& a : atomic_sentences(*vocab, n)) {
    s.push(a);
    s.push(neg(a));
  }
  s.atomic_count_ = s.sentences_.size();
  s.budget_ = s.sentences_.size();
  s.finish();
  return s;
}

SentenceIndex SentenceIndex::build(const Fragment& f, std::uint32_t n, std::size_t sentence_count) {
  if (n == 0) throw Error("sentence index needs a non-empty universe");
  SentenceIndex s;
  s.vocab_ = f.vocabulary();
  s.n_ = n;
  s.budget_ = sentence_count;
  for (const auto& a : atomic_sentences(*s.vocab_, n)) {
    s.push(a);
    s.push(neg(a));
  }
  s.atomic_count_ = s.sentences_.size();
  if (s.atomic_count_ > sentence_count)
    throw BudgetExceeded("atomic layer has " + std::to_string(s.atomic_count_) + " sentences, budget " +
                         std::to_string(sentence_count));

  // Returns false once the budget stops the enumeration.
  auto admit = [&](const Formula& sentence) {
    if (s.index_.count(sentence.text())) return true;
    std::vector<Formula> fresh;
    for (const auto& g : sentence_closure(sentence, n))
      if (!s.index_.count(g.text())) fresh.push_back(g);
    if (s.sentences_.size() + fresh.size() > sentence_count) {
      s.truncated_ = true;
      return false;
    }
    for (const auto& g : fresh) s.push(g);
    return true;
  };

  bool open = true;
  for (const auto& seed : f.seed())
    if (open && seed.is_sentence()) open = admit(seed);
  for (const auto& m : f.members()) {
    if (!open) break;
    for_each_assignment(m.free_variables(), n, [&](const Assignment& a, const Tuple&) {
      if (open) open = admit(ground(m, a));
    });
  }
  s.finish();
  return s;
}

SentenceIndex SentenceIndex::from_list(const VocabularyPtr& vocab, std::uint32_t n,
                                       const std::vector<Formula>& sentences) {
  if (n == 0) throw Error("sentence index needs a non-empty universe");
  SentenceIndex s;
  s.vocab_ = vocab;
  s.n_ = n;
  for (const auto& f : sentences) s.push(f);
  const auto atoms = atomic_sentences(*vocab, n);
  s.atomic_count_ = static_cast<std::size_t>(std::count_if(atoms.begin(), atoms.end(), [&](const Formula& a) {
    return s.index_.count(a.text()) != 0;
  }));
  s.budget_ = s.sentences_.size();
  s.finish();
  return s;
}

bool TheoryFunction::is_total() const {
  return std::none_of(bits_.begin(), bits_.end(), [](std::int8_t b) { return b < 0; });
}

std::string serialize(const TheoryFunction& f, const SentenceIndex& s) {
  if (f.size() != s.size()) throw Error("theory function does not match the sentence index");
  std::vector<std::pair<std::string, int>> rows;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (auto v = f.get(i)) rows.emplace_back(s.at(i).text(), *v ? 1 : 0);
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (const auto& [text, bit] : rows) out += "(" + text + ", " + std::to_string(bit) + ")\n";
  return out;
}

TheoryFunction parse_theory_function(std::string_view text, const SentenceIndex& s) {
  TheoryFunction f(s.size());
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.rfind(", ");
    if (line.front() != '(' || line.back() != ')' || comma == std::string::npos)
      throw ParseError("malformed theory function record", line_no, 1);
    const auto body = line.substr(1, comma - 1);
    const auto bit = line.substr(comma + 2, line.size() - comma - 3);
    if (bit != "0" && bit != "1") throw ParseError("bit must be 0 or 1", line_no, comma + 3);
    const auto i = s.find(parse_formula(body));
    if (!i) throw Error("sentence not in the index: " + body);
    f.set(*i, bit == "1");
  }
  return f;
}

TheoryFunction encode(const Structure& m, const SentenceIndex& s) {
  if (m.size() != s.universe())
    throw Error("structure of size " + std::to_string(m.size()) + " against constants for " +
                std::to_string(s.universe()) + " elements");
  if (m.vocabulary() != *s.vocabulary()) throw VocabularyError("structure and sentence index vocabularies differ");
  TheoryFunction f(s.size());
  const DefiniteModel model(m);
  for (std::size_t i = 0; i < s.size(); ++i) f.set(i, s.compiled(i).evaluate(model) == Truth::True);
  return f;
}

namespace {

// Decoding with a policy for functions whose value is not pinned down. The
// strict policy throws; the lenient one picks the least witness or 0.
Structure decode_with(const TheoryFunction& f, const SentenceIndex& s, bool strict) {
  const auto& vocab = *s.vocabulary();
  const auto n = s.universe();
  Structure m(s.vocabulary(), n);
  auto lookup = [&](const Formula& atom) -> std::optional<bool> {
    const auto i = s.find(atom);
    if (!i) {
      if (strict) throw DecodeError(DecodeError::Kind::MissingSentence, "no sentence " + atom.text());
      return std::nullopt;
    }
    auto v = f.get(*i);
    if (!v && strict) throw DecodeError(DecodeError::Kind::MissingSentence, "no value for " + atom.text());
    return v;
  };
  for (std::size_t r = 0; r < vocab.relations().size(); ++r) {
    const auto& sym = vocab.relations()[r];
    const auto cells = saturating_pow(n, sym.arity);
    for (std::uint64_t code = 0; code < cells; ++code) {
      const auto v = lookup(Formula::relation(sym.name, element_terms(tuple_of(code, n, sym.arity))));
      m.set_code(r, code, v.value_or(false));
    }
  }
  for (std::size_t g = 0; g < vocab.functions().size(); ++g) {
    const auto& sym = vocab.functions()[g];
    const auto cells = saturating_pow(n, sym.arity);
    for (std::uint64_t code = 0; code < cells; ++code) {
      const Term value = Term::apply(sym.name, element_terms(tuple_of(code, n, sym.arity)));
      std::vector<std::uint32_t> witnesses;
      for (std::uint32_t l = 0; l < n; ++l)
        if (lookup(Formula::equals(value, Term::element(l))).value_or(false)) witnesses.push_back(l);
      if (strict && witnesses.empty())
        throw DecodeError(DecodeError::Kind::NoWitness, "no witness for " + value.text());
      if (strict && witnesses.size() > 1)
        throw DecodeError(DecodeError::Kind::MultipleWitnesses,
                          "witnesses c" + std::to_string(witnesses[0]) + " and c" + std::to_string(witnesses[1]) +
                              " for " + value.text());
      m.set_value_code(g, code, witnesses.empty() ? 0 : witnesses.front());
    }
  }
  return m;
}

}  // namespace

Structure decode(const TheoryFunction& f, const SentenceIndex& s) {
  if (f.size() != s.size()) throw Error("theory function does not match the sentence index");
  return decode_with(f, s, true);
}

bool BMembership::violates(int condition) const {
  return std::any_of(violations.begin(), violations.end(), [&](const BViolation& v) { return v.condition == condition; });
}

namespace {

std::string describe_set(const SentenceIndex& s, const std::vector<std::size_t>& indices) {
  std::string out = "{";
  for (std::size_t k = 0; k < indices.size(); ++k) out += (k ? "; " : "") + s.at(indices[k]).text();
  return out + "}";
}

// Satisfiability of sentence subsets on the fixed universe, memoized.
class ConsistencyOracle {
 public:
  ConsistencyOracle(const SentenceIndex& s, std::uint64_t limit) : s_(s), limit_(limit) {}

  bool consistent(std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    std::string key;
    for (auto i : indices) key += std::to_string(i) + ",";
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    if (++checks_ > limit_) throw BudgetExceeded("more than " + std::to_string(limit_) + " consistency checks");
    std::vector<CompiledFormula> sentences;
    for (auto i : indices) sentences.push_back(s_.compiled(i));
    SearchOptions options;
    options.relevant_symbols_only = true;
    const bool sat = find_model(PartialStructure(s_.vocabulary(), s_.universe()), sentences, options).has_value();
    cache_.emplace(std::move(key), sat);
    return sat;
  }

 private:
  const SentenceIndex& s_;
  std::uint64_t limit_;
  std::uint64_t checks_ = 0;
  std::unordered_map<std::string, bool> cache_;
};

// Table cells a sentence reads. Quantified sentences and nested function
// terms read whole tables, marked by cell npos.
using Cell = std::pair<std::uint32_t, std::size_t>;  // (symbol slot, cell code)
constexpr std::size_t kWholeTable = static_cast<std::size_t>(-1);

struct Footprint {
  std::set<Cell> cells;

  bool meets(const Footprint& other) const {
    for (const auto& [sym, code] : cells)
      for (const auto& [sym2, code2] : other.cells)
        if (sym == sym2 && (code == code2 || code == kWholeTable || code2 == kWholeTable)) return true;
    return false;
  }
};

Footprint footprint(const Formula& f, const Vocabulary& vocab, std::uint32_t n) {
  Footprint out;
  const auto functions_offset = static_cast<std::uint32_t>(vocab.relations().size());
  auto whole = [&](const Formula& g, auto&& self) -> void {
    for (const auto& name : symbols_of(g)) {
      if (auto r = vocab.find_relation(name)) out.cells.insert({static_cast<std::uint32_t>(*r), kWholeTable});
      if (auto fn = vocab.find_function(name))
        out.cells.insert({functions_offset + static_cast<std::uint32_t>(*fn), kWholeTable});
    }
    (void)self;
  };
  // Elements of a flat argument list, or nullopt when some argument is not
  // an element term.
  auto flat = [](const std::vector<Term>& args) -> std::optional<Tuple> {
    Tuple t;
    for (const auto& a : args) {
      if (a.kind != Term::Kind::Element) return std::nullopt;
      t.push_back(a.index);
    }
    return t;
  };
  std::function<void(const Term&)> term = [&](const Term& t) {
    if (t.kind != Term::Kind::Apply) return;
    const auto fn = vocab.find_function(t.symbol);
    if (!fn) return;
    const auto slot = functions_offset + static_cast<std::uint32_t>(*fn);
    if (auto args = flat(t.args)) {
      out.cells.insert({slot, tuple_code(*args, n)});
    } else {
      out.cells.insert({slot, kWholeTable});
      for (const auto& a : t.args) term(a);
    }
  };
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    switch (g.kind()) {
      case FormulaKind::Relation: {
        const auto r = static_cast<std::uint32_t>(*vocab.find_relation(g.symbol()));
        if (auto args = flat(g.terms())) {
          out.cells.insert({r, tuple_code(*args, n)});
        } else {
          out.cells.insert({r, kWholeTable});
          for (const auto& t : g.terms()) term(t);
        }
        break;
      }
      case FormulaKind::Equals:
        for (const auto& t : g.terms()) term(t);
        break;
      case FormulaKind::Exists:
      case FormulaKind::Forall:
        whole(g, whole);
        break;
      default:
        for (const auto& c : g.children()) walk(c);
    }
  };
  walk(f);
  return out;
}

// Least inconsistent subset of the true sentences that contains a sentence
// false in `probe`. Minimal inconsistent sets are connected through shared
// table cells, so only connected candidates are tried.
std::optional<std::vector<std::size_t>> find_inconsistent_subset(const SentenceIndex& s, const TheoryFunction& f,
                                                                 const Structure& probe, ConsistencyOracle& oracle,
                                                                 std::uint32_t arity) {
  const DefiniteModel model(probe);
  std::vector<std::size_t> truths, violators;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!f.value(i)) continue;
    truths.push_back(i);
    if (s.compiled(i).evaluate(model) != Truth::True) violators.push_back(i);
  }
  if (violators.empty()) return std::nullopt;

  std::unordered_map<std::size_t, Footprint> prints;
  for (auto i : truths) prints.emplace(i, footprint(s.at(i), *s.vocabulary(), s.universe()));

  for (std::uint32_t k = 1; k <= arity; ++k) {
    for (auto v : violators) {
      // Grow connected sets from v by adding true sentences that meet the set.
      std::vector<std::size_t> set{v};
      std::optional<std::vector<std::size_t>> found;
      std::function<void()> grow = [&]() {
        if (found) return;
        if (set.size() == k) {
          if (!oracle.consistent(set)) found = set;
          return;
        }
        for (auto u : truths) {
          if (std::find(set.begin(), set.end(), u) != set.end()) continue;
          // Canonical order among the added members avoids revisiting sets.
          if (set.size() > 1 && u < set.back()) continue;
          const bool touches = std::any_of(set.begin(), set.end(), [&](std::size_t w) { return prints.at(w).meets(prints.at(u)); });
          if (!touches) continue;
          set.push_back(u);
          grow();
          set.pop_back();
          if (found) return;
        }
      };
      grow();
      if (found) {
        std::sort(found->begin(), found->end());
        return found;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

BMembership check_B_membership(const TheoryFunction& f, const SentenceIndex& s, const BOptions& options) {
  if (f.size() != s.size()) throw Error("theory function does not match the sentence index");
  if (!f.is_total()) throw Error("condition check needs a total theory function");
  BMembership out;
  auto record = [&](int condition, std::string witness) {
    out.member = false;
    if (!out.violates(condition)) out.violations.push_back({condition, std::move(witness)});
  };

  ConsistencyOracle oracle(s, options.consistency_limit);
  const Structure probe = decode_with(f, s, false);
  if (auto subset = find_inconsistent_subset(s, f, probe, oracle, options.subset_arity))
    record(1, "inconsistent " + describe_set(s, *subset));

  for (const auto& [psi, not_psi] : s.negations())
    if (f.value(psi) == f.value(not_psi))
      record(2, s.at(psi).text() + " and its negation both " + (f.value(psi) ? "1" : "0"));

  for (const auto& [d, parts] : s.disjunctions()) {
    const bool some = std::any_of(parts.begin(), parts.end(), [&](std::size_t i) { return f.value(i); });
    if (f.value(d) != some)
      record(3, s.at(d).text() + (some ? " is 0 with a true disjunct" : " is 1 with no true disjunct"));
  }

  for (const auto& [e, parts] : s.existentials()) {
    const bool some = std::any_of(parts.begin(), parts.end(), [&](std::size_t i) { return f.value(i); });
    if (f.value(e) != some)
      record(4, s.at(e).text() + (some ? " is 0 with a true instance" : " is 1 with no witness"));
  }
  std::sort(out.violations.begin(), out.violations.end(),
            [](const BViolation& a, const BViolation& b) { return a.condition < b.condition; });
  return out;
}

std::optional<TheoryFunction> corrupt_double_truth(const TheoryFunction& f, const SentenceIndex& s) {
  if (s.negations().empty()) return std::nullopt;
  auto g = f;
  const auto [psi, not_psi] = s.negations().front();
  g.set(psi, true);
  g.set(not_psi, true);
  return g;
}

namespace {

std::optional<std::size_t> negation_of(const SentenceIndex& s, std::size_t i) {
  const auto& f = s.at(i);
  return s.find(f.kind() == FormulaKind::Not ? f.child() : Formula::negation(f));
}

}  // namespace

std::optional<TheoryFunction> corrupt_missing_witness(const TheoryFunction& f, const SentenceIndex& s) {
  for (const auto& [e, parts] : s.existentials()) {
    if (!f.value(e) || parts.empty()) continue;
    auto g = f;
    for (auto p : parts) {
      g.set(p, false);
      if (auto q = negation_of(s, p)) g.set(*q, true);
    }
    return g;
  }
  return std::nullopt;
}

std::optional<TheoryFunction> corrupt_inconsistent_subset(const TheoryFunction& f, const SentenceIndex& s) {
  std::unordered_set<std::size_t> parts;
  for (const auto& [d, ps] : s.disjunctions()) parts.insert(ps.begin(), ps.end());
  for (const auto& [e, ps] : s.existentials()) parts.insert(ps.begin(), ps.end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.at(i).kind() != FormulaKind::And || !f.value(i) || parts.count(i)) continue;
    const auto j = negation_of(s, i);
    if (!j || parts.count(*j)) continue;
    auto g = f;
    g.set(i, false);
    g.set(*j, true);
    return g;
  }
  return std::nullopt;
}

SentenceIndex truncated_index(const SentenceIndex& s, std::size_t limit) {
  std::vector<std::size_t> chosen;
  std::unordered_set<std::size_t> taken;
  auto with_negations = [&](std::vector<std::size_t> group) {
    const auto base = group.size();
    for (std::size_t k = 0; k < base; ++k)
      if (auto j = negation_of(s, group[k])) group.push_back(*j);
    std::vector<std::size_t> fresh;
    for (auto i : group)
      if (!taken.count(i) && std::find(fresh.begin(), fresh.end(), i) == fresh.end()) fresh.push_back(i);
    if (chosen.size() + fresh.size() > limit) return;
    for (auto i : fresh) {
      taken.insert(i);
      chosen.push_back(i);
    }
  };
  auto group_of = [](std::size_t whole, const std::vector<std::size_t>& parts) {
    std::vector<std::size_t> g{whole};
    g.insert(g.end(), parts.begin(), parts.end());
    return g;
  };
  if (!s.existentials().empty()) with_negations(group_of(s.existentials().front().first, s.existentials().front().second));
  if (!s.disjunctions().empty()) with_negations(group_of(s.disjunctions().front().first, s.disjunctions().front().second));
  for (std::size_t i = 0; i < s.atomic_count() && chosen.size() < limit; ++i)
    if (s.at(i).is_atomic()) with_negations({i});
  std::sort(chosen.begin(), chosen.end());
  std::vector<Formula> sentences;
  for (auto i : chosen) sentences.push_back(s.at(i));
  return SentenceIndex::from_list(s.vocabulary(), s.universe(), sentences);
}

bool is_consistent(const SentenceIndex& s, const std::vector<std::size_t>& indices) {
  ConsistencyOracle oracle(s, 1);
  return oracle.consistent(indices);
}

bool Condition::admits(const TheoryFunction& f) const {
  return std::all_of(literals.begin(), literals.end(), [&](const auto& l) {
    const auto v = f.get(l.first);
    return v && *v == l.second;
  });
}

bool OpenSet::contains(const TheoryFunction& f) const {
  return std::any_of(conditions.begin(), conditions.end(), [&](const Condition& c) { return c.admits(f); });
}

std::vector<std::size_t> OpenSet::support() const {
  std::set<std::size_t> out;
  for (const auto& c : conditions)
    for (const auto& l : c.literals) out.insert(l.first);
  return {out.begin(), out.end()};
}

bool WitnessFamily::contains(const TheoryFunction& f) const {
  return std::all_of(members.begin(), members.end(), [&](const OpenSet& o) { return o.contains(f); });
}

bool GdeltaWitnesses::contains(const TheoryFunction& f) const {
  return std::all_of(families.begin(), families.end(), [&](const WitnessFamily& w) { return w.contains(f); });
}

namespace {

Condition literal(std::size_t i, bool v) { return Condition{{{i, v}}}; }

// Visits every subset of {0..size-1} with 1..arity elements, smallest first.
template <class Visit>
void for_each_small_subset(std::size_t size, std::uint32_t arity, Visit&& visit) {
  std::vector<std::size_t> pick;
  for (std::uint32_t k = 1; k <= arity && k <= size; ++k) {
    pick.resize(k);
    for (std::uint32_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      visit(pick);
      std::size_t j = k;
      while (j > 0 && pick[j - 1] == size - k + (j - 1)) --j;
      if (j == 0) break;
      ++pick[j - 1];
      for (std::size_t t = j; t < k; ++t) pick[t] = pick[t - 1] + 1;
    }
  }
}

std::uint64_t small_subset_count(std::size_t size, std::uint32_t arity) {
  std::uint64_t total = 0, binom = 1;
  for (std::uint32_t k = 1; k <= arity && k <= size; ++k) {
    binom = binom * (size - k + 1) / k;
    total += binom;
  }
  return total;
}

}  // namespace

GdeltaWitnesses gdelta_witnesses(const SentenceIndex& s, const BOptions& options) {
  const auto subsets = small_subset_count(s.size(), options.subset_arity);
  if (subsets > options.consistency_limit)
    throw BudgetExceeded(std::to_string(subsets) + " finite subsets exceed the consistency budget");
  GdeltaWitnesses out;
  out.subset_arity = options.subset_arity;
  ConsistencyOracle oracle(s, options.consistency_limit);

  WitnessFamily f1{"1", {}, {}};
  for_each_small_subset(s.size(), options.subset_arity, [&](const std::vector<std::size_t>& a) {
    if (oracle.consistent(a)) return;
    out.inconsistent.push_back(a);
    OpenSet o;
    for (auto i : a) o.conditions.push_back(literal(i, false));
    f1.members.push_back(std::move(o));
    f1.labels.push_back(describe_set(s, a));
  });

  WitnessFamily f2{"2", {}, {}};
  for (const auto& [psi, not_psi] : s.negations()) {
    f2.members.push_back(OpenSet{{Condition{{{psi, false}, {not_psi, true}}}, Condition{{{psi, true}, {not_psi, false}}}}});
    f2.labels.push_back(s.at(psi).text());
  }

  // Both directions of the disjunction and existential conditions share a shape.
  auto directions = [&](const std::string& name,
                        const std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& items, WitnessFamily& up,
                        WitnessFamily& down) {
    up.condition = name + "a";
    down.condition = name + "b";
    for (const auto& [whole, parts] : items) {
      for (auto p : parts) {
        up.members.push_back(OpenSet{{literal(p, false), literal(whole, true)}});
        up.labels.push_back(s.at(p).text() + " => " + s.at(whole).text());
      }
      OpenSet o{{literal(whole, false)}};
      for (auto p : parts) o.conditions.push_back(literal(p, true));
      down.members.push_back(std::move(o));
      down.labels.push_back(s.at(whole).text());
    }
  };
  WitnessFamily f3a, f3b, f4a, f4b;
  directions("3", s.disjunctions(), f3a, f3b);
  directions("4", s.existentials(), f4a, f4b);
  out.families = {std::move(f1), std::move(f2), std::move(f3a), std::move(f3b), std::move(f4a), std::move(f4b)};
  return out;
}

std::string export_witnesses(const GdeltaWitnesses& w, const SentenceIndex& s) {
  std::string out = "# subset-arity " + std::to_string(w.subset_arity) + "\n";
  for (const auto& fam : w.families) {
    for (std::size_t k = 0; k < fam.members.size(); ++k) {
      out += "family " + fam.condition + " set " + std::to_string(k) + " :";
      const auto& conds = fam.members[k].conditions;
      for (std::size_t c = 0; c < conds.size(); ++c) {
        out += c ? " |" : "";
        for (const auto& [i, v] : conds[c].literals) out += " " + s.at(i).text() + "=" + (v ? "1" : "0");
      }
      out += "\n";
    }
  }
  return out;
}

Report gdelta_equivalence(const SentenceIndex& s, const BOptions& options) {
  if (s.size() > 20) throw BudgetExceeded("2^" + std::to_string(s.size()) + " theory functions");
  const auto w = gdelta_witnesses(s, options);
  Report report;

  CheckResult open{"families-open", true, 0, {}, {}};
  CheckResult two{"family-2-support", true, 0, {}, {}};
  for (const auto& fam : w.families)
    for (std::size_t k = 0; k < fam.members.size(); ++k) {
      ++open.cases;
      const auto support = fam.members[k].support();
      if (fam.members[k].conditions.empty() && fam.condition != "1")
        open.fail("family " + fam.condition + " set " + std::to_string(k) + " is empty");
      for (auto i : support)
        if (i >= s.size()) open.fail("family " + fam.condition + " reads a coordinate outside S");
      if (fam.condition == "2") {
        ++two.cases;
        if (support.size() != 2) two.fail(fam.labels[k] + " depends on " + std::to_string(support.size()) + " coordinates");
      }
    }

  CheckResult eq{"gdelta-equals-B", true, 0, {}, {}};
  std::uint64_t members = 0;
  const std::uint64_t total = std::uint64_t{1} << s.size();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    TheoryFunction f(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) f.set(i, (bits >> i) & 1);
    const bool in_b = check_B_membership(f, s, options).member;
    const bool in_g = w.contains(f);
    members += in_b;
    ++eq.cases;
    if (in_b != in_g) eq.fail("function " + std::to_string(bits) + (in_b ? " in B only" : " in the intersection only"));
  }
  eq.note = "|S|=" + std::to_string(s.size()) + " |B|=" + std::to_string(members) +
            " inconsistent-subsets=" + std::to_string(w.inconsistent.size());
  report.checks = {open, two, eq};
  return report;
}

std::string to_string(BasisMode mode) {
  switch (mode) {
    case BasisMode::QuantifierFree:
      return "quantifier-free";
    case BasisMode::FirstOrder:
      return "first-order";
    case BasisMode::Fragment:
      return "fragment";
  }
  return "?";
}

BasisMode parse_basis_mode(std::string_view text) {
  for (auto m : {BasisMode::QuantifierFree, BasisMode::FirstOrder, BasisMode::Fragment})
    if (text == to_string(m)) return m;
  throw Error("unknown basis mode '" + std::string(text) + "'");
}

Formula BasicOpen::sentence() const {
  const auto& vars = formula.free_variables();
  Assignment a;
  for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = parameters.at(i);
  return ground(formula, a);
}

bool BasicOpen::contains(const Structure& m) const {
  const auto& vars = formula.free_variables();
  Assignment a;
  for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = parameters.at(i);
  return evaluate(m, formula, a);
}

FragmentBudget BasisOptions::small_budget() {
  FragmentBudget b;
  b.variables = 2;
  b.max_free = 2;
  b.seed_free = 2;
  b.max_depth = 1;
  b.max_width = 2;
  b.max_term_depth = 1;
  b.seed_substitution = false;
  b.max_count = 200'000;
  return b;
}

namespace {

bool quantifier_free(const Formula& f) {
  if (f.kind() == FormulaKind::Exists || f.kind() == FormulaKind::Forall) return false;
  return std::all_of(f.children().begin(), f.children().end(), quantifier_free);
}

}  // namespace

Basis basis(BasisMode mode, const VocabularyPtr& vocab, std::uint32_t n, const BasisOptions& options,
            const Fragment* fragment) {
  std::vector<Formula> formulas;
  if (mode == BasisMode::Fragment) {
    if (!fragment) throw Error("fragment basis needs a fragment");
    if (*fragment->vocabulary() != *vocab) throw VocabularyError("fragment over a different vocabulary");
    formulas = fragment->members();
  } else {
    const auto closure = fragment_closure({}, vocab, options.budget);
    for (const auto& f : closure.members())
      if (mode == BasisMode::FirstOrder || quantifier_free(f)) formulas.push_back(f);
  }
  Basis out;
  for (const auto& f : formulas) {
    if (out.truncated) break;
    bool used = false;
    for_each_assignment(f.free_variables(), n, [&](const Assignment&, const Tuple& t) {
      if (out.sets.size() >= options.max_sets) {
        out.truncated = true;
        return;
      }
      out.sets.push_back({f, t});
      used = true;
    });
    out.formulas += used;
  }
  return out;
}

std::vector<Structure> all_structures(const SentenceIndex& s, std::uint64_t limit) {
  return enumerate_structures(s.vocabulary(), s.universe(), limit);
}

CheckResult atomic_determination(const SentenceIndex& s) {
  CheckResult c{"atomic-determination", true, 0, {}, {}};
  const auto& vocab = *s.vocabulary();
  const auto n = s.universe();
  for (const auto& r : vocab.relations())
    for (std::uint64_t code = 0; code < saturating_pow(n, r.arity); ++code) {
      ++c.cases;
      const auto atom = Formula::relation(r.name, element_terms(tuple_of(code, n, r.arity)));
      if (!s.find(atom)) c.fail("no sentence decides " + atom.text());
    }
  for (const auto& fn : vocab.functions())
    for (std::uint64_t code = 0; code < saturating_pow(n, fn.arity); ++code) {
      ++c.cases;
      const Term value = Term::apply(fn.name, element_terms(tuple_of(code, n, fn.arity)));
      for (std::uint32_t l = 0; l < n; ++l)
        if (!s.find(Formula::equals(value, Term::element(l)))) c.fail("no sentence decides " + value.text());
    }
  return c;
}

Report continuity_check(const SentenceIndex& s, const std::vector<Structure>& domain, const Basis& basis,
                        const ContinuityOptions& options) {
  std::vector<TheoryFunction> codes;
  for (const auto& m : domain) codes.push_back(encode(m, s));

  CheckResult injective{"injective", true, 0, {}, {}};
  {
    std::map<std::vector<bool>, std::size_t> seen;
    for (std::size_t k = 0; k < codes.size(); ++k) {
      ++injective.cases;
      std::vector<bool> bits(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) bits[i] = codes[k].value(i);
      auto [it, fresh] = seen.emplace(std::move(bits), k);
      if (!fresh && domain[it->second] != domain[k])
        injective.fail(serialize(domain[it->second]) + " and " + serialize(domain[k]) + " share a code");
    }
  }

  CheckResult in_b{"domain-in-B", true, 0, {}, {}};
  for (std::size_t k = 0; k < codes.size(); ++k) {
    ++in_b.cases;
    const auto verdict = check_B_membership(codes[k], s);
    if (!verdict.member)
      in_b.fail(serialize(domain[k]) + " violates condition " + std::to_string(verdict.violations.front().condition));
  }

  // Preimages of basic conditions against the Mod-side conjunction.
  CheckResult pre{"preimage-open", true, 0, {}, {}};
  {
    std::vector<std::size_t> pick;
    bool truncated = false;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
      if (pre.cases >= options.condition_limit) {
        truncated = true;
        return;
      }
      // The condition given by the literals in `pick`, each with both bits.
      const std::size_t k = pick.size();
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
        ++pre.cases;
        Condition g;
        std::vector<Formula> parts;
        for (std::size_t j = 0; j < k; ++j) {
          const bool v = (bits >> j) & 1;
          g.literals.push_back({pick[j], v});
          parts.push_back(v ? s.at(pick[j]) : neg(s.at(pick[j])));
        }
        std::optional<CompiledFormula> conj;
        if (!parts.empty())
          conj.emplace(parts.size() == 1 ? parts.front() : Formula::conjunction(parts), *s.vocabulary());
        for (std::size_t m = 0; m < domain.size(); ++m) {
          const bool in_pre = g.admits(codes[m]);
          const bool in_mod = !conj || conj->evaluate(DefiniteModel(domain[m])) == Truth::True;
          if (in_pre != in_mod) {
            std::string lits;
            for (const auto& [i, v] : g.literals) lits += " " + s.at(i).text() + "=" + (v ? "1" : "0");
            pre.fail("condition" + lits + " disagrees on " + serialize(domain[m]));
          }
        }
      }
      if (k == options.condition_size) return;
      for (std::size_t i = from; i < s.size() && !truncated; ++i) {
        pick.push_back(i);
        rec(i + 1);
        pick.pop_back();
      }
    };
    rec(0);
    pre.note = truncated ? "truncated at " + std::to_string(options.condition_limit) + " conditions" : "complete";
  }

  // Images of basic sets of Mod as conditions on the image of e.
  CheckResult img{"image-open", true, 0, {}, {}};
  {
    std::uint64_t skipped = 0;
    for (const auto& b : basis.sets) {
      const auto i = s.find(b.sentence());
      if (!i) {
        ++skipped;
        continue;
      }
      ++img.cases;
      const CompiledFormula compiled(b.formula, *s.vocabulary());
      std::vector<std::int64_t> env(std::max<std::uint32_t>(compiled.variable_slots(), 1), -1);
      const auto& vars = b.formula.free_variables();
      for (std::size_t m = 0; m < domain.size(); ++m) {
        std::fill(env.begin(), env.end(), -1);
        for (std::size_t j = 0; j < vars.size(); ++j) env[vars[j]] = b.parameters[j];
        const bool in_set = compiled.evaluate(DefiniteModel(domain[m]), env) == Truth::True;
        if (in_set != codes[m].value(*i))
          img.fail("basic set " + b.sentence().text() + " disagrees on " + serialize(domain[m]));
      }
    }
    img.note = "checked " + std::to_string(img.cases) + ", outside S " + std::to_string(skipped) +
               (basis.truncated ? ", basis truncated" : "");
  }

  Report r;
  r.checks = {pre, img, injective, in_b};
  return r;
}

namespace {

std::set<std::vector<std::uint32_t>> encodings(const std::vector<Structure>& ms) {
  std::set<std::vector<std::uint32_t>> out;
  for (const auto& m : ms) out.insert(m.encoding());
  return out;
}

// First structure of `a` whose encoding is missing from `b`.
std::optional<Structure> first_missing(const std::vector<Structure>& a, const std::set<std::vector<std::uint32_t>>& b) {
  for (const auto& m : a)
    if (!b.count(m.encoding())) return m;
  return std::nullopt;
}

struct IntersectionOutcome {
  std::optional<std::string> reduct_mismatch;
  std::optional<std::string> expansion_mismatch;
  std::size_t models = 0;
  std::size_t class_members = 0;
};

IntersectionOutcome compare_models(const ToyAEC& a, const PresentationTheory& t, std::uint32_t n,
                                   const std::vector<std::size_t>* subset) {
  IntersectionOutcome out;
  const auto models = models_of_Tstar(t, n, nullptr, nullptr, subset);
  const auto class_members = members(a, n);
  out.models = models.size();
  out.class_members = class_members.size();

  std::vector<Structure> reducts, expansions;
  for (const auto& m : models) reducts.push_back(m.reduct(t.vocab.tau));
  for (const auto& m : class_members) expansions.push_back(expand(a, t, m));

  const auto member_codes = encodings(class_members), reduct_codes = encodings(reducts);
  if (auto m = first_missing(reducts, member_codes)) out.reduct_mismatch = "reduct outside the class: " + serialize(*m);
  else if (auto m = first_missing(class_members, reduct_codes)) out.reduct_mismatch = "member with no model: " + serialize(*m);

  const auto model_codes = encodings(models), expansion_codes = encodings(expansions);
  if (auto m = first_missing(models, expansion_codes)) out.expansion_mismatch = "model that is no expansion: " + serialize(*m);
  else if (auto m = first_missing(expansions, model_codes)) out.expansion_mismatch = "expansion failing T*: " + serialize(*m);
  return out;
}

}  // namespace

Report class_as_intersection(const ToyAEC& a, const PresentationTheory& t, std::uint32_t n) {
  const auto outcome = compare_models(a, t, n, nullptr);
  CheckResult reducts{"reducts-are-members", true, 1, {}, {}};
  CheckResult models{"models-are-expansions", true, 1, {}, {}};
  if (outcome.reduct_mismatch) reducts.fail(*outcome.reduct_mismatch);
  if (outcome.expansion_mismatch) models.fail(*outcome.expansion_mismatch);
  const auto note = "size " + std::to_string(n) + ": " + std::to_string(outcome.models) + " models, " +
                    std::to_string(outcome.class_members) + " members";
  reducts.note = models.note = note;
  Report r;
  r.checks = {reducts, models};
  return r;
}

Report covering_ablation(const ToyAEC& a, const PresentationTheory& t, std::uint32_t n) {
  CheckResult c{"ablation-detected", false, 0, {}, {}};
  c.counterexample = "no covering axiom deletion admitted a spurious model";
  std::string note;
  // Single deletions first, then the whole schema: with b > n the longest
  // covering axiom subsumes the others on structures of size n.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> trials;
  std::vector<std::size_t> without_schema;
  for (std::size_t j = 0; j < t.axioms.size(); ++j)
    if (t.axioms[j].schema != 3) without_schema.push_back(j);
  for (std::size_t k = 0; k < t.axioms.size(); ++k) {
    if (t.axioms[k].schema != 3) continue;
    std::vector<std::size_t> subset;
    for (std::size_t j = 0; j < t.axioms.size(); ++j)
      if (j != k) subset.push_back(j);
    trials.emplace_back(t.axioms[k].source, std::move(subset));
  }
  trials.emplace_back("whole schema", std::move(without_schema));
  for (const auto& [label, subset] : trials) {
    bool caught = false;
    for (std::uint32_t size = 1; size <= n && !caught; ++size) {
      ++c.cases;
      const auto outcome = compare_models(a, t, size, &subset);
      caught = outcome.reduct_mismatch || outcome.expansion_mismatch;
    }
    note += (note.empty() ? "" : "; ") + label + (caught ? " caught" : " not caught");
    if (caught) {
      c.passed = true;
      c.counterexample.clear();
    }
  }
  c.note = note;
  Report r;
  r.checks = {c};
  return r;
}

}  // namespace aecspace
