#include <doctest.h>

#include <deque>
#include <random>
#include <set>

#include "aecspace/aec.hpp"
#include "aecspace/fragment.hpp"
#include "aecspace/logicspace.hpp"
#include "aecspace/presentation.hpp"
#include "oracles.hpp"

using namespace aecspace;

namespace {

VocabularyPtr graph_vocab() { return share(Vocabulary().add_relation("E", 2)); }

ToyAEC graph_aec() {
  AecSpec spec;
  spec.vocab = Vocabulary().add_relation("E", 2);
  spec.params = {{"relation", "E"}};
  spec.cap = 3;
  return make_aec(spec);
}

FragmentBudget lean() {
  auto b = FragmentBudget::for_block_bound(2);
  b.max_free = 1;
  b.max_width = 1;
  b.max_term_depth = 0;
  b.seed_substitution = false;
  return b;
}

// Graph presentation and a lean fragment over it, built once.
struct Fixture {
  ToyAEC aec = graph_aec();
  PresentationTheory theory = build_presentation(aec, 2);
  Fragment fragment = fragment_closure(theory.formulas(), theory.vocab.tau_star, lean());

  static const Fixture& get() {
    static const Fixture f;
    return f;
  }
  std::vector<Structure> expansions(std::uint32_t n) const {
    std::vector<Structure> out;
    for (const auto& m : members(aec, n)) out.push_back(expand(aec, theory, m));
    return out;
  }
};

Formula f(const char* text) { return parse_formula(text); }

Formula negation_of(const Formula& g) { return g.kind() == FormulaKind::Not ? g.child() : Formula::negation(g); }

// Sentence set by generate-and-dedupe: the atoms by hand, then every seed
// sentence and every grounded member with its parts, instances and negations.
std::set<std::string> recount(const Fragment& fr, std::uint32_t n) {
  std::set<std::string> out;
  std::deque<Formula> work;
  auto add = [&](const Formula& g) {
    if (out.insert(g.text()).second) work.push_back(g);
  };
  auto el = [](std::uint32_t i) { return Term::element(i); };
  for (const auto& r : fr.vocabulary()->relations()) {
    std::vector<std::uint32_t> t(r.arity, 0);
    while (true) {
      std::vector<Term> args;
      for (auto v : t) args.push_back(el(v));
      const auto atom = Formula::relation(r.name, args);
      out.insert(atom.text());
      out.insert(Formula::negation(atom).text());
      std::size_t i = 0;
      while (i < t.size() && ++t[i] == n) t[i++] = 0;
      if (i == t.size()) break;
    }
  }
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) {
      out.insert(Formula::equals(el(i), el(j)).text());
      out.insert(Formula::negation(Formula::equals(el(i), el(j))).text());
    }

  auto groundings = [&](const Formula& g, const std::vector<std::uint32_t>& vars) {
    std::vector<Formula> res;
    std::vector<std::uint32_t> values(vars.size(), 0);
    while (true) {
      Assignment a;
      for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = values[i];
      res.push_back(ground(g, a));
      std::size_t i = 0;
      while (i < values.size() && ++values[i] == n) values[i++] = 0;
      if (i == values.size()) return res;
    }
  };
  for (const auto& s : fr.seed())
    if (s.is_sentence()) add(s);
  for (const auto& m : fr.members())
    for (const auto& g : groundings(m, m.free_variables())) add(g);
  while (!work.empty()) {
    const auto g = work.front();
    work.pop_front();
    add(negation_of(g));
    if (g.kind() == FormulaKind::Not || g.kind() == FormulaKind::And || g.kind() == FormulaKind::Or)
      for (const auto& c : g.children()) add(c);
    if (g.kind() == FormulaKind::Exists || g.kind() == FormulaKind::Forall)
      for (const auto& i : groundings(g.child(), g.bound_variables())) add(i);
  }
  return out;
}

}  // namespace

TEST_CASE("sentence index") {
  const auto& fx = Fixture::get();
  const auto s = SentenceIndex::build(fx.fragment, 1, 100'000);
  REQUIRE_FALSE(s.truncated());

  SUBCASE("same set as generate and dedupe") {
    std::set<std::string> listed;
    for (const auto& g : s.sentences()) listed.insert(g.text());
    CHECK(listed.size() == s.size());
    CHECK(listed == recount(fx.fragment, 1));
  }
  SUBCASE("negations are listed") {
    for (const auto& g : s.sentences()) CHECK(s.find(negation_of(g)).has_value());
    CHECK(s.negations().size() * 2 >= s.size());
  }
  SUBCASE("atomic layer first") {
    const auto atoms = atomic_sentences(*fx.theory.vocab.tau_star, 1);
    CHECK(s.atomic_count() == 2 * atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) CHECK(s.at(2 * i) == atoms[i]);
  }
  SUBCASE("two elements") {
    const auto s2 = SentenceIndex::build(fx.fragment, 2, 4096);
    CHECK(s2.find(f("(rel E c0 c1)")).has_value());
    CHECK(s2.size() <= 4096);
  }
  SUBCASE("budget below the atomic layer") {
    CHECK_THROWS_AS(SentenceIndex::build(fx.fragment, 2, 10), BudgetExceeded);
  }
  SUBCASE("truncation keeps whole closures") {
    const auto small = SentenceIndex::build(fx.fragment, 1, s.atomic_count() + 40);
    CHECK(small.truncated());
    for (const auto& g : small.sentences()) CHECK(small.find(negation_of(g)).has_value());
  }
}

TEST_CASE("encode on the single-edge expansion") {
  const auto& fx = Fixture::get();
  const auto s = SentenceIndex::build(fx.fragment, 2, 4096);
  Structure edge(fx.aec.vocab, 2);
  edge.set(0, std::vector<std::uint32_t>{0, 1});
  edge.set(0, std::vector<std::uint32_t>{1, 0});
  const auto m = expand(fx.aec, fx.theory, edge);
  const auto t = encode(m, s);
  CHECK(t.is_total());
  CHECK(t.value(*s.find(f("(rel E c0 c1)"))));
  CHECK_FALSE(t.value(*s.find(f("(rel E c0 c0)"))));
  // Every coordinate agrees with the recursive evaluator.
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(t.value(i) == oracle::holds(m, s.at(i)));
  CHECK(parse_theory_function(serialize(t, s), s) == t);
  CHECK(decode(t, s) == m);

  CHECK_THROWS_AS(encode(Structure(fx.aec.vocab, 2), s), Error);
}

TEST_CASE("round trip and injectivity on base vocabularies") {
  for (const auto& v : {graph_vocab(), share(Vocabulary().add_function("s", 1)),
                        share(Vocabulary().add_relation("P", 1).add_constant("k"))})
    for (std::uint32_t n = 1; n <= 2; ++n) {
      const auto s = SentenceIndex::atomic(v, n);
      std::set<std::string> images;
      const auto all = oracle::all_structures(v, n);
      for (const auto& m : all) {
        CHECK(decode(encode(m, s), s) == m);
        images.insert(serialize(encode(m, s), s));
      }
      CHECK(images.size() == all.size());
      CHECK(atomic_determination(s).passed);
    }
}

TEST_CASE("decoding a unary function") {
  const auto v = share(Vocabulary().add_function("s", 1));
  const auto s = SentenceIndex::atomic(v, 2);
  auto set = [&](TheoryFunction& t, const char* text, bool value) {
    const auto i = *s.find(f(text));
    t.set(i, value);
    t.set(*s.find(negation_of(f(text))), !value);
  };
  TheoryFunction t(s.size());
  set(t, "(= (fn s c0) c0)", false);
  set(t, "(= (fn s c0) c1)", true);
  set(t, "(= (fn s c1) c0)", true);
  set(t, "(= (fn s c1) c1)", false);
  set(t, "(= c0 c1)", false);
  const auto m = decode(t, s);
  CHECK(m.apply(0, std::vector<std::uint32_t>{0}) == 1);
  CHECK(m.apply(0, std::vector<std::uint32_t>{1}) == 0);

  auto twice = t;
  set(twice, "(= (fn s c0) c0)", true);
  try {
    decode(twice, s);
    FAIL("accepted two values");
  } catch (const DecodeError& e) {
    CHECK(e.kind() == DecodeError::Kind::MultipleWitnesses);
  }
  auto none = t;
  set(none, "(= (fn s c0) c1)", false);
  try {
    decode(none, s);
    FAIL("accepted no value");
  } catch (const DecodeError& e) {
    CHECK(e.kind() == DecodeError::Kind::NoWitness);
  }

  const auto partial = SentenceIndex::from_list(v, 2, {f("(= (fn s c0) c0)"), f("(= (fn s c0) c1)")});
  TheoryFunction p(partial.size());
  p.set(0, true);
  p.set(1, false);
  try {
    decode(p, partial);
    FAIL("decoded without the sentences for s(1)");
  } catch (const DecodeError& e) {
    CHECK(e.kind() == DecodeError::Kind::MissingSentence);
  }
}

TEST_CASE("conditions of B") {
  const auto& fx = Fixture::get();
  const auto s = SentenceIndex::build(fx.fragment, 2, 4096);
  for (const auto& m : fx.expansions(2)) CHECK(check_B_membership(encode(m, s), s).member);

  const auto t = encode(fx.expansions(2).front(), s);
  const auto [p, q] = s.negations().front();
  auto both = t;
  both.set(p, true);
  both.set(q, true);
  CHECK(check_B_membership(both, s).violates(2));

  const auto w = corrupt_missing_witness(t, s);
  REQUIRE(w.has_value());
  CHECK(check_B_membership(*w, s).violates(4));
  const auto i = corrupt_inconsistent_subset(t, s);
  REQUIRE(i.has_value());
  const auto verdict = check_B_membership(*i, s);
  CHECK(verdict.violations.size() == 1);
  CHECK(verdict.violates(1));
}

TEST_CASE("a missing Henkin witness") {
  const auto list = SentenceIndex::from_list(
      graph_vocab(), 2,
      {f("(exists (x1) (rel E c0 x1))"), f("(rel E c0 c0)"), f("(rel E c0 c1)"), f("(not (exists (x1) (rel E c0 x1)))"),
       f("(not (rel E c0 c0))"), f("(not (rel E c0 c1))")});
  TheoryFunction t(list.size());
  for (std::size_t i = 0; i < 3; ++i) t.set(i, i == 0);
  for (std::size_t i = 3; i < 6; ++i) t.set(i, i != 3);
  const auto verdict = check_B_membership(t, list);
  CHECK_FALSE(verdict.member);
  CHECK(verdict.violates(4));
  CHECK(verdict.violates(1));  // the three true sentences have no model
  CHECK_FALSE(is_consistent(list, {0, 4, 5}));
  CHECK(is_consistent(list, {0, 2}));
}

TEST_CASE("witness families") {
  const auto list = SentenceIndex::from_list(
      graph_vocab(), 2,
      {f("(exists (x1) (rel E c0 x1))"), f("(rel E c0 c0)"), f("(rel E c0 c1)"), f("(not (exists (x1) (rel E c0 x1)))"),
       f("(not (rel E c0 c0))"), f("(not (rel E c0 c1))"), f("(or (rel E c0 c0) (rel E c1 c1))"),
       f("(rel E c1 c1)"), f("(not (rel E c1 c1))"), f("(not (or (rel E c0 c0) (rel E c1 c1)))")});
  const auto w = gdelta_witnesses(list, {3, 2'000'000});

  SUBCASE("family 2 reads two coordinates per set") {
    for (const auto& fam : w.families)
      if (fam.condition == "2")
        for (const auto& set : fam.members) CHECK(set.support().size() == 2);
  }
  SUBCASE("sets are open: coordinates outside the support do not matter") {
    std::mt19937_64 rng(7);
    for (const auto& fam : w.families)
      for (const auto& set : fam.members) {
        const auto support = set.support();
        for (int trial = 0; trial < 20; ++trial) {
          TheoryFunction a(list.size()), b(list.size());
          for (std::size_t i = 0; i < list.size(); ++i) {
            const bool bit = rng() & 1u;
            a.set(i, bit);
            const bool inside = std::find(support.begin(), support.end(), i) != support.end();
            b.set(i, inside ? bit : static_cast<bool>(rng() & 1u));
          }
          CHECK(set.contains(a) == set.contains(b));
        }
      }
  }
  SUBCASE("the intersection is B") {
    const oracle::DirectB direct(list.sentences(), oracle::all_structures(graph_vocab(), 2), 3);
    std::size_t members = 0;
    for (std::uint32_t mask = 0; mask < (1u << list.size()); ++mask) {
      TheoryFunction t(list.size());
      for (std::size_t i = 0; i < list.size(); ++i) t.set(i, mask >> i & 1u);
      const bool expected = direct.member(mask);
      members += expected;
      CHECK(w.contains(t) == expected);
      CHECK(check_B_membership(t, list, {3, 2'000'000}).member == expected);
    }
    CHECK(members > 0);
    CHECK(gdelta_equivalence(list, {3, 2'000'000}).passed());
  }
  SUBCASE("export lists every family") {
    const auto text = export_witnesses(w, list);
    for (const char* c : {"family 1 ", "family 2 ", "family 3a ", "family 4a "}) CHECK(text.find(c) != std::string::npos);
  }
}

TEST_CASE("truncated index") {
  const auto& fx = Fixture::get();
  const auto s = SentenceIndex::build(fx.fragment, 2, 4096);
  const auto small = truncated_index(s, 12);
  CHECK(small.size() <= 12);
  CHECK_FALSE(small.existentials().empty());
  for (const auto& g : small.sentences()) CHECK(small.find(negation_of(g)).has_value());
}

TEST_CASE("basis") {
  SUBCASE("quantifier-free sets over graphs") {
    const auto b = basis(BasisMode::QuantifierFree, graph_vocab(), 2);
    bool found = false;
    for (const auto& set : b.sets)
      if (set.formula == f("(rel E x0 x1)") && set.parameters == Tuple{0, 1}) found = true;
    CHECK(found);
    // Each formula contributes one set per parameter tuple.
    std::map<std::string, std::set<Tuple>> by_formula;
    for (const auto& set : b.sets) {
      CHECK(set.parameters.size() == set.formula.free_variables().size());
      by_formula[set.formula.text()].insert(set.parameters);
    }
    CHECK(by_formula.size() == b.formulas);
    std::size_t expected = 0;
    for (const auto& [text, params] : by_formula) {
      const auto k = f(text.c_str()).free_variables().size();
      CHECK(params.size() == saturating_pow(2, k));
      expected += saturating_pow(2, k);
    }
    CHECK(b.sets.size() == expected);
    for (const auto& set : b.sets) {
      const auto k = set.formula.kind();
      const bool qf = k != FormulaKind::Exists && k != FormulaKind::Forall;
      CHECK(qf);
    }
  }
  SUBCASE("fragment sets include every axiom") {
    const auto& fx = Fixture::get();
    BasisOptions options;
    options.max_sets = 2'000'000;
    const auto b = basis(BasisMode::Fragment, fx.theory.vocab.tau_star, 1, options, &fx.fragment);
    std::set<std::string> sentences;
    for (const auto& set : b.sets)
      if (set.parameters.empty()) sentences.insert(set.formula.text());
    for (const auto& ax : fx.theory.axioms) CHECK(sentences.count(ax.formula.text()) == 1);
  }
  SUBCASE("membership is satisfaction") {
    const auto b = basis(BasisMode::FirstOrder, graph_vocab(), 2);
    for (const auto& m : oracle::all_structures(graph_vocab(), 2))
      for (std::size_t i = 0; i < b.sets.size(); i += 7) {
        const auto& set = b.sets[i];
        oracle::Env env;
        const auto& vars = set.formula.free_variables();
        for (std::size_t k = 0; k < vars.size(); ++k) env[vars[k]] = set.parameters[k];
        CHECK(set.contains(m) == oracle::holds(m, set.formula, env));
        CHECK(set.contains(m) == oracle::holds(m, set.sentence()));
      }
  }
}

TEST_CASE("preimages and images, extensionally") {
  const auto s = SentenceIndex::atomic(graph_vocab(), 2);
  const auto all = oracle::all_structures(graph_vocab(), 2);
  const auto e01 = *s.find(f("(rel E c0 c1)"));
  const auto not00 = *s.find(f("(not (rel E c0 c0))"));
  for (const auto& m : all) {
    const auto t = encode(m, s);
    CHECK(t.value(e01) == m.holds(0, std::vector<std::uint32_t>{0, 1}));
    CHECK(Condition{}.admits(t));
    CHECK((Condition{{{e01, true}}}.admits(t)) == oracle::holds(m, f("(rel E c0 c1)")));
    CHECK(t.value(not00) == oracle::holds(m, f("(not (rel E c0 c0))")));
  }
}

TEST_CASE("continuity check") {
  const auto all = oracle::all_structures(graph_vocab(), 2);
  for (auto mode : {BasisMode::QuantifierFree, BasisMode::FirstOrder}) {
    const auto b = basis(mode, graph_vocab(), 2);
    const auto s = SentenceIndex::atomic(graph_vocab(), 2);
    const auto report = continuity_check(s, all, b);
    for (const auto& c : report.checks) {
      INFO(to_string(mode) << " " << c.name << ": " << c.counterexample);
      CHECK(c.passed);
    }
  }
  SUBCASE("an index too small to separate structures") {
    const auto thin = SentenceIndex::from_list(graph_vocab(), 2, {f("(rel E c0 c1)"), f("(not (rel E c0 c1))")});
    const auto report = continuity_check(thin, all, basis(BasisMode::QuantifierFree, graph_vocab(), 2));
    CHECK_FALSE(report.find("injective")->passed);
    CHECK_FALSE(atomic_determination(thin).passed);
  }
}

TEST_CASE("class as an intersection") {
  const auto& fx = Fixture::get();
  for (std::uint32_t n = 1; n <= 2; ++n) CHECK(class_as_intersection(fx.aec, fx.theory, n).passed());
  const auto ablation = covering_ablation(fx.aec, fx.theory, 2);
  CHECK(ablation.passed());
  CHECK(ablation.checks.front().note.find("length-2 caught") != std::string::npos);
}

TEST_CASE("basis mode names") {
  for (auto mode : {BasisMode::QuantifierFree, BasisMode::FirstOrder, BasisMode::Fragment})
    CHECK(parse_basis_mode(to_string(mode)) == mode);
  CHECK_THROWS_AS(parse_basis_mode("sideways"), Error);
}
