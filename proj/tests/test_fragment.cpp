#include <doctest.h>

#include <set>

#include "aecspace/fragment.hpp"
#include "oracles.hpp"

using namespace aecspace;

namespace {

VocabularyPtr graph_vocab() { return share(Vocabulary().add_relation("E", 2)); }

FragmentBudget tiny() {
  FragmentBudget b;
  b.variables = 2;
  b.max_free = 2;
  b.seed_free = 2;
  b.max_depth = 1;
  b.max_width = 2;
  b.max_term_depth = 0;
  b.max_count = 100'000;
  return b;
}

std::set<std::string> texts(const Fragment& f) {
  std::set<std::string> out;
  for (const auto& m : f.members()) out.insert(m.text());
  return out;
}

}  // namespace

TEST_CASE("subformulas of the seed are members") {
  const auto seed = parse_formula("(exists (x1) (rel E x0 x1))");
  const auto f = fragment_closure({seed}, graph_vocab(), tiny());
  CHECK(f.contains(seed));
  CHECK(f.contains(parse_formula("(rel E x0 x1)")));
  CHECK(f.is_seed_derived(seed));
}

TEST_CASE("the empty seed yields every atom over the variables") {
  const auto f = fragment_closure({}, graph_vocab(), tiny());
  // Atoms listed by hand from the terms x0, x1.
  std::set<std::string> atoms;
  for (const char* a : {"x0", "x1"})
    for (const char* b : {"x0", "x1"}) atoms.insert(std::string("(rel E ") + a + " " + b + ")");
  for (const auto& m : f.members())
    if (m.kind() == FormulaKind::Relation) CHECK(atoms.count(m.text()) == 1);
  for (const auto& a : atoms) CHECK(f.contains(parse_formula(a)));
  CHECK(f.contains(parse_formula("(= x0 x1)")));

  SUBCASE("with a constant and a unary function") {
    auto b = tiny();
    b.max_term_depth = 1;
    const auto v = share(Vocabulary().add_relation("P", 1).add_function("s", 1).add_constant("k"));
    const auto g = fragment_closure({}, v, b);
    for (const char* t : {"x0", "x1", "k", "(fn s x0)", "(fn s x1)", "(fn s k)"})
      CHECK(g.contains(parse_formula(std::string("(rel P ") + t + ")")));
    CHECK_FALSE(g.contains(parse_formula("(rel P (fn s (fn s x0)))")));
  }
}

TEST_CASE("members respect the budget and the closure rules") {
  const auto seed = parse_formula("(forall (x0) (exists (x1) (and (rel E x0 x1) (not (= x0 x1)))))");
  const auto f = fragment_closure({seed}, graph_vocab(), tiny());
  for (const auto& m : f.members()) {
    CHECK(m.max_variable() <= 2);
    CHECK(m.free_variables().size() <= 2);
    if (!f.is_seed_derived(m)) {
      CHECK(fits_constructed(m, f.budget()));
      // Negations of constructed members stay inside while they fit.
      const auto neg = Formula::negation(m);
      if (fits_constructed(neg, f.budget())) CHECK(f.contains(neg));
    }
    for (const auto& s : subformulas(m)) CHECK(f.contains(s));
  }
  CHECK(audit_fragment(f).passed());
}

TEST_CASE("closure is idempotent") {
  const auto seed = parse_formula("(exists (x1) (and (rel E x0 x1) (rel E x1 x0)))");
  const auto f = fragment_closure({seed}, graph_vocab(), tiny());
  const auto again = fragment_closure(f.members(), f.vocabulary(), f.budget());
  CHECK(texts(again) == texts(f));
}

TEST_CASE("members come sorted by height then text") {
  const auto f = fragment_closure({}, graph_vocab(), tiny());
  for (std::size_t i = 1; i < f.size(); ++i) {
    const auto& a = f.members()[i - 1];
    const auto& b = f.members()[i];
    CHECK((a.height() < b.height() || (a.height() == b.height() && a.text() < b.text())));
  }
}

TEST_CASE("budget and seed errors") {
  auto b = tiny();
  b.max_count = 10;
  CHECK_THROWS_AS(fragment_closure({}, graph_vocab(), b), BudgetExceeded);
  CHECK_THROWS_AS(fragment_closure({parse_formula("(rel E x0 x5)")}, graph_vocab(), tiny()), Error);
  CHECK_THROWS_AS(fragment_closure({parse_formula("(rel F x0 x1)")}, graph_vocab(), tiny()), Error);
}

TEST_CASE("every audit rule has cases") {
  const auto f = fragment_closure({parse_formula("(exists (x1) (rel E x0 x1))")}, graph_vocab(), tiny());
  const auto report = audit_fragment(f);
  CHECK(report.checks.size() == 7);
  for (const auto& c : report.checks) {
    CHECK(c.passed);
    CHECK(c.cases > 0);
  }
}
