#include <doctest.h>

#include "aecspace/aec.hpp"
#include "oracles.hpp"

using namespace aecspace;

namespace {

AecSpec graphs(std::uint32_t cap = 4) {
  AecSpec spec;
  spec.vocab = Vocabulary().add_relation("E", 2);
  spec.params = {{"relation", "E"}};
  spec.block_bound = 2;
  spec.cap = cap;
  return spec;
}

bool loopless_symmetric(const Structure& m) {
  for (std::uint32_t i = 0; i < m.size(); ++i)
    for (std::uint32_t j = 0; j < m.size(); ++j) {
      const bool ij = m.holds(0, std::vector<std::uint32_t>{i, j});
      if (i == j && ij) return false;
      if (ij != m.holds(0, std::vector<std::uint32_t>{j, i})) return false;
    }
  return true;
}

const CheckResult* check_named(const Report& r, const std::string& prefix) {
  for (const auto& c : r.checks)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("loopless symmetric graphs under induced subgraphs validate up to four vertices") {
  const auto report = validate_aec(make_aec(graphs(4)));
  for (const auto& c : report.checks) {
    INFO(c.name << ": " << c.counterexample);
    CHECK(c.passed);
  }
}

TEST_CASE("a strictly-smaller strong relation fails reflexivity") {
  auto spec = graphs(3);
  spec.strong_name = "strictly-smaller";
  const auto report = validate_aec(make_aec(spec));
  CHECK_FALSE(report.passed());
  const auto* reflexivity = check_named(report, "reflexivity");
  REQUIRE(reflexivity != nullptr);
  CHECK_FALSE(reflexivity->passed);
}

TEST_CASE("a class that is not closed under isomorphism is caught") {
  auto a = make_aec(graphs(3));
  // Accepts the edge on {0,1} only in one labelling of a 3-vertex graph.
  a.in_class = [](const Structure& m) {
    if (!loopless_symmetric(m)) return false;
    if (m.size() != 3) return true;
    return !m.holds(0, std::vector<std::uint32_t>{1, 2});
  };
  const auto report = validate_aec(a);
  CHECK_FALSE(report.passed());
  bool iso_failed = false;
  for (const auto& c : report.checks)
    if (c.name.find("iso") != std::string::npos && !c.passed) iso_failed = true;
  CHECK(iso_failed);
}

TEST_CASE("member counts") {
  const auto a = make_aec(graphs(3));
  CHECK(members(a, 1).size() == 1);
  CHECK(members(a, 2).size() == 2);
  CHECK(members(a, 3).size() == 8);
  // Same lists as filtering every binary table by hand.
  for (std::uint32_t n = 1; n <= 3; ++n) {
    std::size_t expected = 0;
    for (const auto& m : oracle::all_structures(a.vocab, n)) expected += loopless_symmetric(m);
    CHECK(members(a, n).size() == expected);
  }
}

TEST_CASE("partial orders") {
  AecSpec spec;
  spec.vocab = Vocabulary().add_relation("L", 2);
  spec.class_name = "partial-orders";
  spec.params = {{"relation", "L"}};
  spec.block_bound = 3;
  spec.cap = 3;
  const auto a = make_aec(spec);
  // Labelled partial orders on 1, 2, 3 points: 1, 3, 19.
  CHECK(members(a, 1).size() == 1);
  CHECK(members(a, 2).size() == 3);
  CHECK(members(a, 3).size() == 19);
  CHECK(validate_aec(a).passed());
}

TEST_CASE("a unary function needs three-element blocks") {
  AecSpec spec;
  spec.vocab = Vocabulary().add_function("s", 1);
  spec.class_name = "all-structures";
  spec.block_bound = 2;
  spec.cap = 3;
  const auto report = validate_aec(make_aec(spec));
  const auto* ls = check_named(report, "lowenheim-skolem");
  REQUIRE(ls != nullptr);
  CHECK_FALSE(ls->passed);

  spec.block_bound = 3;
  CHECK(validate_aec(make_aec(spec)).passed());
}

TEST_CASE("strong subsets and embeddings") {
  const auto a = make_aec(graphs(3));
  Structure path(a.vocab, 3);
  for (auto [i, j] : {std::pair{0u, 1u}, {1u, 0u}, {1u, 2u}, {2u, 1u}}) path.set(0, std::vector<std::uint32_t>{i, j});
  CHECK(a.is_strong_subset(std::vector<std::uint32_t>{0, 1}, path));
  CHECK(a.is_strong_subset(std::vector<std::uint32_t>{0, 2}, path));

  Structure edge(a.vocab, 2);
  edge.set(0, std::vector<std::uint32_t>{0, 1});
  edge.set(0, std::vector<std::uint32_t>{1, 0});
  CHECK(a.is_strong_embedding(edge, {0, 1}, path));
  CHECK(a.is_strong_embedding(edge, {2, 1}, path));
  CHECK_FALSE(a.is_strong_embedding(edge, {0, 2}, path));
}

TEST_CASE("library lookups") {
  auto spec = graphs();
  spec.class_name = "no-such-class";
  CHECK_THROWS_AS(make_aec(spec), Error);
  spec = graphs();
  spec.params = {{"relation", "F"}};
  CHECK_THROWS_AS(make_aec(spec), VocabularyError);
  CHECK(class_library().size() == 3);
}
