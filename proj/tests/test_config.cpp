#include <doctest.h>

#include <algorithm>

#include "aecspace/config.hpp"

using namespace aecspace;

namespace {

// Names every key of a failed parse, or "" when it parses.
std::vector<std::string> rejected_keys(const char* text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.keys();
  }
  return {};
}

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* graphs = R"(name: graphs
aec:
  vocabulary:
    relations: {E: 2}
  class: loopless-symmetric-graphs
  params: {relation: E}
  b: 2
  cap: 3
budgets:
  search_cap: 2
  fragment: {max_free: 1}
)";

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config_text("name: minimal\n");
  CHECK(c.name == "minimal");
  CHECK(c.aec.block_bound == 2);
  CHECK(c.aec.cap == 4);
  CHECK(c.command == "all");
  CHECK(c.format == "both");
  CHECK(c.tuple_budget() == 2);
  CHECK(c.budgets.sentence_count == 4096);
  CHECK(c.aec.vocab.find_relation("E").has_value());
}

TEST_CASE("a full config") {
  const auto c = parse_config_text(graphs);
  CHECK(c.aec.params.at("relation") == "E");
  CHECK(c.aec.cap == 3);
  CHECK(c.budgets.search_cap == 2);
  CHECK(c.budgets.fragment.max_free == 1);
  // Untouched fragment fields follow the block bound.
  CHECK(c.budgets.fragment.variables == FragmentBudget::for_block_bound(2).variables);
}

TEST_CASE("semantic errors name their keys") {
  CHECK(rejected_keys("aec:\n  b: 0\n") == std::vector<std::string>{"aec.b"});
  const auto unknown = rejected_keys("kappa_plus: 3\n");
  REQUIRE(unknown.size() == 1);
  CHECK(unknown[0].find("kappa_plus") != std::string::npos);
  const auto nested = rejected_keys("budgets:\n  fragment: {depth: 2}\n  speed: 9\n");
  CHECK(nested.size() == 2);
  CHECK(std::any_of(nested.begin(), nested.end(), [](const auto& k) { return k.find("speed") != std::string::npos; }));
  CHECK_FALSE(rejected_keys("budgets:\n  universe: -1\n").empty());
  CHECK_FALSE(rejected_keys("budgets:\n  universe: lots\n").empty());
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_config_text("name: x\naec:\n  b: [2\n");
    FAIL("parsed");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 3);
    CHECK(e.column() >= 1);
  }
}

TEST_CASE("command-line overrides") {
  auto c = parse_config_text(graphs);
  apply_budget_override(c, "sentence-count", "99");
  CHECK(c.budgets.sentence_count == 99);
  apply_budget_override(c, "fragment-max-width", "3");
  CHECK(c.budgets.fragment.max_width == 3);
  CHECK_THROWS_AS(apply_budget_override(c, "no-such-budget", "1"), ConfigError);
  CHECK_THROWS_AS(apply_budget_override(c, "universe", "0"), ConfigError);
  for (const auto& name : budget_names()) CHECK(name.find('_') == std::string::npos);
}

TEST_CASE("hash") {
  const auto a = parse_config_text(graphs);
  CHECK(config_hash(a) == fnv1a(canonical_text(a)));
  CHECK(config_hash(a) == config_hash(parse_config_text(graphs)));
  auto b = a;
  apply_budget_override(b, "samples", "65");
  CHECK(config_hash(a) != config_hash(b));
  // Output settings do not change results, so they stay out of the hash.
  auto c = a;
  c.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(c));
}
