#include <doctest.h>

#include <algorithm>
#include <random>

#include "aecspace/error.hpp"
#include "aecspace/gmetric.hpp"

using namespace aecspace;

namespace {

GroupElement g(std::uint32_t degree, std::vector<std::int64_t> entries) {
  std::vector<std::pair<std::uint32_t, std::int64_t>> support;
  for (std::uint32_t i = 0; i < entries.size(); ++i)
    if (entries[i] != 0) support.emplace_back(i, entries[i]);
  return GroupElement(degree, support);
}

// Lexicographic sign with index 0 most significant, written out directly.
int sign(const std::vector<std::int64_t>& e) {
  for (auto v : e)
    if (v != 0) return v > 0 ? 1 : -1;
  return 0;
}

std::vector<Sequence> all_sequences(std::uint32_t alphabet, std::uint32_t length) {
  std::vector<Sequence> out;
  Sequence s(length, 0);
  while (true) {
    out.push_back(s);
    std::size_t i = length;
    while (i > 0 && ++s[i - 1] == alphabet) s[--i] = 0;
    if (i == 0) return out;
  }
}

}  // namespace

TEST_CASE("group arithmetic") {
  const auto a = g(3, {1, -2, 5});
  CHECK((a + (-a)).is_zero());
  CHECK(a - a == GroupElement::zero(3));
  CHECK((a + g(3, {0, 2, 0})) == g(3, {1, 0, 5}));
  CHECK(a.text() == "0:1,1:-2,2:5");
  CHECK(GroupElement::zero(3).text() == "0");
  CHECK(a.leading_index() == 0u);
  CHECK_FALSE(GroupElement::zero(3).leading_index().has_value());
}

TEST_CASE("order agrees with the lexicographic sign") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> entry(-2, 2);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::int64_t> x(4), y(4), z(4);
    for (int i = 0; i < 4; ++i) x[i] = entry(rng), y[i] = entry(rng), z[i] = entry(rng);
    std::vector<std::int64_t> diff(4);
    for (int i = 0; i < 4; ++i) diff[i] = x[i] - y[i];
    const auto gx = g(4, x), gy = g(4, y), gz = g(4, z);
    CHECK((gx < gy) == (sign(diff) < 0));
    CHECK((gx == gy) == (sign(diff) == 0));
    CHECK(gx.is_positive() == (sign(x) > 0));
    // Translation invariance.
    CHECK((gx < gy) == (gx + gz < gy + gz));
  }
}

TEST_CASE("units decrease and stay positive") {
  for (std::uint32_t alpha = 0; alpha < 4; ++alpha) {
    const auto r = GroupElement::unit(4, alpha);
    CHECK(r.is_positive());
    CHECK(r == coinitial(4, alpha));
    if (alpha + 1 < 4) CHECK(GroupElement::unit(4, alpha + 1) < r);
  }
  // r_2 sits below any positive element led by index 1.
  CHECK(GroupElement::unit(4, 2) < g(4, {0, 1, -100, -100}));
  CHECK(GroupElement::unit(4, 2) < GroupElement::unit(4, 1));
  CHECK_THROWS_AS(GroupElement::unit(4, 4), Error);
}

TEST_CASE("degree mismatch") {
  CHECK_THROWS_AS((void)(GroupElement::zero(2) < GroupElement::zero(3)), Error);
  CHECK_THROWS_AS(GroupElement::zero(2) + GroupElement::zero(3), Error);
  CHECK_THROWS_AS(first_difference_metric({0, 1}, {0, 1, 0}, 4), Error);
  CHECK_THROWS_AS(first_difference_metric({0, 1, 0}, {0, 1, 0}, 2), Error);
}

TEST_CASE("first-difference metric") {
  CHECK(first_difference_metric({0, 1, 0}, {0, 1, 0}, 3).is_zero());
  CHECK(first_difference_metric({0, 1, 0}, {0, 2, 0}, 3) == GroupElement::unit(3, 1));
  CHECK(first_difference_metric({1, 1, 0}, {0, 2, 0}, 3) == GroupElement::unit(3, 0));

  // Ultrametric inequality on every triple of ternary strings of length 3.
  const auto points = all_sequences(3, 3);
  for (const auto& x : points)
    for (const auto& y : points)
      for (const auto& z : points) {
        const auto xz = first_difference_metric(x, z, 3);
        const auto m = std::max(first_difference_metric(x, y, 3), first_difference_metric(y, z, 3));
        CHECK(xz <= m);
      }
}

TEST_CASE("balls are cylinders") {
  CHECK(ball({0, 1, 0}, GroupElement::unit(3, 0)).text() == "cylinder 0");
  CHECK(ball({0, 1, 0}, g(3, {1, 0, 0})).prefix == Sequence{0});
  CHECK(ball({0, 1, 0}, g(3, {2, 0, 0})).text() == "all");
  CHECK_THROWS_AS(ball({0, 1, 0}, GroupElement::zero(3)), Error);
  CHECK_THROWS_AS(ball({0, 1, 0}, -GroupElement::unit(3, 0)), Error);

  // The descriptor matches filtering by distance, for a spread of radii.
  const auto points = all_sequences(2, 3);
  const std::vector<GroupElement> radii = {GroupElement::unit(3, 0), GroupElement::unit(3, 1), GroupElement::unit(3, 2),
                                           g(3, {0, 1, -4}), g(3, {0, 0, 7}), g(3, {3, -1, 0})};
  for (const auto& x : points)
    for (const auto& eps : radii) {
      const auto b = ball(x, eps);
      for (const auto& y : points) CHECK(b.contains(y) == (first_difference_metric(x, y, 3) < eps));
    }
}

TEST_CASE("Cauchy families") {
  SUBCASE("eventually constant") {
    const SequenceFamily f{{{1, 1, 1}, {0, 0, 0}}, {{0, 1, 0}}};
    const auto v = cauchy_and_limit(f, 3);
    CHECK(v.is_cauchy);
    CHECK(v.limit == Sequence{0, 1, 0});
    // 000 and 010 already agree in the first place.
    CHECK(v.thresholds == std::vector<std::optional<std::uint64_t>>{1u, 2u, 2u});
  }
  SUBCASE("alternating in the last place") {
    const SequenceFamily f{{}, {{0, 0, 0}, {0, 0, 1}}};
    const auto v = cauchy_and_limit(f, 3);
    CHECK_FALSE(v.is_cauchy);
    CHECK_FALSE(v.limit.has_value());
    CHECK(v.thresholds[0] == 0u);
    CHECK(v.thresholds[1] == 0u);
    CHECK_FALSE(v.thresholds[2].has_value());
  }
  SUBCASE("indexing") {
    const SequenceFamily f{{{1}}, {{2}, {3}}};
    CHECK(f.at(0) == Sequence{1});
    CHECK(f.at(1) == Sequence{2});
    CHECK(f.at(4) == Sequence{3});
  }
  CHECK_THROWS_AS(cauchy_and_limit(SequenceFamily{{{0}}, {}}, 1), Error);
  CHECK_THROWS_AS(cauchy_and_limit(SequenceFamily{{{0}}, {{0, 1}}}, 2), Error);
}

TEST_CASE("library sweeps") {
  CHECK(verify_metric(2, 3, 3).passed());
  CHECK(verify_group(3, 3, 1).passed());
  const auto demos = cauchy_demos(2, 3, 3);
  CHECK(demos.passed());
  for (const char* name : {"cauchy-constant", "cauchy-alternating", "cauchy-converging"})
    CHECK(demos.find(name) != nullptr);
}
