#pragma once

// A totally ordered Abelian group of finite degree, the first-difference
// metric it induces on finite sequences, and the balls and Cauchy families of
// that metric.
//
// G is Z^δ ordered lexicographically with index 0 most significant. The
// positive units r_α = e_α decrease strictly and are coinitial in G⁺ up to
// the degree.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aecspace/report.hpp"

namespace aecspace {

class GroupElement {
 public:
  explicit GroupElement(std::uint32_t degree) : entries_(degree, 0) {}
  GroupElement(std::uint32_t degree, const std::vector<std::pair<std::uint32_t, std::int64_t>>& support);

  static GroupElement zero(std::uint32_t degree) { return GroupElement(degree); }
  /// r_α = e_α; throws Error when α is not below the degree.
  static GroupElement unit(std::uint32_t degree, std::uint32_t alpha);

  std::uint32_t degree() const { return static_cast<std::uint32_t>(entries_.size()); }
  std::int64_t operator[](std::uint32_t i) const { return entries_.at(i); }
  bool is_zero() const;
  bool is_positive() const;
  /// Index of the most significant nonzero entry.
  std::optional<std::uint32_t> leading_index() const;

  GroupElement operator+(const GroupElement& other) const;
  GroupElement operator-(const GroupElement& other) const;
  GroupElement operator-() const;
  /// Throws Error on a degree mismatch.
  std::strong_ordering operator<=>(const GroupElement& other) const;
  bool operator==(const GroupElement& other) const;

  /// Sparse `index:value` list, e.g. "0:1,2:-3"; "0" for the neutral element.
  std::string text() const;

 private:
  void require_same_degree(const GroupElement& other) const;
  std::vector<std::int64_t> entries_;
};

/// r_α of the coinitial sequence.
GroupElement coinitial(std::uint32_t degree, std::uint32_t alpha);

using Sequence = std::vector<std::uint32_t>;

/// Digit string, e.g. "010".
std::string sequence_text(const Sequence& x);

/// 0_G when x = y, otherwise r_α at the first disagreement α. Throws Error on
/// a length mismatch or a length above the degree.
GroupElement first_difference_metric(const Sequence& x, const Sequence& y, std::uint32_t degree);

/// The ball B(x, ε) written as a cylinder: every y of x's length extending
/// `prefix`. An empty prefix is the whole space.
struct BallDescriptor {
  Sequence prefix;
  bool contains(const Sequence& y) const;
  std::string text() const;  // "all" or "cylinder <prefix>"
};

/// Throws Error unless ε is positive and x fits the degree.
BallDescriptor ball(const Sequence& x, const GroupElement& epsilon);

/// A family indexed by ω given by a finite head and a repeating cycle.
struct SequenceFamily {
  std::vector<Sequence> head;
  std::vector<Sequence> cycle;  // non-empty

  const Sequence& at(std::uint64_t beta) const;
};

struct CauchyVerdict {
  bool is_cauchy = false;
  std::optional<Sequence> limit;
  /// For each α below the degree, the least index after which every pair is
  /// closer than r_α, when one exists.
  std::vector<std::optional<std::uint64_t>> thresholds;
};

/// Decides the Cauchy condition for every ε = r_α and computes the limit by
/// coordinatewise stabilization. Throws Error on an empty cycle or on points
/// of differing lengths.
CauchyVerdict cauchy_and_limit(const SequenceFamily& family, std::uint32_t degree);

/// Metric axioms, the ultrametric bound and ball = cylinder over every
/// sequence of each length 1..max_length over the alphabet. Check names:
/// identity, symmetry, triangle, ultrametric, ball-cylinder.
Report verify_metric(std::uint32_t alphabet, std::uint32_t max_length, std::uint32_t degree);

/// Group laws and order laws over elements supported in {0..support-1} with
/// entries in [-bound, bound]. Check names: associativity, commutativity,
/// neutral, inverses, total-order, translation-invariance, units-decreasing,
/// coinitiality.
Report verify_group(std::uint32_t degree, std::uint32_t support, std::int64_t bound);

/// The three Cauchy demonstrations: eventually constant, alternating, and
/// converging to a target one coordinate at a time. Check names:
/// cauchy-constant, cauchy-alternating, cauchy-converging.
Report cauchy_demos(std::uint32_t alphabet, std::uint32_t length, std::uint32_t degree);

}  // namespace aecspace
