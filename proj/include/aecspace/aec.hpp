#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "aecspace/report.hpp"
#include "aecspace/structures.hpp"

namespace aecspace {

using ClassPredicate = std::function<bool(const Structure&)>;
/// Decides whether the substructure of N on `subset` (sorted, closed, inducing
/// a class member) is strong in N.
using StrongPredicate = std::function<bool(std::span<const std::uint32_t> subset, const Structure& n)>;

/// A finite class K with strong-substructure relation, block bound b and
/// universe cap. Blocks are the members of size 1..b.
struct ToyAEC {
  VocabularyPtr vocab;
  std::string class_name;
  ClassPredicate in_class;
  std::string strong_name;
  StrongPredicate strong;
  std::uint32_t block_bound = 2;
  std::uint32_t cap = 4;

  bool is_member(const Structure& m) const { return m.size() > 0 && in_class(m); }

  /// `subset` is closed, induces a member, and the strong predicate accepts it.
  bool is_strong_subset(std::span<const std::uint32_t> subset, const Structure& n) const;

  /// Image of `m` under the injective map `embedding` is a strong substructure
  /// of `n` and the map is an isomorphism onto it.
  bool is_strong_embedding(const Structure& m, const UniverseMap& embedding, const Structure& n) const;

  /// Human-readable one-line description used in report headers.
  std::string describe() const;
};

struct AecSpec {
  Vocabulary vocab;
  std::string class_name = "loopless-symmetric-graphs";
  std::string strong_name = "induced-substructure";
  std::string strong_predicate;                 // induced-plus-predicate only
  std::map<std::string, std::string> params;    // e.g. relation: E
  std::uint32_t block_bound = 2;
  std::uint32_t cap = 4;
};

std::vector<std::string> class_library();
std::vector<std::string> strong_library();
std::vector<std::string> strong_predicate_library();

/// Builds a ToyAEC from named library entries. Throws Error for unknown names
/// and VocabularyError when the vocabulary lacks a symbol the entry needs.
ToyAEC make_aec(const AecSpec& spec);

/// All class members on {0..size-1}, in enumeration order.
std::vector<Structure> members(const ToyAEC& a, std::uint32_t size);

using AecReport = Report;

/// Exhaustive checks up to the cap: isomorphism closure (class and strong
/// relation), reflexivity, transitivity, coherence, downward Löwenheim-Skolem
/// at the block bound, and closure under chains realizable inside the cap.
AecReport validate_aec(const ToyAEC& a);

/// Sorted element lists of every subset of {0..n-1} with bit i meaning i.
std::vector<std::uint32_t> subset_elements(std::uint32_t mask);

}  // namespace aecspace
