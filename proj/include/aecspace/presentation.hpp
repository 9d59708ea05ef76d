#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aecspace/aec.hpp"
#include "aecspace/formulas.hpp"
#include "aecspace/model_search.hpp"
#include "aecspace/report.hpp"

namespace aecspace {

/// An isomorphism type of blocks, represented by its canonical form. The
/// enumeration m_i of the representative is the identity on {0..size-1}.
struct BlockClass {
  std::string name;  // signature of the representative, e.g. "B2:0110"
  Structure rep;
};

/// A strong embedding between block representatives: element i of `small`
/// sits at position map[i] of `large`, and that image is strong in `large`.
struct PairClass {
  std::string name;  // e.g. "B1:0<B2:0110/1"
  std::size_t small = 0;
  std::size_t large = 0;
  UniverseMap map;
};

struct BlockCatalog {
  std::uint32_t block_bound = 0;
  std::vector<BlockClass> blocks;  // by size, then by encoding
  std::vector<PairClass> pairs;    // by (small, large, map)

  std::optional<std::size_t> find_block(const Structure& canonical) const;
};

BlockCatalog enumerate_blocks(const ToyAEC& a);

struct ExpandedVocabulary {
  VocabularyPtr tau;
  VocabularyPtr tau_star;
  std::vector<std::string> block_symbols;  // parallel to catalog.blocks
  std::vector<std::string> pair_symbols;   // parallel to catalog.pairs
  std::vector<std::string> renamed;        // "R[..] -> R[..]_1" for every collision with tau
};

/// τ followed by R[<block>] for each block and R[<pair>] for each pair class.
ExpandedVocabulary build_expanded_vocabulary(const BlockCatalog& c, const VocabularyPtr& tau);

struct Axiom {
  Formula formula;
  int schema = 0;      // 1..5
  std::string source;  // block or pair class name
};

struct PresentationTheory {
  BlockCatalog catalog;
  ExpandedVocabulary vocab;
  std::uint32_t tuple_budget = 0;
  std::vector<Axiom> axioms;

  std::vector<Formula> formulas() const;
  std::size_t count(int schema) const;
};

/// Emits the five schemata. Covering axioms are produced for tuple lengths
/// 1..b; the budget must be at least b. Throws Error otherwise.
PresentationTheory generate_Tstar(const BlockCatalog& c, const ExpandedVocabulary& v, std::uint32_t tuple_budget);

/// Convenience: catalog, vocabulary and theory in one step.
PresentationTheory build_presentation(const ToyAEC& a, std::uint32_t tuple_budget);

/// One axiom per line, each preceded by `# schema:<n> class:<name>`.
std::string export_Tstar(const PresentationTheory& t);

/// The canonical expansion of a class member. Throws Error when m is not in K.
Structure expand(const ToyAEC& a, const PresentationTheory& t, const Structure& m);

/// First axiom false in `m` (a τ*-structure), if any.
std::optional<Axiom> first_violated_axiom(const PresentationTheory& t, const Structure& m);

/// Every τ*-structure of the given size satisfying T*. Uses the complete
/// branch-and-prune search; `fixed_reduct` pins the τ tables when given.
std::vector<Structure> models_of_Tstar(const PresentationTheory& t, std::uint32_t size,
                                       const Structure* fixed_reduct = nullptr, SearchStats* stats = nullptr,
                                       const std::vector<std::size_t>* axiom_subset = nullptr);

/// Same set by literal enumeration of every τ*-structure; throws
/// BudgetExceeded beyond `limit` candidates.
std::vector<Structure> models_of_Tstar_brute_force(const PresentationTheory& t, std::uint32_t size,
                                                   const Structure* fixed_reduct = nullptr,
                                                   std::uint64_t limit = std::uint64_t{1} << 20);

/// `m` embeds into `n` along `embedding` as a substructure (relations
/// preserved and reflected, functions commute).
bool is_substructure_embedding(const Structure& m, const UniverseMap& embedding, const Structure& n);

struct VerifyOptions {
  std::uint32_t search_cap = 2;  // sizes for the exhaustive τ*-structure search
  std::uint64_t brute_force_limit = std::uint64_t{1} << 20;
};

/// Clause checks of the presentation theorem. Check names:
/// clause-1, clause-2, clause-3, clause-4, clause-5, expansions-model-Tstar,
/// brute-force-agreement.
Report verify_presentation(const ToyAEC& a, const PresentationTheory& t, const VerifyOptions& options = {});

}  // namespace aecspace
