#pragma once

// Complete search for finite models of a sentence set on a fixed universe.
// Tables are filled one cell at a time and every sentence reading the symbol
// just assigned is re-evaluated in three-valued logic; a definite False prunes
// the branch. Nothing is skipped, so enumeration is exhaustive.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "aecspace/compiled.hpp"
#include "aecspace/structures.hpp"

namespace aecspace {

/// Structure whose table cells may be unknown.
class PartialStructure {
 public:
  static constexpr std::uint32_t kUnset = 0xFFFFFFFFu;

  PartialStructure(VocabularyPtr vocab, std::uint32_t size);
  /// Every cell known, copied from `m`.
  explicit PartialStructure(const Structure& m);

  const Vocabulary& vocabulary() const { return *vocab_; }
  const VocabularyPtr& vocabulary_ptr() const { return vocab_; }
  std::uint32_t size() const { return size_; }

  Truth relation(std::size_t r, std::size_t code) const { return static_cast<Truth>(rel_[r][code]); }
  std::optional<std::uint32_t> function(std::size_t f, std::size_t code) const {
    const auto v = fun_[f][code];
    return v == kUnset ? std::nullopt : std::optional<std::uint32_t>(v);
  }

  void set_relation(std::size_t r, std::size_t code, Truth t) { rel_[r][code] = static_cast<std::uint8_t>(t); }
  void set_function(std::size_t f, std::size_t code, std::uint32_t v) { fun_[f][code] = v; }

  /// Marks every cell of the named symbol unknown.
  void forget(std::string_view symbol);
  /// Copies every table of `m` whose symbol name also occurs here.
  void fix_from(const Structure& m);

  std::size_t relation_cells(std::size_t r) const { return rel_[r].size(); }
  std::size_t function_cells(std::size_t f) const { return fun_[f].size(); }

  bool is_total() const;
  /// Unknown relation cells read as false and unknown function cells as 0.
  Structure complete() const;

 private:
  VocabularyPtr vocab_;
  std::uint32_t size_;
  std::vector<std::vector<std::uint8_t>> rel_;
  std::vector<std::vector<std::uint32_t>> fun_;
};

struct SearchOptions {
  /// Branch only on symbols some sentence reads; the remaining unknown cells
  /// are filled by complete() and each solution stands for a whole family.
  bool relevant_symbols_only = false;
  /// Search nodes before BudgetExceeded is thrown.
  std::uint64_t node_limit = 200'000'000;
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t solutions = 0;
};

/// Visits every completion of `start` (restricted per the options) that
/// satisfies all sentences. The callback returns false to stop the search.
SearchStats search_models(const PartialStructure& start, const std::vector<CompiledFormula>& sentences,
                          const std::function<bool(const Structure&)>& visit, const SearchOptions& options = {});

/// First model found, if any.
std::optional<Structure> find_model(const PartialStructure& start, const std::vector<CompiledFormula>& sentences,
                                    const SearchOptions& options = {});

std::vector<CompiledFormula> compile_all(const std::vector<Formula>& formulas, const Vocabulary& vocab);

}  // namespace aecspace
