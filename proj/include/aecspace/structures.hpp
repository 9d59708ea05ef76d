#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aecspace {

struct Symbol {
  std::string name;
  std::uint32_t arity = 0;

  bool operator==(const Symbol&) const = default;
};

/// A finite signature. Constants are stored as 0-ary functions so that every
/// table is handled the same way; `constants()` lists them by name.
///
/// Symbol names must be unique across relations and functions, may not contain
/// whitespace, parentheses or `#`, and may not look like a variable (`x3`) or an
/// element name (`c3`); those spellings are reserved by the formula syntax.
class Vocabulary {
 public:
  Vocabulary& add_relation(std::string name, std::uint32_t arity);
  Vocabulary& add_function(std::string name, std::uint32_t arity);
  Vocabulary& add_constant(std::string name) { return add_function(std::move(name), 0); }

  const std::vector<Symbol>& relations() const { return relations_; }
  const std::vector<Symbol>& functions() const { return functions_; }
  std::vector<std::string> constants() const;
  bool has_constants() const;

  std::optional<std::size_t> find_relation(std::string_view name) const;
  std::optional<std::size_t> find_function(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t symbol_count() const { return relations_.size() + functions_.size(); }

  bool operator==(const Vocabulary&) const = default;

 private:
  void check_new_name(const std::string& name) const;

  std::vector<Symbol> relations_;
  std::vector<Symbol> functions_;
};

using VocabularyPtr = std::shared_ptr<const Vocabulary>;

inline VocabularyPtr share(Vocabulary v) { return std::make_shared<const Vocabulary>(std::move(v)); }

bool is_reserved_name(std::string_view name);

/// Map between universes {0..n-1}; entry i is the image of element i.
using UniverseMap = std::vector<std::uint32_t>;
using Tuple = std::vector<std::uint32_t>;

/// n^k, saturating at UINT64_MAX.
std::uint64_t saturating_pow(std::uint64_t n, std::uint64_t k);

/// Tuples over {0..n-1} are numbered with the first coordinate most significant,
/// so code order is lexicographic tuple order.
std::size_t tuple_code(std::span<const std::uint32_t> tuple, std::uint32_t n);
void decode_tuple(std::size_t code, std::uint32_t n, std::span<std::uint32_t> out);

class Structure {
 public:
  /// All relations empty, all functions constantly 0. Throws VocabularyError
  /// for size 0 over a vocabulary with constants.
  Structure(VocabularyPtr vocab, std::uint32_t size);

  const Vocabulary& vocabulary() const { return *vocab_; }
  const VocabularyPtr& vocabulary_ptr() const { return vocab_; }
  std::uint32_t size() const { return size_; }

  bool holds(std::size_t relation, std::span<const std::uint32_t> tuple) const;
  bool holds_code(std::size_t relation, std::size_t code) const { return rel_[relation][code] != 0; }
  void set(std::size_t relation, std::span<const std::uint32_t> tuple, bool value = true);
  void set_code(std::size_t relation, std::size_t code, bool value) { rel_[relation][code] = value ? 1 : 0; }

  std::uint32_t apply(std::size_t function, std::span<const std::uint32_t> args) const;
  std::uint32_t apply_code(std::size_t function, std::size_t code) const { return fun_[function][code]; }
  void set_value(std::size_t function, std::span<const std::uint32_t> args, std::uint32_t value);
  void set_value_code(std::size_t function, std::size_t code, std::uint32_t value);

  std::uint32_t constant(std::string_view name) const;

  const std::vector<std::uint8_t>& relation_table(std::size_t r) const { return rel_[r]; }
  const std::vector<std::uint32_t>& function_table(std::size_t f) const { return fun_[f]; }

  /// sigma·M: the copy of M transported along the bijection sigma.
  Structure permuted(const UniverseMap& sigma) const;

  bool is_closed(std::span<const std::uint32_t> subset) const;

  /// Substructure on `subset`, relabelled so subset[i] becomes i. The subset must
  /// be duplicate-free and closed under the functions.
  Structure induced(std::span<const std::uint32_t> subset) const;

  /// Restriction to a sub-vocabulary, matching symbols by name.
  Structure reduct(VocabularyPtr smaller) const;

  /// Flat table dump used as the total order for canonical forms.
  std::vector<std::uint32_t> encoding() const;

  /// Compact deterministic text naming the tables, e.g. "B2:0110".
  std::string signature() const;

  bool operator==(const Structure& other) const;
  bool operator!=(const Structure& other) const { return !(*this == other); }

 private:
  VocabularyPtr vocab_;
  std::uint32_t size_;
  std::vector<std::vector<std::uint8_t>> rel_;
  std::vector<std::vector<std::uint32_t>> fun_;
};

UniverseMap identity_map(std::uint32_t n);
UniverseMap inverse(const UniverseMap& f);
/// (g ∘ f)(i) = g(f(i)).
UniverseMap compose(const UniverseMap& g, const UniverseMap& f);
bool is_bijection(const UniverseMap& f, std::uint32_t n);

/// True iff f is a bijection from M's universe onto N's that preserves and
/// reflects every relation and commutes with every function and constant.
/// Throws VocabularyError when M and N have different vocabularies.
bool is_isomorphism(const UniverseMap& f, const Structure& m, const Structure& n);

struct CanonicalForm {
  Structure structure;
  UniverseMap iso;  // M -> structure
};

/// Least permuted copy under `encoding()` order. Permutations are scanned in
/// lexicographic order and replaced only on strict improvement, so a structure
/// that is already canonical gets the identity.
CanonicalForm canonical_form(const Structure& m);

/// f_{M,N} = (canonical iso of N)^-1 ∘ (canonical iso of M). Throws Error when
/// M and N are not isomorphic.
UniverseMap coherent_iso(const Structure& m, const Structure& n);

/// Number of structures of the given size, saturating.
std::uint64_t structure_count(const Vocabulary& vocab, std::uint32_t size);

inline constexpr std::uint64_t kDefaultEnumerationLimit = std::uint64_t{1} << 24;

/// Visits every structure on {0..size-1} exactly once. Throws BudgetExceeded if
/// the count is above `limit`. The callback may return false to stop early.
void for_each_structure(const VocabularyPtr& vocab, std::uint32_t size,
                        const std::function<bool(const Structure&)>& visit,
                        std::uint64_t limit = kDefaultEnumerationLimit);

std::vector<Structure> enumerate_structures(const VocabularyPtr& vocab, std::uint32_t size,
                                            std::uint64_t limit = kDefaultEnumerationLimit);

std::string serialize(const Vocabulary& vocab);
std::string serialize(const Structure& m);
Structure parse_structure(std::string_view text);

}  // namespace aecspace
