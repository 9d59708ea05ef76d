#pragma once

// The space of theory functions over a finite sentence set S, the set B of
// valuations that look like complete theories of a structure, and the maps
// between B and the structures on a fixed universe {0..n-1}.
//
// Sentences name elements with the element terms c0..c{n-1}. "Consistent"
// always means satisfiable on the universe {0..n-1} with c_i read as i.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aecspace/compiled.hpp"
#include "aecspace/fragment.hpp"
#include "aecspace/presentation.hpp"
#include "aecspace/report.hpp"

namespace aecspace {

class SentenceIndex {
 public:
  /// Atomic layer first, then ground instances of the fragment's seed
  /// sentences and members, each with its subsentences, quantifier instances
  /// and negations. Stops before the first instance whose closure would pass
  /// `sentence_count`. Throws BudgetExceeded when the atomic layer alone does.
  static SentenceIndex build(const Fragment& f, std::uint32_t n, std::size_t sentence_count = 4096);
  /// Atomic layer only.
  static SentenceIndex atomic(const VocabularyPtr& vocab, std::uint32_t n);
  /// A hand-picked list, deduplicated in order. Every entry must be a
  /// sentence over `vocab` naming elements below n.
  static SentenceIndex from_list(const VocabularyPtr& vocab, std::uint32_t n, const std::vector<Formula>& sentences);

  const VocabularyPtr& vocabulary() const { return vocab_; }
  std::uint32_t universe() const { return n_; }
  const std::vector<Formula>& sentences() const { return sentences_; }
  const Formula& at(std::size_t i) const { return sentences_[i]; }
  const CompiledFormula& compiled(std::size_t i) const { return compiled_[i]; }
  std::size_t size() const { return sentences_.size(); }
  std::optional<std::size_t> find(const Formula& f) const;
  std::size_t atomic_count() const { return atomic_count_; }
  std::size_t budget() const { return budget_; }
  bool truncated() const { return truncated_; }

  /// (ψ, ¬ψ) index pairs with both sides listed.
  const std::vector<std::pair<std::size_t, std::size_t>>& negations() const { return negations_; }
  /// Listed disjunctions with the indices of their listed disjuncts.
  const std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& disjunctions() const { return disjunctions_; }
  /// Listed existentials with the indices of their listed instances.
  const std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& existentials() const { return existentials_; }

 private:
  SentenceIndex() = default;
  void push(const Formula& f);
  void finish();

  VocabularyPtr vocab_;
  std::uint32_t n_ = 0;
  std::vector<Formula> sentences_;
  std::vector<CompiledFormula> compiled_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t atomic_count_ = 0;
  std::size_t budget_ = 0;
  bool truncated_ = false;
  std::vector<std::pair<std::size_t, std::size_t>> negations_;
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> disjunctions_;
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> existentials_;
};

/// The atomic sentences of the layer every built index starts with:
/// R(c̄), F(c̄) = c_l, k = c_l and c_i = c_j (i < j).
std::vector<Formula> atomic_sentences(const Vocabulary& vocab, std::uint32_t n);

/// A possibly partial map from the sentences of an index to {0,1}. Partial
/// maps double as the basic open conditions of 2^S.
class TheoryFunction {
 public:
  TheoryFunction() = default;
  explicit TheoryFunction(std::size_t size) : bits_(size, -1) {}

  std::size_t size() const { return bits_.size(); }
  std::optional<bool> get(std::size_t i) const {
    return bits_[i] < 0 ? std::nullopt : std::optional<bool>(bits_[i] == 1);
  }
  bool value(std::size_t i) const { return bits_[i] == 1; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void unset(std::size_t i) { bits_[i] = -1; }
  bool is_total() const;

  bool operator==(const TheoryFunction&) const = default;

 private:
  std::vector<std::int8_t> bits_;
};

/// Sorted `(sentence, bit)` records, one per line.
std::string serialize(const TheoryFunction& f, const SentenceIndex& s);
TheoryFunction parse_theory_function(std::string_view text, const SentenceIndex& s);

/// T_M: the total function σ ↦ [M ⊨ σ]. Throws Error on a size mismatch.
TheoryFunction encode(const Structure& m, const SentenceIndex& s);

class DecodeError : public Error {
 public:
  enum class Kind { MissingSentence, NoWitness, MultipleWitnesses };
  DecodeError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Reads relations, function values and constants off the atomic layer.
/// Throws DecodeError when a value has no witness, several witnesses, or the
/// deciding sentence is not listed.
Structure decode(const TheoryFunction& f, const SentenceIndex& s);

struct BOptions {
  std::uint32_t subset_arity = 3;                // largest finite subset tested for consistency
  std::uint64_t consistency_limit = 2'000'000;   // subset tests before BudgetExceeded
};

struct BViolation {
  int condition = 0;    // 1..4
  std::string witness;  // the offending sentences
};

struct BMembership {
  bool member = true;
  std::vector<BViolation> violations;  // first witness per violated condition, by condition
  bool violates(int condition) const;
};

/// Decides conditions 1-4 for a total f. Condition 1 is tested on subsets of
/// the true sentences of size up to `subset_arity`.
BMembership check_B_membership(const TheoryFunction& f, const SentenceIndex& s, const BOptions& options = {});

/// Canonical damaged copies of a total function, or nullopt when the index
/// offers no place for the damage.
/// Double truth: the first listed pair ψ, ¬ψ both set to 1.
std::optional<TheoryFunction> corrupt_double_truth(const TheoryFunction& f, const SentenceIndex& s);
/// Missing witness: the first true existential keeps its 1 while every listed
/// instance drops to 0 (their listed negations rise to 1).
std::optional<TheoryFunction> corrupt_missing_witness(const TheoryFunction& f, const SentenceIndex& s);
/// Inconsistent subset: the first true conjunction with listed negation that
/// is no listed disjunct or instance trades values with its negation, so
/// only condition 1 can notice.
std::optional<TheoryFunction> corrupt_inconsistent_subset(const TheoryFunction& f, const SentenceIndex& s);

/// A small index cut from `s`: whole groups of an existential or disjunction
/// with its listed parts and negations, then negation pairs of atoms, while
/// the total stays within `limit`.
SentenceIndex truncated_index(const SentenceIndex& s, std::size_t limit);

/// Joint satisfiability of the listed sentences.
bool is_consistent(const SentenceIndex& s, const std::vector<std::size_t>& indices);

/// A basic open set N_c of 2^S given by finitely many coordinate values.
struct Condition {
  std::vector<std::pair<std::size_t, bool>> literals;  // sorted by index
  bool admits(const TheoryFunction& f) const;
};

/// A finite union of basic open sets.
struct OpenSet {
  std::vector<Condition> conditions;
  bool contains(const TheoryFunction& f) const;
  /// Coordinates the membership test reads.
  std::vector<std::size_t> support() const;
};

/// An intersection of open sets attached to one condition of B.
struct WitnessFamily {
  std::string condition;  // "1", "2", "3a", "3b", "4a", "4b"
  std::vector<OpenSet> members;
  std::vector<std::string> labels;  // parallel to members
  bool contains(const TheoryFunction& f) const;
};

struct GdeltaWitnesses {
  std::uint32_t subset_arity = 0;
  std::vector<WitnessFamily> families;
  std::vector<std::vector<std::size_t>> inconsistent;  // the subsets indexing family 1
  bool contains(const TheoryFunction& f) const;
};

/// The families of open sets whose intersection is B. Throws BudgetExceeded
/// when the number of subsets up to the arity passes the options' limit.
GdeltaWitnesses gdelta_witnesses(const SentenceIndex& s, const BOptions& options = {});

/// One condition record per line: `family <c> set <k> : <literals> | ...`.
std::string export_witnesses(const GdeltaWitnesses& w, const SentenceIndex& s);

/// Compares membership in B with membership in the intersection of the
/// families over all 2^|S| functions. Check names: families-open,
/// family-2-support, gdelta-equals-B. Throws BudgetExceeded past 2^20.
Report gdelta_equivalence(const SentenceIndex& s, const BOptions& options = {});

enum class BasisMode { QuantifierFree, FirstOrder, Fragment };

std::string to_string(BasisMode mode);
BasisMode parse_basis_mode(std::string_view text);

/// The basic open set {M | M ⊨ φ(ā)} of Mod_n.
struct BasicOpen {
  Formula formula;
  Tuple parameters;  // values of the free variables in increasing order
  Formula sentence() const;
  bool contains(const Structure& m) const;
};

struct BasisOptions {
  FragmentBudget budget = small_budget();
  std::uint64_t max_sets = 200'000;

  static FragmentBudget small_budget();
};

struct Basis {
  std::vector<BasicOpen> sets;
  std::size_t formulas = 0;  // formulas contributing sets
  bool truncated = false;    // stopped at max_sets
};

/// Quantifier-free and first-order modes enumerate formulas over `vocab` with
/// the options' budget; fragment mode uses the members of `fragment`.
Basis basis(BasisMode mode, const VocabularyPtr& vocab, std::uint32_t n, const BasisOptions& options = {},
            const Fragment* fragment = nullptr);

struct ContinuityOptions {
  std::uint32_t condition_size = 1;         // literals per basic condition
  std::uint64_t condition_limit = 200'000;  // basic conditions examined
};

/// Both directions of continuity of e over `domain` (structures on the
/// index's universe). Check names: preimage-open, image-open, injective,
/// domain-in-B.
Report continuity_check(const SentenceIndex& s, const std::vector<Structure>& domain, const Basis& basis,
                        const ContinuityOptions& options = {});

/// Every structure of the index's vocabulary on its universe; throws
/// BudgetExceeded past `limit`.
std::vector<Structure> all_structures(const SentenceIndex& s, std::uint64_t limit = 1u << 16);

/// Whether every relation and function cell of the universe is decided by a
/// listed atomic sentence, which makes e injective on all structures.
CheckResult atomic_determination(const SentenceIndex& s);

/// Reducts of the T*-models of size n against the class members, and the
/// models against the expansions. Check names: reducts-are-members,
/// models-are-expansions.
Report class_as_intersection(const ToyAEC& a, const PresentationTheory& t, std::uint32_t n);

/// Drops each covering axiom in turn, then the whole covering schema, and
/// reports whether a spurious model of size at most n appears. Check name:
/// ablation-detected (passes when some deletion is caught).
Report covering_ablation(const ToyAEC& a, const PresentationTheory& t, std::uint32_t n);

}  // namespace aecspace
