#pragma once

// Budget-bounded fragments: least sets of formulas closed under the seven
// fragment rules (atoms, subformulas, substitution, negation, single-variable
// existentials, conjunctions of families, bounded free variables).
//
// Two kinds of members are tracked. Seed-derived members come from the seed
// by taking subformulas and substituting terms; they keep the seed's shape and
// only answer to the variable bounds. Constructed members come from rules 1
// and 4-6 and must also respect the height and width limits.

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "aecspace/formulas.hpp"
#include "aecspace/report.hpp"
#include "aecspace/structures.hpp"

namespace aecspace {

struct FragmentBudget {
  std::uint32_t variables = 5;       // |V|; V = {x0..x_{variables-1}}
  std::uint32_t max_free = 2;        // rule 7 bound for constructed members
  std::uint32_t seed_free = 4;       // free-variable bound for seed-derived members
  std::uint32_t max_depth = 1;       // height bound for constructed members
  std::uint32_t max_width = 2;       // largest conjunction family built by rule 6
  std::uint32_t max_term_depth = 1;  // nesting of function symbols in terms
  bool seed_substitution = true;     // close seed-derived members under rule 3
  std::uint64_t max_count = 2'000'000;

  /// Defaults tied to a block bound b: |V| = 2b+1, free bound b, seed bound 2b.
  static FragmentBudget for_block_bound(std::uint32_t b);
};

class Fragment {
 public:
  const VocabularyPtr& vocabulary() const { return vocab_; }
  const FragmentBudget& budget() const { return budget_; }
  /// Sorted by (height, text).
  const std::vector<Formula>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(const Formula& f) const { return index_.count(f.text()) != 0; }
  bool is_seed_derived(const Formula& f) const;

  /// Terms usable in rule 1 and rule 3: variables of V, constants, and
  /// function applications up to the term-depth bound.
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<Formula>& seed() const { return seed_; }

 private:
  friend Fragment fragment_closure(const std::vector<Formula>&, const VocabularyPtr&, const FragmentBudget&);
  friend Report audit_fragment(const Fragment&);

  VocabularyPtr vocab_;
  FragmentBudget budget_;
  std::vector<Formula> members_;
  std::unordered_map<std::string, bool> index_;  // text -> seed-derived
  std::vector<Term> terms_;
  std::vector<Formula> seed_;
};

/// Least fixed point of the rules inside the budget, containing the seed.
/// Throws BudgetExceeded when the member count passes max_count, and Error when
/// a seed formula uses variables outside V or symbols outside the vocabulary.
Fragment fragment_closure(const std::vector<Formula>& seed, const VocabularyPtr& vocab, const FragmentBudget& budget);

/// Re-applies every rule to every member and reports each result that fits
/// the budget but is missing. Check names: rule-1 .. rule-7.
Report audit_fragment(const Fragment& f);

/// Whether `f` fits the constructed-member budget.
bool fits_constructed(const Formula& f, const FragmentBudget& budget);
/// Whether `f` fits the looser seed-derived budget.
bool fits_seed(const Formula& f, const FragmentBudget& budget);

}  // namespace aecspace
