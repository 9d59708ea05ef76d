#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aecspace/error.hpp"
#include "aecspace/structures.hpp"

namespace aecspace {

/// A term is a variable x<i>, an element name c<i> (denoting universe element i),
/// or a function/constant symbol applied to terms.
struct Term {
  enum class Kind : std::uint8_t { Variable, Element, Apply };

  Kind kind = Kind::Variable;
  std::uint32_t index = 0;  // variable or element number
  std::string symbol;       // Apply only
  std::vector<Term> args;   // Apply only; empty for constants

  static Term variable(std::uint32_t i) { return {Kind::Variable, i, {}, {}}; }
  static Term element(std::uint32_t i) { return {Kind::Element, i, {}, {}}; }
  static Term constant(std::string name) { return {Kind::Apply, 0, std::move(name), {}}; }
  static Term apply(std::string name, std::vector<Term> args) { return {Kind::Apply, 0, std::move(name), std::move(args)}; }

  std::string text() const;
  std::uint32_t depth() const;
  void collect_variables(std::set<std::uint32_t>& out) const;
  bool has_variable(std::uint32_t v) const;

  bool operator==(const Term&) const = default;
};

enum class FormulaKind : std::uint8_t { Relation, Equals, Not, And, Or, Exists, Forall };

class VariablesExhausted : public Error {
 public:
  using Error::Error;
};

/// Immutable formula tree with structural identity. Every node caches its
/// prefix-syntax text, which doubles as the key for ordering and hashing.
class Formula {
 public:
  static Formula relation(std::string symbol, std::vector<Term> args);
  static Formula equals(Term lhs, Term rhs);
  static Formula negation(Formula child);
  static Formula conjunction(std::vector<Formula> family);
  static Formula disjunction(std::vector<Formula> family);
  static Formula exists(std::vector<std::uint32_t> variables, Formula body);
  static Formula forall(std::vector<std::uint32_t> variables, Formula body);
  /// a → b, written as (or (not a) b).
  static Formula implies(Formula a, Formula b);

  FormulaKind kind() const;
  const std::string& symbol() const;
  const std::vector<Term>& terms() const;
  const std::vector<Formula>& children() const;
  const Formula& child() const { return children().front(); }
  const std::vector<std::uint32_t>& bound_variables() const;

  const std::string& text() const;
  /// Sorted, duplicate-free.
  const std::vector<std::uint32_t>& free_variables() const;
  bool is_sentence() const { return free_variables().empty(); }
  bool is_atomic() const { return kind() == FormulaKind::Relation || kind() == FormulaKind::Equals; }

  std::uint32_t height() const;
  std::uint32_t max_width() const;
  std::uint32_t max_term_depth() const;
  std::uint32_t max_variable() const;  // 1 + largest variable index occurring, 0 if none
  std::uint32_t max_element() const;   // 1 + largest element index occurring, 0 if none

  bool operator==(const Formula& other) const;
  std::strong_ordering operator<=>(const Formula& other) const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Node node);

  std::shared_ptr<const Node> node_;
};

std::set<std::uint32_t> free_variables(const Formula& f);

/// Reflexive-transitive closure of the child relation, sorted.
std::vector<Formula> subformulas(const Formula& f);

/// Capture-avoiding substitution of `t` for the free occurrences of variable v.
/// A bound variable that would capture a variable of `t` is renamed to the first
/// variable x0..x_{variable_count-1} that is not free in the body, not in t, and
/// not otherwise bound there; throws VariablesExhausted when none is left.
Formula substitute(const Formula& f, std::uint32_t v, const Term& t, std::uint32_t variable_count);

/// Replaces each listed free variable by an element name.
Formula ground(const Formula& f, const std::map<std::uint32_t, std::uint32_t>& elements);

using Assignment = std::map<std::uint32_t, std::uint32_t>;

/// Standard satisfaction. Element names c<i> denote element i. Throws
/// EvaluationError on an unbound free variable, an unknown symbol or an
/// element name outside the universe.
bool evaluate(const Structure& m, const Formula& f, const Assignment& a = {});

/// Symbols (relation, function and constant names) used by the formula.
std::set<std::string> symbols_of(const Formula& f);

Formula parse_formula(std::string_view text);
Term parse_term(std::string_view text);

}  // namespace aecspace

template <>
struct std::hash<aecspace::Formula> {
  std::size_t operator()(const aecspace::Formula& f) const noexcept { return std::hash<std::string>{}(f.text()); }
};
