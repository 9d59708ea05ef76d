#pragma once

// Formulas resolved against a vocabulary, evaluated over any model type that
// answers relation and function lookups by table code. Lookups may be unknown,
// in which case evaluation follows strong Kleene logic; over a total structure
// the result is always definite.

#include <cstdint>
#include <optional>
#include <vector>

#include "aecspace/formulas.hpp"
#include "aecspace/structures.hpp"

namespace aecspace {

enum class Truth : std::uint8_t { False = 0, True = 1, Unknown = 2 };

inline Truth negate(Truth t) {
  return t == Truth::Unknown ? Truth::Unknown : (t == Truth::True ? Truth::False : Truth::True);
}

struct CompiledTerm {
  Term::Kind kind = Term::Kind::Variable;
  std::uint32_t index = 0;  // variable, element, or function table index
  std::vector<CompiledTerm> args;
};

struct CompiledNode {
  FormulaKind kind = FormulaKind::Relation;
  std::uint32_t symbol = 0;  // relation table index
  std::vector<CompiledTerm> terms;
  std::vector<CompiledNode> children;
  std::vector<std::uint32_t> variables;
};

/// Adapter for a total Structure.
class DefiniteModel {
 public:
  explicit DefiniteModel(const Structure& m) : m_(m) {}
  std::uint32_t size() const { return m_.size(); }
  Truth relation(std::size_t r, std::size_t code) const { return m_.holds_code(r, code) ? Truth::True : Truth::False; }
  std::optional<std::uint32_t> function(std::size_t f, std::size_t code) const { return m_.apply_code(f, code); }

 private:
  const Structure& m_;
};

class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const Vocabulary& vocab);

  const Formula& source() const { return source_; }
  std::uint32_t variable_slots() const { return slots_; }
  std::uint32_t element_bound() const { return element_bound_; }
  /// Relation and function table indices the formula reads.
  const std::vector<std::uint32_t>& relations_used() const { return relations_used_; }
  const std::vector<std::uint32_t>& functions_used() const { return functions_used_; }

  /// `env[v]` is the value of variable v, or -1 when unbound. The vector must
  /// have at least variable_slots() entries; quantified slots are restored.
  template <class Model>
  Truth evaluate(const Model& model, std::vector<std::int64_t>& env) const {
    return eval_node(root_, model, env);
  }

  template <class Model>
  Truth evaluate(const Model& model) const {
    std::vector<std::int64_t> env(slots_, -1);
    return eval_node(root_, model, env);
  }

 private:
  template <class Model>
  static std::optional<std::uint32_t> eval_term(const CompiledTerm& t, const Model& model,
                                                const std::vector<std::int64_t>& env) {
    switch (t.kind) {
      case Term::Kind::Variable: {
        const auto v = env[t.index];
        if (v < 0) throw EvaluationError("unbound variable x" + std::to_string(t.index));
        return static_cast<std::uint32_t>(v);
      }
      case Term::Kind::Element:
        if (t.index >= model.size()) throw EvaluationError("element c" + std::to_string(t.index) + " outside the universe");
        return t.index;
      case Term::Kind::Apply: {
        std::size_t code = 0;
        for (const auto& a : t.args) {
          auto v = eval_term(a, model, env);
          if (!v) return std::nullopt;
          code = code * model.size() + *v;
        }
        return model.function(t.index, code);
      }
    }
    return std::nullopt;
  }

  template <class Model>
  static Truth eval_node(const CompiledNode& n, const Model& model, std::vector<std::int64_t>& env) {
    switch (n.kind) {
      case FormulaKind::Relation: {
        std::size_t code = 0;
        for (const auto& t : n.terms) {
          auto v = eval_term(t, model, env);
          if (!v) return Truth::Unknown;
          code = code * model.size() + *v;
        }
        return model.relation(n.symbol, code);
      }
      case FormulaKind::Equals: {
        auto a = eval_term(n.terms[0], model, env);
        auto b = eval_term(n.terms[1], model, env);
        if (!a || !b) return Truth::Unknown;
        return *a == *b ? Truth::True : Truth::False;
      }
      case FormulaKind::Not:
        return negate(eval_node(n.children[0], model, env));
      case FormulaKind::And:
      case FormulaKind::Or: {
        const Truth absorbing = n.kind == FormulaKind::And ? Truth::False : Truth::True;
        Truth result = negate(absorbing);
        for (const auto& c : n.children) {
          const auto t = eval_node(c, model, env);
          if (t == absorbing) return absorbing;
          if (t == Truth::Unknown) result = Truth::Unknown;
        }
        return result;
      }
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        const Truth absorbing = n.kind == FormulaKind::Exists ? Truth::True : Truth::False;
        Truth result = negate(absorbing);
        const auto size = model.size();
        const auto k = n.variables.size();
        std::vector<std::int64_t> saved(k);
        for (std::size_t i = 0; i < k; ++i) saved[i] = env[n.variables[i]];
        if (size == 0) return result;
        for (std::size_t i = 0; i < k; ++i) env[n.variables[i]] = 0;
        while (true) {
          const auto t = eval_node(n.children[0], model, env);
          if (t == absorbing) {
            result = absorbing;
            break;
          }
          if (t == Truth::Unknown) result = Truth::Unknown;
          bool advanced = false;
          for (std::size_t i = k; i-- > 0 && !advanced;) {
            advanced = ++env[n.variables[i]] < static_cast<std::int64_t>(size);
            if (!advanced) env[n.variables[i]] = 0;
          }
          if (!advanced) break;
        }
        for (std::size_t i = 0; i < k; ++i) env[n.variables[i]] = saved[i];
        return result;
      }
    }
    return Truth::Unknown;
  }

  Formula source_;
  CompiledNode root_;
  std::uint32_t slots_ = 0;
  std::uint32_t element_bound_ = 0;
  std::vector<std::uint32_t> relations_used_;
  std::vector<std::uint32_t> functions_used_;
};

}  // namespace aecspace
