#pragma once

// Reference implementations used to cross-check the library. They share no
// code with it beyond the data types: plain recursion over the syntax tree,
// permutation sweeps and literal enumeration. Slow on purpose.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aecspace/formulas.hpp"
#include "aecspace/structures.hpp"

namespace oracle {

using aecspace::Formula;
using aecspace::FormulaKind;
using aecspace::Structure;
using aecspace::Term;
using aecspace::Vocabulary;
using aecspace::VocabularyPtr;

using Env = std::map<std::uint32_t, std::uint32_t>;

inline std::size_t code_of(const std::vector<std::uint32_t>& tuple, std::uint32_t n) {
  std::size_t code = 0;
  for (auto v : tuple) code = code * n + v;
  return code;
}

inline std::uint32_t term_value(const Structure& m, const Term& t, const Env& env) {
  switch (t.kind) {
    case Term::Kind::Variable:
      return env.at(t.index);
    case Term::Kind::Element:
      return t.index;
    case Term::Kind::Apply: {
      std::vector<std::uint32_t> args;
      for (const auto& a : t.args) args.push_back(term_value(m, a, env));
      const auto f = *m.vocabulary().find_function(t.symbol);
      return m.function_table(f)[code_of(args, m.size())];
    }
  }
  return 0;
}

/// Satisfaction by direct recursion, quantifiers by looping over the universe.
inline bool holds(const Structure& m, const Formula& f, Env env = {}) {
  switch (f.kind()) {
    case FormulaKind::Relation: {
      std::vector<std::uint32_t> args;
      for (const auto& t : f.terms()) args.push_back(term_value(m, t, env));
      const auto r = *m.vocabulary().find_relation(f.symbol());
      return m.relation_table(r)[code_of(args, m.size())] != 0;
    }
    case FormulaKind::Equals:
      return term_value(m, f.terms()[0], env) == term_value(m, f.terms()[1], env);
    case FormulaKind::Not:
      return !holds(m, f.child(), env);
    case FormulaKind::And:
      for (const auto& c : f.children())
        if (!holds(m, c, env)) return false;
      return true;
    case FormulaKind::Or:
      for (const auto& c : f.children())
        if (holds(m, c, env)) return true;
      return false;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      const bool exists = f.kind() == FormulaKind::Exists;
      const auto& vars = f.bound_variables();
      std::vector<std::uint32_t> values(vars.size(), 0);
      while (true) {
        for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = values[i];
        if (holds(m, f.child(), env) == exists) return exists;
        std::size_t i = 0;
        while (i < values.size() && ++values[i] == m.size()) values[i++] = 0;
        if (i == values.size()) return !exists;
      }
    }
  }
  return false;
}

/// Relation tables of a structure with some cells unknown (-1). Symbols in
/// `fixed` are read from the base structure.
struct Partial {
  const Structure* base = nullptr;
  std::vector<bool> fixed;
  std::vector<std::vector<int>> cells;
};

/// Kleene value: 0 false, 1 true, 2 unknown.
inline int kleene(const Partial& p, const Formula& f, Env env = {}) {
  const Structure& m = *p.base;
  switch (f.kind()) {
    case FormulaKind::Relation: {
      std::vector<std::uint32_t> args;
      for (const auto& t : f.terms()) args.push_back(term_value(m, t, env));
      const auto r = *m.vocabulary().find_relation(f.symbol());
      const auto code = code_of(args, m.size());
      if (p.fixed[r]) return m.relation_table(r)[code] ? 1 : 0;
      const int v = p.cells[r][code];
      return v < 0 ? 2 : v;
    }
    case FormulaKind::Equals:
      return term_value(m, f.terms()[0], env) == term_value(m, f.terms()[1], env) ? 1 : 0;
    case FormulaKind::Not: {
      const int v = kleene(p, f.child(), env);
      return v == 2 ? 2 : 1 - v;
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      const int absorbing = f.kind() == FormulaKind::And ? 0 : 1;
      bool unknown = false;
      for (const auto& c : f.children()) {
        const int v = kleene(p, c, env);
        if (v == absorbing) return absorbing;
        unknown = unknown || v == 2;
      }
      return unknown ? 2 : 1 - absorbing;
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      const int absorbing = f.kind() == FormulaKind::Exists ? 1 : 0;
      const auto& vars = f.bound_variables();
      std::vector<std::uint32_t> values(vars.size(), 0);
      bool unknown = false;
      while (true) {
        for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = values[i];
        const int v = kleene(p, f.child(), env);
        if (v == absorbing) return absorbing;
        unknown = unknown || v == 2;
        std::size_t i = 0;
        while (i < values.size() && ++values[i] == m.size()) values[i++] = 0;
        if (i == values.size()) return unknown ? 2 : 1 - absorbing;
      }
    }
  }
  return 2;
}

/// Every way to fill the relations of `wide` missing from `reduct`'s
/// vocabulary so that all `axioms` hold, by depth-first filling of cells with
/// a three-valued check after each step. Returns the completions found, up to
/// `stop_after`.
inline std::vector<Structure> completions(const VocabularyPtr& wide, const Structure& reduct,
                                          const std::vector<Formula>& axioms, std::size_t stop_after = 2) {
  Structure base(wide, reduct.size());
  const auto& narrow = reduct.vocabulary();
  Partial p;
  p.base = &base;
  for (std::size_t r = 0; r < wide->relations().size(); ++r) {
    const auto& sym = wide->relations()[r];
    const auto cells = aecspace::saturating_pow(reduct.size(), sym.arity);
    const auto old = narrow.find_relation(sym.name);
    p.fixed.push_back(old.has_value());
    p.cells.emplace_back(old ? 0 : cells, -1);
    if (old)
      for (std::size_t c = 0; c < cells; ++c) base.set_code(r, c, reduct.holds_code(*old, c));
  }
  for (std::size_t f = 0; f < wide->functions().size(); ++f) {
    const auto old = *narrow.find_function(wide->functions()[f].name);
    const auto& table = reduct.function_table(old);
    for (std::size_t c = 0; c < table.size(); ++c) base.set_value_code(f, c, table[c]);
  }

  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t r = 0; r < p.cells.size(); ++r)
    for (std::size_t c = 0; c < p.cells[r].size(); ++c) order.emplace_back(r, c);

  std::vector<Structure> found;
  std::function<void(std::size_t)> fill = [&](std::size_t depth) {
    if (found.size() >= stop_after) return;
    for (const auto& a : axioms)
      if (kleene(p, a) == 0) return;
    if (depth == order.size()) {
      Structure out = base;
      for (std::size_t r = 0; r < p.cells.size(); ++r)
        if (!p.fixed[r])
          for (std::size_t c = 0; c < p.cells[r].size(); ++c) out.set_code(r, c, p.cells[r][c] == 1);
      found.push_back(out);
      return;
    }
    const auto [r, c] = order[depth];
    for (int v : {1, 0}) {
      p.cells[r][c] = v;
      fill(depth + 1);
    }
    p.cells[r][c] = -1;
  };
  fill(0);
  return found;
}

/// All bijections of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::uint32_t>> permutations(std::uint32_t n) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  std::vector<std::vector<std::uint32_t>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// sigma maps m onto n: relations and functions carried cell by cell.
inline bool is_iso(const std::vector<std::uint32_t>& sigma, const Structure& m, const Structure& n) {
  if (m.size() != n.size() || sigma.size() != m.size()) return false;
  const auto size = m.size();
  const auto& v = m.vocabulary();
  auto image = [&](std::size_t code, std::uint32_t arity) {
    std::vector<std::uint32_t> t(arity);
    for (std::uint32_t i = arity; i-- > 0;) {
      t[i] = sigma[code % size];
      code /= size;
    }
    return code_of(t, size);
  };
  for (std::size_t r = 0; r < v.relations().size(); ++r)
    for (std::size_t c = 0; c < m.relation_table(r).size(); ++c)
      if (m.relation_table(r)[c] != n.relation_table(r)[image(c, v.relations()[r].arity)]) return false;
  for (std::size_t f = 0; f < v.functions().size(); ++f)
    for (std::size_t c = 0; c < m.function_table(f).size(); ++c)
      if (sigma[m.function_table(f)[c]] != n.function_table(f)[image(c, v.functions()[f].arity)]) return false;
  return true;
}

inline bool isomorphic(const Structure& m, const Structure& n) {
  if (m.size() != n.size()) return false;
  for (const auto& s : permutations(m.size()))
    if (is_iso(s, m, n)) return true;
  return false;
}

/// Every structure of the vocabulary on {0..n-1}, by counting through all
/// table contents.
inline std::vector<Structure> all_structures(const VocabularyPtr& v, std::uint32_t n) {
  std::vector<std::pair<bool, std::size_t>> slots;  // (is relation, symbol), one per cell
  std::vector<std::size_t> cell;
  for (std::size_t r = 0; r < v->relations().size(); ++r)
    for (std::size_t c = 0; c < aecspace::saturating_pow(n, v->relations()[r].arity); ++c) {
      slots.emplace_back(true, r);
      cell.push_back(c);
    }
  for (std::size_t f = 0; f < v->functions().size(); ++f)
    for (std::size_t c = 0; c < aecspace::saturating_pow(n, v->functions()[f].arity); ++c) {
      slots.emplace_back(false, f);
      cell.push_back(c);
    }
  std::vector<std::uint32_t> digit(slots.size(), 0);
  std::vector<Structure> out;
  while (true) {
    Structure m(v, n);
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i].first)
        m.set_code(slots[i].second, cell[i], digit[i] != 0);
      else
        m.set_value_code(slots[i].second, cell[i], digit[i]);
    }
    out.push_back(m);
    std::size_t i = 0;
    while (i < digit.size() && ++digit[i] == (slots[i].first ? 2u : n)) digit[i++] = 0;
    if (i == digit.size()) return out;
  }
}

/// The set B over a short sentence list, straight from its definition.
/// Consistency is read off the truth masks realized by `universe`, which must
/// be every structure on the list's symbols. Negation pairs, disjunctions and
/// existentials are those whose parts are listed, found by text.
class DirectB {
 public:
  DirectB(const std::vector<Formula>& sentences, const std::vector<Structure>& universe, std::uint32_t arity)
      : s_(sentences), arity_(arity) {
    for (const auto& m : universe) {
      std::uint32_t mask = 0;
      for (std::size_t i = 0; i < s_.size(); ++i)
        if (holds(m, s_[i])) mask |= 1u << i;
      realized_.insert(mask);
    }
    std::map<std::string, std::size_t> at;
    for (std::size_t i = 0; i < s_.size(); ++i) at[s_[i].text()] = i;
    for (std::size_t i = 0; i < s_.size(); ++i) {
      const auto& f = s_[i];
      if (f.kind() == FormulaKind::Not && at.count(f.child().text())) neg_.emplace_back(at[f.child().text()], i);
      if (f.kind() == FormulaKind::Or) {
        std::vector<std::size_t> parts;
        for (const auto& c : f.children())
          if (at.count(c.text())) parts.push_back(at[c.text()]);
        dis_.emplace_back(i, parts);
      }
      if (f.kind() == FormulaKind::Exists) {
        std::vector<std::size_t> parts;
        for (std::size_t j = 0; j < s_.size(); ++j)
          if (is_instance(f, s_[j])) parts.push_back(j);
        ex_.emplace_back(i, parts);
      }
    }
  }

  bool consistent(std::uint32_t subset) const {
    for (auto m : realized_)
      if ((m & subset) == subset) return true;
    return false;
  }

  bool member(std::uint32_t f) const {
    for (std::uint32_t a = 1; a < (1u << s_.size()); ++a)
      if ((a & f) == a && std::popcount(a) <= static_cast<int>(arity_) && !consistent(a)) return false;
    auto bit = [&](std::size_t i) { return (f >> i) & 1u; };
    for (const auto& [p, q] : neg_)
      if (bit(p) == bit(q)) return false;
    for (const auto& [d, parts] : dis_) {
      bool any = false;
      for (auto j : parts) any = any || bit(j);
      if (bit(d) != any) return false;
    }
    for (const auto& [e, parts] : ex_) {
      bool any = false;
      for (auto j : parts) any = any || bit(j);
      if (bit(e) != any) return false;
    }
    return true;
  }

 private:
  // ψ is φ(c̄) for ∃x̄ φ when grounding the bound variables by element names
  // turns φ into ψ.
  static bool is_instance(const Formula& ex, const Formula& psi) {
    const auto& vars = ex.bound_variables();
    const std::uint32_t top = std::max(psi.max_element(), 1u);
    std::vector<std::uint32_t> values(vars.size(), 0);
    while (true) {
      aecspace::Assignment a;
      for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = values[i];
      if (aecspace::ground(ex.child(), a) == psi) return true;
      std::size_t i = 0;
      while (i < values.size() && ++values[i] == top) values[i++] = 0;
      if (i == values.size()) return false;
    }
  }

  std::vector<Formula> s_;
  std::uint32_t arity_;
  std::set<std::uint32_t> realized_;
  std::vector<std::pair<std::size_t, std::size_t>> neg_;
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> dis_;
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> ex_;
};

}  // namespace oracle
