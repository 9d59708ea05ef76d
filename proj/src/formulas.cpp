#include "aecspace/formulas.hpp"

#include <algorithm>

#include "aecspace/compiled.hpp"

namespace aecspace {

// ---------------------------------------------------------------- terms

std::string Term::text() const {
  switch (kind) {
    case Kind::Variable:
      return "x" + std::to_string(index);
    case Kind::Element:
      return "c" + std::to_string(index);
    case Kind::Apply:
      break;
  }
  if (args.empty()) return symbol;
  std::string out = "(fn " + symbol;
  for (const auto& a : args) out += " " + a.text();
  return out + ")";
}

std::uint32_t Term::depth() const {
  if (kind != Kind::Apply || args.empty()) return 0;
  std::uint32_t d = 0;
  for (const auto& a : args) d = std::max(d, a.depth());
  return d + 1;
}

void Term::collect_variables(std::set<std::uint32_t>& out) const {
  if (kind == Kind::Variable) out.insert(index);
  for (const auto& a : args) a.collect_variables(out);
}

bool Term::has_variable(std::uint32_t v) const {
  if (kind == Kind::Variable) return index == v;
  return std::any_of(args.begin(), args.end(), [v](const Term& a) { return a.has_variable(v); });
}

namespace {

void term_extent(const Term& t, std::uint32_t& max_var, std::uint32_t& max_elem) {
  if (t.kind == Term::Kind::Variable) max_var = std::max(max_var, t.index + 1);
  if (t.kind == Term::Kind::Element) max_elem = std::max(max_elem, t.index + 1);
  for (const auto& a : t.args) term_extent(a, max_var, max_elem);
}

Term replace_in_term(const Term& t, std::uint32_t v, const Term& by) {
  if (t.kind == Term::Kind::Variable) return t.index == v ? by : t;
  if (t.kind == Term::Kind::Element) return t;
  Term out = t;
  for (auto& a : out.args) a = replace_in_term(a, v, by);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- formulas

struct Formula::Node {
  FormulaKind kind = FormulaKind::Relation;
  std::string symbol;
  std::vector<Term> terms;
  std::vector<Formula> children;
  std::vector<std::uint32_t> variables;

  std::string text;
  std::vector<std::uint32_t> free;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t term_depth = 0;
  std::uint32_t max_var = 0;
  std::uint32_t max_elem = 0;
};

Formula Formula::make(Node n) {
  std::set<std::uint32_t> free;
  switch (n.kind) {
    case FormulaKind::Relation:
    case FormulaKind::Equals:
      n.text = n.kind == FormulaKind::Relation ? "(rel " + n.symbol : std::string("(=");
      for (const auto& t : n.terms) {
        n.text += " " + t.text();
        t.collect_variables(free);
        n.term_depth = std::max(n.term_depth, t.depth());
        term_extent(t, n.max_var, n.max_elem);
      }
      n.text += ")";
      break;
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      static constexpr const char* kHeads[] = {"", "", "(not", "(and", "(or", "(exists", "(forall"};
      n.text = kHeads[static_cast<int>(n.kind)];
      if (n.kind == FormulaKind::Exists || n.kind == FormulaKind::Forall) {
        n.text += " (";
        for (std::size_t i = 0; i < n.variables.size(); ++i) {
          if (i) n.text += " ";
          n.text += "x" + std::to_string(n.variables[i]);
          n.max_var = std::max(n.max_var, n.variables[i] + 1);
        }
        n.text += ")";
      }
      std::uint32_t child_height = 0;
      for (const auto& c : n.children) {
        n.text += " " + c.text();
        free.insert(c.free_variables().begin(), c.free_variables().end());
        child_height = std::max(child_height, c.height());
        n.width = std::max(n.width, c.max_width());
        n.term_depth = std::max(n.term_depth, c.max_term_depth());
        n.max_var = std::max(n.max_var, c.max_variable());
        n.max_elem = std::max(n.max_elem, c.max_element());
      }
      n.text += ")";
      n.height = child_height + 1;
      if (n.kind == FormulaKind::And || n.kind == FormulaKind::Or)
        n.width = std::max<std::uint32_t>(n.width, static_cast<std::uint32_t>(n.children.size()));
      for (auto v : n.variables) free.erase(v);
      break;
    }
  }
  n.free.assign(free.begin(), free.end());
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::relation(std::string symbol, std::vector<Term> args) {
  if (args.empty()) throw Error("relation atom '" + symbol + "' needs arguments");
  Node n;
  n.kind = FormulaKind::Relation;
  n.symbol = std::move(symbol);
  n.terms = std::move(args);
  return make(std::move(n));
}

Formula Formula::equals(Term lhs, Term rhs) {
  Node n;
  n.kind = FormulaKind::Equals;
  n.terms = {std::move(lhs), std::move(rhs)};
  return make(std::move(n));
}

Formula Formula::negation(Formula child) {
  Node n;
  n.kind = FormulaKind::Not;
  n.children = {std::move(child)};
  return make(std::move(n));
}

Formula Formula::conjunction(std::vector<Formula> family) {
  if (family.empty()) throw Error("empty conjunction");
  Node n;
  n.kind = FormulaKind::And;
  n.children = std::move(family);
  return make(std::move(n));
}

Formula Formula::disjunction(std::vector<Formula> family) {
  if (family.empty()) throw Error("empty disjunction");
  Node n;
  n.kind = FormulaKind::Or;
  n.children = std::move(family);
  return make(std::move(n));
}

namespace {

void check_binder(const std::vector<std::uint32_t>& vars) {
  if (vars.empty()) throw Error("quantifier binds no variables");
  std::set<std::uint32_t> seen(vars.begin(), vars.end());
  if (seen.size() != vars.size()) throw Error("quantifier binds a variable twice");
}

}  // namespace

Formula Formula::exists(std::vector<std::uint32_t> variables, Formula body) {
  check_binder(variables);
  Node n;
  n.kind = FormulaKind::Exists;
  n.variables = std::move(variables);
  n.children = {std::move(body)};
  return make(std::move(n));
}

Formula Formula::forall(std::vector<std::uint32_t> variables, Formula body) {
  check_binder(variables);
  Node n;
  n.kind = FormulaKind::Forall;
  n.variables = std::move(variables);
  n.children = {std::move(body)};
  return make(std::move(n));
}

Formula Formula::implies(Formula a, Formula b) { return disjunction({negation(std::move(a)), std::move(b)}); }

FormulaKind Formula::kind() const { return node_->kind; }
const std::string& Formula::symbol() const { return node_->symbol; }
const std::vector<Term>& Formula::terms() const { return node_->terms; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
const std::vector<std::uint32_t>& Formula::bound_variables() const { return node_->variables; }
const std::string& Formula::text() const { return node_->text; }
const std::vector<std::uint32_t>& Formula::free_variables() const { return node_->free; }
std::uint32_t Formula::height() const { return node_->height; }
std::uint32_t Formula::max_width() const { return node_->width; }
std::uint32_t Formula::max_term_depth() const { return node_->term_depth; }
std::uint32_t Formula::max_variable() const { return node_->max_var; }
std::uint32_t Formula::max_element() const { return node_->max_elem; }

bool Formula::operator==(const Formula& other) const {
  return node_ == other.node_ || node_->text == other.node_->text;
}

std::strong_ordering Formula::operator<=>(const Formula& other) const {
  if (node_ == other.node_) return std::strong_ordering::equal;
  return node_->text <=> other.node_->text;
}

// ---------------------------------------------------------------- operations

std::set<std::uint32_t> free_variables(const Formula& f) {
  return {f.free_variables().begin(), f.free_variables().end()};
}

namespace {

void collect_subformulas(const Formula& f, std::set<Formula>& out) {
  if (!out.insert(f).second) return;
  for (const auto& c : f.children()) collect_subformulas(c, out);
}

void collect_all_variables(const Formula& f, std::set<std::uint32_t>& out) {
  for (const auto& t : f.terms()) t.collect_variables(out);
  out.insert(f.bound_variables().begin(), f.bound_variables().end());
  for (const auto& c : f.children()) collect_all_variables(c, out);
}

Formula rebuild(const Formula& f, std::vector<Formula> children) {
  switch (f.kind()) {
    case FormulaKind::Not:
      return Formula::negation(std::move(children.front()));
    case FormulaKind::And:
      return Formula::conjunction(std::move(children));
    case FormulaKind::Or:
      return Formula::disjunction(std::move(children));
    case FormulaKind::Exists:
      return Formula::exists(f.bound_variables(), std::move(children.front()));
    case FormulaKind::Forall:
      return Formula::forall(f.bound_variables(), std::move(children.front()));
    default:
      return f;
  }
}

Formula replace_atomic(const Formula& f, std::uint32_t v, const Term& t) {
  std::vector<Term> terms;
  terms.reserve(f.terms().size());
  for (const auto& x : f.terms()) terms.push_back(replace_in_term(x, v, t));
  if (f.kind() == FormulaKind::Equals) return Formula::equals(terms[0], terms[1]);
  return Formula::relation(f.symbol(), std::move(terms));
}

bool is_free_in(const Formula& f, std::uint32_t v) {
  return std::binary_search(f.free_variables().begin(), f.free_variables().end(), v);
}

}  // namespace

std::vector<Formula> subformulas(const Formula& f) {
  std::set<Formula> out;
  collect_subformulas(f, out);
  return {out.begin(), out.end()};
}

Formula substitute(const Formula& f, std::uint32_t v, const Term& t, std::uint32_t variable_count) {
  if (!is_free_in(f, v)) return f;
  if (f.is_atomic()) return replace_atomic(f, v, t);
  if (f.kind() == FormulaKind::Not || f.kind() == FormulaKind::And || f.kind() == FormulaKind::Or) {
    std::vector<Formula> children;
    children.reserve(f.children().size());
    for (const auto& c : f.children()) children.push_back(substitute(c, v, t, variable_count));
    return rebuild(f, std::move(children));
  }

  // Quantifier with v free in the body: rename any binder t would be captured by.
  std::set<std::uint32_t> term_vars;
  t.collect_variables(term_vars);
  auto vars = f.bound_variables();
  Formula body = f.child();
  std::set<std::uint32_t> taken;
  collect_all_variables(body, taken);
  taken.insert(term_vars.begin(), term_vars.end());
  taken.insert(vars.begin(), vars.end());
  for (auto& u : vars) {
    if (!term_vars.count(u)) continue;
    std::uint32_t w = 0;
    while (w < variable_count && taken.count(w)) ++w;
    if (w >= variable_count)
      throw VariablesExhausted("no fresh variable among x0..x" + std::to_string(variable_count - 1) +
                               " to rename x" + std::to_string(u));
    taken.insert(w);
    body = substitute(body, u, Term::variable(w), variable_count);
    u = w;
  }
  body = substitute(body, v, t, variable_count);
  if (f.kind() == FormulaKind::Exists) return Formula::exists(std::move(vars), std::move(body));
  return Formula::forall(std::move(vars), std::move(body));
}

Formula ground(const Formula& f, const std::map<std::uint32_t, std::uint32_t>& elements) {
  Formula out = f;
  for (const auto& [v, e] : elements) out = substitute(out, v, Term::element(e), 0);
  return out;
}

bool evaluate(const Structure& m, const Formula& f, const Assignment& a) {
  const CompiledFormula compiled(f, m.vocabulary());
  std::uint32_t slots = compiled.variable_slots();
  if (!a.empty()) slots = std::max(slots, a.rbegin()->first + 1);
  std::vector<std::int64_t> env(slots, -1);
  for (const auto& [v, e] : a) {
    if (e >= m.size()) throw EvaluationError("assignment of x" + std::to_string(v) + " outside the universe");
    env[v] = e;
  }
  return compiled.evaluate(DefiniteModel(m), env) == Truth::True;
}

namespace {

void term_symbols(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Apply) out.insert(t.symbol);
  for (const auto& a : t.args) term_symbols(a, out);
}

void formula_symbols(const Formula& f, std::set<std::string>& out) {
  if (f.kind() == FormulaKind::Relation) out.insert(f.symbol());
  for (const auto& t : f.terms()) term_symbols(t, out);
  for (const auto& c : f.children()) formula_symbols(c, out);
}

}  // namespace

std::set<std::string> symbols_of(const Formula& f) {
  std::set<std::string> out;
  formula_symbols(f, out);
  return out;
}

// ---------------------------------------------------------------- compilation

namespace {

struct Compiler {
  const Vocabulary& vocab;
  std::set<std::uint32_t> relations;
  std::set<std::uint32_t> functions;

  CompiledTerm term(const Term& t) {
    CompiledTerm out;
    out.kind = t.kind;
    out.index = t.index;
    if (t.kind != Term::Kind::Apply) return out;
    const auto f = vocab.find_function(t.symbol);
    if (!f) throw EvaluationError("unknown function or constant '" + t.symbol + "'");
    if (vocab.functions()[*f].arity != t.args.size())
      throw EvaluationError("'" + t.symbol + "' expects " + std::to_string(vocab.functions()[*f].arity) +
                            " arguments");
    out.index = static_cast<std::uint32_t>(*f);
    functions.insert(out.index);
    for (const auto& a : t.args) out.args.push_back(term(a));
    return out;
  }

  CompiledNode node(const Formula& f) {
    CompiledNode out;
    out.kind = f.kind();
    out.variables = f.bound_variables();
    if (f.kind() == FormulaKind::Relation) {
      const auto r = vocab.find_relation(f.symbol());
      if (!r) throw EvaluationError("unknown relation '" + f.symbol() + "'");
      if (vocab.relations()[*r].arity != f.terms().size())
        throw EvaluationError("'" + f.symbol() + "' expects " + std::to_string(vocab.relations()[*r].arity) +
                              " arguments");
      out.symbol = static_cast<std::uint32_t>(*r);
      relations.insert(out.symbol);
    }
    for (const auto& t : f.terms()) out.terms.push_back(term(t));
    for (const auto& c : f.children()) out.children.push_back(node(c));
    return out;
  }
};

}  // namespace

CompiledFormula::CompiledFormula(const Formula& f, const Vocabulary& vocab) : source_(f) {
  Compiler c{vocab, {}, {}};
  root_ = c.node(f);
  slots_ = f.max_variable();
  element_bound_ = f.max_element();
  relations_used_.assign(c.relations.begin(), c.relations.end());
  functions_used_.assign(c.functions.begin(), c.functions.end());
}

}  // namespace aecspace
