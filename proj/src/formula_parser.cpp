// Reader for the prefix formula syntax:
//
//   (rel E x0 c1)  (= t u)  (not f)  (and f ...)  (or f ...)
//   (exists (x0 x1) f)  (forall (x2) f)
//
// Terms are x<i>, c<i>, a bare constant name, or (fn s t ...).
// `;` starts a comment running to the end of the line.

#include <cctype>
#include <charconv>
#include <limits>

#include "aecspace/formulas.hpp"

namespace aecspace {

namespace {

struct Token {
  enum class Kind { Open, Close, Atom, End } kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_space();
    current_ = Token{};
    current_.line = line_;
    current_.column = column_;
    if (pos_ >= src_.size()) return;
    const char c = src_[pos_];
    if (c == '(' || c == ')') {
      current_.kind = c == '(' ? Token::Kind::Open : Token::Kind::Close;
      current_.text = std::string(1, c);
      step();
      return;
    }
    current_.kind = Token::Kind::Atom;
    while (pos_ < src_.size()) {
      const char d = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      current_.text += d;
      step();
    }
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') step();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        step();
      } else {
        break;
      }
    }
  }

  void step() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  Token current_;
};

[[noreturn]] void fail(const std::string& what, const Token& at) { throw ParseError(what, at.line, at.column); }

std::optional<std::uint32_t> numbered(const std::string& atom, char prefix) {
  if (atom.size() < 2 || atom[0] != prefix) return std::nullopt;
  std::uint32_t value = 0;
  const auto* first = atom.data() + 1;
  const auto* last = atom.data() + atom.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  Formula formula() {
    const Token open = lex_.take();
    if (open.kind != Token::Kind::Open) fail("expected '(' to start a formula", open);
    const Token head = lex_.take();
    if (head.kind != Token::Kind::Atom) fail("expected a connective", head);
    const auto& h = head.text;

    if (h == "rel") {
      const Token name = lex_.take();
      if (name.kind != Token::Kind::Atom) fail("expected a relation name", name);
      std::vector<Term> args;
      while (lex_.peek().kind != Token::Kind::Close) args.push_back(term());
      if (args.empty()) fail("relation atom without arguments", name);
      close();
      return Formula::relation(name.text, std::move(args));
    }
    if (h == "=") {
      Term a = term();
      Term b = term();
      close();
      return Formula::equals(std::move(a), std::move(b));
    }
    if (h == "not") {
      Formula c = formula();
      close();
      return Formula::negation(std::move(c));
    }
    if (h == "and" || h == "or") {
      std::vector<Formula> family;
      while (lex_.peek().kind != Token::Kind::Close) family.push_back(formula());
      if (family.empty()) fail("empty '" + h + "'", head);
      close();
      return h == "and" ? Formula::conjunction(std::move(family)) : Formula::disjunction(std::move(family));
    }
    if (h == "exists" || h == "forall") {
      const Token lp = lex_.take();
      if (lp.kind != Token::Kind::Open) fail("expected '(' before bound variables", lp);
      std::vector<std::uint32_t> vars;
      while (lex_.peek().kind == Token::Kind::Atom) {
        const Token v = lex_.take();
        const auto idx = numbered(v.text, 'x');
        if (!idx) fail("expected a variable, got '" + v.text + "'", v);
        for (auto u : vars)
          if (u == *idx) fail("variable bound twice", v);
        vars.push_back(*idx);
      }
      const Token rp = lex_.take();
      if (rp.kind != Token::Kind::Close) fail("expected ')' after bound variables", rp);
      if (vars.empty()) fail("quantifier binds no variables", rp);
      Formula body = formula();
      close();
      return h == "exists" ? Formula::exists(std::move(vars), std::move(body))
                           : Formula::forall(std::move(vars), std::move(body));
    }
    fail("unknown connective '" + h + "'", head);
  }

  Term term() {
    const Token t = lex_.take();
    if (t.kind == Token::Kind::Atom) {
      if (auto v = numbered(t.text, 'x')) return Term::variable(*v);
      if (auto e = numbered(t.text, 'c')) return Term::element(*e);
      if (is_reserved_name(t.text)) fail("malformed index in '" + t.text + "'", t);
      return Term::constant(t.text);
    }
    if (t.kind != Token::Kind::Open) fail("expected a term", t);
    const Token head = lex_.take();
    if (head.kind != Token::Kind::Atom || head.text != "fn") fail("expected 'fn' in a compound term", head);
    const Token name = lex_.take();
    if (name.kind != Token::Kind::Atom) fail("expected a function name", name);
    std::vector<Term> args;
    while (lex_.peek().kind != Token::Kind::Close) args.push_back(term());
    close();
    return Term::apply(name.text, std::move(args));
  }

  void finish() {
    if (lex_.peek().kind != Token::Kind::End) fail("trailing input", lex_.peek());
  }

 private:
  void close() {
    const Token t = lex_.take();
    if (t.kind != Token::Kind::Close) fail(t.kind == Token::Kind::End ? "unexpected end of input" : "expected ')'", t);
  }

  Lexer lex_;
};

}  // namespace

Formula parse_formula(std::string_view text) {
  Parser p(text);
  Formula f = p.formula();
  p.finish();
  return f;
}

Term parse_term(std::string_view text) {
  Parser p(text);
  Term t = p.term();
  p.finish();
  return t;
}

}  // namespace aecspace
