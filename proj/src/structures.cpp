#include "aecspace/structures.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <sstream>

#include "aecspace/error.hpp"

namespace aecspace {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::size_t table_size(std::uint32_t n, std::uint32_t arity) {
  const auto cells = saturating_pow(n, arity);
  if (cells > (std::uint64_t{1} << 28)) throw BudgetExceeded("table too large");
  return static_cast<std::size_t>(cells);
}

}  // namespace

bool is_reserved_name(std::string_view name) {
  return name.size() >= 2 && (name[0] == 'x' || name[0] == 'c') && all_digits(name.substr(1));
}

void Vocabulary::check_new_name(const std::string& name) const {
  if (name.empty()) throw VocabularyError("empty symbol name");
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '#')
      throw VocabularyError("illegal character in symbol name '" + name + "'");
  }
  if (is_reserved_name(name)) throw VocabularyError("symbol name '" + name + "' is reserved");
  if (name == "=" || name == "rel" || name == "fn" || name == "not" || name == "and" || name == "or" ||
      name == "exists" || name == "forall")
    throw VocabularyError("symbol name '" + name + "' is a keyword");
  if (contains(name)) throw VocabularyError("duplicate symbol '" + name + "'");
}

Vocabulary& Vocabulary::add_relation(std::string name, std::uint32_t arity) {
  check_new_name(name);
  if (arity == 0) throw VocabularyError("relation '" + name + "' must have positive arity");
  relations_.push_back({std::move(name), arity});
  return *this;
}

Vocabulary& Vocabulary::add_function(std::string name, std::uint32_t arity) {
  check_new_name(name);
  functions_.push_back({std::move(name), arity});
  return *this;
}

std::vector<std::string> Vocabulary::constants() const {
  std::vector<std::string> out;
  for (const auto& f : functions_)
    if (f.arity == 0) out.push_back(f.name);
  return out;
}

bool Vocabulary::has_constants() const {
  return std::any_of(functions_.begin(), functions_.end(), [](const Symbol& f) { return f.arity == 0; });
}

std::optional<std::size_t> Vocabulary::find_relation(std::string_view name) const {
  for (std::size_t i = 0; i < relations_.size(); ++i)
    if (relations_[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> Vocabulary::find_function(std::string_view name) const {
  for (std::size_t i = 0; i < functions_.size(); ++i)
    if (functions_[i].name == name) return i;
  return std::nullopt;
}

bool Vocabulary::contains(std::string_view name) const {
  return find_relation(name).has_value() || find_function(name).has_value();
}

std::uint64_t saturating_pow(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    if (n != 0 && r > std::numeric_limits<std::uint64_t>::max() / n) return std::numeric_limits<std::uint64_t>::max();
    r *= n;
  }
  return r;
}

std::size_t tuple_code(std::span<const std::uint32_t> tuple, std::uint32_t n) {
  std::size_t code = 0;
  for (auto a : tuple) code = code * n + a;
  return code;
}

void decode_tuple(std::size_t code, std::uint32_t n, std::span<std::uint32_t> out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<std::uint32_t>(code % n);
    code /= n;
  }
}

Structure::Structure(VocabularyPtr vocab, std::uint32_t size) : vocab_(std::move(vocab)), size_(size) {
  if (!vocab_) throw VocabularyError("null vocabulary");
  if (size_ == 0 && vocab_->has_constants())
    throw VocabularyError("a structure over a vocabulary with constants needs a nonempty universe");
  for (const auto& r : vocab_->relations()) rel_.emplace_back(table_size(size_, r.arity), 0);
  for (const auto& f : vocab_->functions()) fun_.emplace_back(table_size(size_, f.arity), 0);
}

bool Structure::holds(std::size_t relation, std::span<const std::uint32_t> tuple) const {
  return rel_.at(relation)[tuple_code(tuple, size_)] != 0;
}

void Structure::set(std::size_t relation, std::span<const std::uint32_t> tuple, bool value) {
  if (tuple.size() != vocab_->relations().at(relation).arity) throw Error("tuple length does not match arity");
  for (auto a : tuple)
    if (a >= size_) throw Error("tuple element outside the universe");
  rel_[relation][tuple_code(tuple, size_)] = value ? 1 : 0;
}

std::uint32_t Structure::apply(std::size_t function, std::span<const std::uint32_t> args) const {
  return fun_.at(function)[tuple_code(args, size_)];
}

void Structure::set_value(std::size_t function, std::span<const std::uint32_t> args, std::uint32_t value) {
  if (args.size() != vocab_->functions().at(function).arity) throw Error("argument count does not match arity");
  for (auto a : args)
    if (a >= size_) throw Error("argument outside the universe");
  set_value_code(function, tuple_code(args, size_), value);
}

void Structure::set_value_code(std::size_t function, std::size_t code, std::uint32_t value) {
  if (value >= size_) throw Error("function value outside the universe");
  fun_[function][code] = value;
}

std::uint32_t Structure::constant(std::string_view name) const {
  auto f = vocab_->find_function(name);
  if (!f || vocab_->functions()[*f].arity != 0) throw VocabularyError("no constant named '" + std::string(name) + "'");
  return fun_[*f][0];
}

Structure Structure::permuted(const UniverseMap& sigma) const {
  if (!is_bijection(sigma, size_)) throw Error("permuted: not a bijection of the universe");
  Structure out(vocab_, size_);
  Tuple t;
  for (std::size_t r = 0; r < rel_.size(); ++r) {
    t.resize(vocab_->relations()[r].arity);
    for (std::size_t code = 0; code < rel_[r].size(); ++code) {
      if (!rel_[r][code]) continue;
      decode_tuple(code, size_, t);
      for (auto& a : t) a = sigma[a];
      out.rel_[r][tuple_code(t, size_)] = 1;
    }
  }
  for (std::size_t f = 0; f < fun_.size(); ++f) {
    t.resize(vocab_->functions()[f].arity);
    for (std::size_t code = 0; code < fun_[f].size(); ++code) {
      decode_tuple(code, size_, t);
      for (auto& a : t) a = sigma[a];
      out.fun_[f][tuple_code(t, size_)] = sigma[fun_[f][code]];
    }
  }
  return out;
}

bool Structure::is_closed(std::span<const std::uint32_t> subset) const {
  std::vector<char> in(size_, 0);
  for (auto a : subset) {
    if (a >= size_) return false;
    in[a] = 1;
  }
  Tuple t;
  for (std::size_t f = 0; f < fun_.size(); ++f) {
    const auto k = vocab_->functions()[f].arity;
    t.resize(k);
    for (std::size_t code = 0; code < fun_[f].size(); ++code) {
      decode_tuple(code, size_, t);
      if (!std::all_of(t.begin(), t.end(), [&](std::uint32_t a) { return in[a] != 0; })) continue;
      if (!in[fun_[f][code]]) return false;
    }
    if (k == 0 && subset.empty()) return false;
  }
  return true;
}

Structure Structure::induced(std::span<const std::uint32_t> subset) const {
  std::vector<std::int64_t> position(size_, -1);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] >= size_ || position[subset[i]] >= 0) throw Error("induced: subset must be duplicate-free");
    position[subset[i]] = static_cast<std::int64_t>(i);
  }
  if (!is_closed(subset)) throw Error("induced: subset is not closed under the functions");
  const auto m = static_cast<std::uint32_t>(subset.size());
  Structure out(vocab_, m);
  Tuple local, global;
  for (std::size_t r = 0; r < rel_.size(); ++r) {
    const auto k = vocab_->relations()[r].arity;
    local.resize(k);
    global.resize(k);
    for (std::size_t code = 0; code < out.rel_[r].size(); ++code) {
      decode_tuple(code, m, local);
      for (std::size_t i = 0; i < k; ++i) global[i] = subset[local[i]];
      out.rel_[r][code] = rel_[r][tuple_code(global, size_)];
    }
  }
  for (std::size_t f = 0; f < fun_.size(); ++f) {
    const auto k = vocab_->functions()[f].arity;
    local.resize(k);
    global.resize(k);
    for (std::size_t code = 0; code < out.fun_[f].size(); ++code) {
      decode_tuple(code, m, local);
      for (std::size_t i = 0; i < k; ++i) global[i] = subset[local[i]];
      out.fun_[f][code] = static_cast<std::uint32_t>(position[fun_[f][tuple_code(global, size_)]]);
    }
  }
  return out;
}

Structure Structure::reduct(VocabularyPtr smaller) const {
  Structure out(smaller, size_);
  for (std::size_t r = 0; r < smaller->relations().size(); ++r) {
    const auto& sym = smaller->relations()[r];
    auto mine = vocab_->find_relation(sym.name);
    if (!mine || vocab_->relations()[*mine].arity != sym.arity)
      throw VocabularyError("reduct: relation '" + sym.name + "' missing");
    out.rel_[r] = rel_[*mine];
  }
  for (std::size_t f = 0; f < smaller->functions().size(); ++f) {
    const auto& sym = smaller->functions()[f];
    auto mine = vocab_->find_function(sym.name);
    if (!mine || vocab_->functions()[*mine].arity != sym.arity)
      throw VocabularyError("reduct: function '" + sym.name + "' missing");
    out.fun_[f] = fun_[*mine];
  }
  return out;
}

std::vector<std::uint32_t> Structure::encoding() const {
  std::vector<std::uint32_t> out;
  out.push_back(size_);
  for (const auto& t : rel_) out.insert(out.end(), t.begin(), t.end());
  for (const auto& t : fun_) out.insert(out.end(), t.begin(), t.end());
  return out;
}

std::string Structure::signature() const {
  static constexpr char kDigits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string s = "B" + std::to_string(size_) + ":";
  bool first = true;
  for (const auto& t : rel_) {
    if (!first) s += '.';
    first = false;
    for (auto v : t) s += v ? '1' : '0';
  }
  for (const auto& t : fun_) {
    if (!first) s += '.';
    first = false;
    for (auto v : t) {
      if (size_ <= 36) {
        s += kDigits[v];
      } else {
        s += std::to_string(v) + ',';
      }
    }
  }
  return s;
}

bool Structure::operator==(const Structure& other) const {
  return size_ == other.size_ && rel_ == other.rel_ && fun_ == other.fun_ &&
         (vocab_ == other.vocab_ || *vocab_ == *other.vocab_);
}

UniverseMap identity_map(std::uint32_t n) {
  UniverseMap id(n);
  std::iota(id.begin(), id.end(), 0u);
  return id;
}

bool is_bijection(const UniverseMap& f, std::uint32_t n) {
  if (f.size() != n) return false;
  std::vector<char> hit(n, 0);
  for (auto v : f) {
    if (v >= n || hit[v]) return false;
    hit[v] = 1;
  }
  return true;
}

UniverseMap inverse(const UniverseMap& f) {
  if (!is_bijection(f, static_cast<std::uint32_t>(f.size()))) throw Error("inverse: not a bijection");
  UniverseMap inv(f.size());
  for (std::uint32_t i = 0; i < f.size(); ++i) inv[f[i]] = i;
  return inv;
}

UniverseMap compose(const UniverseMap& g, const UniverseMap& f) {
  UniverseMap out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = g.at(f[i]);
  return out;
}

bool is_isomorphism(const UniverseMap& f, const Structure& m, const Structure& n) {
  if (!(m.vocabulary() == n.vocabulary())) throw VocabularyError("is_isomorphism: vocabulary mismatch");
  if (f.size() != m.size()) throw Error("is_isomorphism: map is not total on the source universe");
  if (m.size() != n.size() || !is_bijection(f, n.size())) return false;
  return m.permuted(f) == n;
}

namespace {

// Encoding of sigma·M written into `out`, without materialising the structure.
void permuted_encoding(const Structure& m, const UniverseMap& inv_sigma, std::vector<std::uint32_t>& out,
                       Tuple& scratch) {
  const auto n = m.size();
  const auto& vocab = m.vocabulary();
  out.clear();
  out.push_back(n);
  for (std::size_t r = 0; r < vocab.relations().size(); ++r) {
    const auto& table = m.relation_table(r);
    scratch.resize(vocab.relations()[r].arity);
    for (std::size_t code = 0; code < table.size(); ++code) {
      decode_tuple(code, n, scratch);
      for (auto& a : scratch) a = inv_sigma[a];
      out.push_back(table[tuple_code(scratch, n)]);
    }
  }
  for (std::size_t f = 0; f < vocab.functions().size(); ++f) {
    const auto& table = m.function_table(f);
    scratch.resize(vocab.functions()[f].arity);
    for (std::size_t code = 0; code < table.size(); ++code) {
      decode_tuple(code, n, scratch);
      for (auto& a : scratch) a = inv_sigma[a];
      // sigma(F(sigma^-1 t)); sigma is recovered from inv_sigma by search (n is tiny)
      const auto v = table[tuple_code(scratch, n)];
      std::uint32_t image = 0;
      while (inv_sigma[image] != v) ++image;
      out.push_back(image);
    }
  }
}

}  // namespace

CanonicalForm canonical_form(const Structure& m) {
  const auto n = m.size();
  UniverseMap sigma = identity_map(n);
  UniverseMap best = sigma;
  std::vector<std::uint32_t> best_enc, enc;
  Tuple scratch;
  permuted_encoding(m, sigma, best_enc, scratch);
  while (std::next_permutation(sigma.begin(), sigma.end())) {
    const auto inv = inverse(sigma);
    permuted_encoding(m, inv, enc, scratch);
    if (enc < best_enc) {
      best_enc.swap(enc);
      best = sigma;
    }
  }
  return {m.permuted(best), best};
}

UniverseMap coherent_iso(const Structure& m, const Structure& n) {
  if (!(m.vocabulary() == n.vocabulary())) throw VocabularyError("coherent_iso: vocabulary mismatch");
  auto cm = canonical_form(m);
  auto cn = canonical_form(n);
  if (cm.structure != cn.structure) throw Error("coherent_iso: structures are not isomorphic");
  return compose(inverse(cn.iso), cm.iso);
}

std::uint64_t structure_count(const Vocabulary& vocab, std::uint32_t size) {
  if (size == 0 && vocab.has_constants()) return 0;
  std::uint64_t total = 1;
  auto mul = [&](std::uint64_t x) {
    if (x != 0 && total > std::numeric_limits<std::uint64_t>::max() / x)
      total = std::numeric_limits<std::uint64_t>::max();
    else
      total *= x;
  };
  for (const auto& r : vocab.relations()) {
    const auto cells = saturating_pow(size, r.arity);
    mul(cells >= 64 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << cells));
  }
  for (const auto& f : vocab.functions()) mul(saturating_pow(size, saturating_pow(size, f.arity)));
  return total;
}

void for_each_structure(const VocabularyPtr& vocab, std::uint32_t size,
                        const std::function<bool(const Structure&)>& visit, std::uint64_t limit) {
  if (size == 0 && vocab->has_constants()) return;
  const auto count = structure_count(*vocab, size);
  if (count > limit)
    throw BudgetExceeded("structure enumeration over " + std::to_string(size) + " elements exceeds the limit of " +
                         std::to_string(limit));
  Structure cur(vocab, size);
  // Odometer over all cells: relation cells cycle through {0,1}, function cells through {0..size-1}.
  struct Cell {
    bool relation;
    std::size_t table;
    std::size_t code;
  };
  std::vector<Cell> cells;
  for (std::size_t r = 0; r < vocab->relations().size(); ++r)
    for (std::size_t c = 0; c < cur.relation_table(r).size(); ++c) cells.push_back({true, r, c});
  for (std::size_t f = 0; f < vocab->functions().size(); ++f)
    for (std::size_t c = 0; c < cur.function_table(f).size(); ++c) cells.push_back({false, f, c});
  while (true) {
    if (!visit(cur)) return;
    bool advanced = false;
    for (std::size_t i = cells.size(); i-- > 0 && !advanced;) {
      const auto& cell = cells[i];
      if (cell.relation) {
        advanced = !cur.holds_code(cell.table, cell.code);
        cur.set_code(cell.table, cell.code, advanced);
      } else {
        const auto v = cur.apply_code(cell.table, cell.code);
        advanced = v + 1 < size;
        cur.set_value_code(cell.table, cell.code, advanced ? v + 1 : 0);
      }
    }
    if (!advanced) return;
  }
}

std::vector<Structure> enumerate_structures(const VocabularyPtr& vocab, std::uint32_t size, std::uint64_t limit) {
  std::vector<Structure> out;
  for_each_structure(
      vocab, size,
      [&](const Structure& m) {
        out.push_back(m);
        return true;
      },
      limit);
  return out;
}

std::string serialize(const Vocabulary& vocab) {
  std::ostringstream os;
  for (const auto& r : vocab.relations()) os << "relation " << r.name << ' ' << r.arity << '\n';
  for (const auto& f : vocab.functions()) {
    if (f.arity == 0)
      os << "constant " << f.name << '\n';
    else
      os << "function " << f.name << ' ' << f.arity << '\n';
  }
  return os.str();
}

std::string serialize(const Structure& m) {
  std::ostringstream os;
  os << "structure\n" << serialize(m.vocabulary()) << "size " << m.size() << '\n';
  const auto& vocab = m.vocabulary();
  Tuple t;
  for (std::size_t r = 0; r < vocab.relations().size(); ++r) {
    t.resize(vocab.relations()[r].arity);
    const auto& table = m.relation_table(r);
    for (std::size_t code = 0; code < table.size(); ++code) {
      if (!table[code]) continue;
      decode_tuple(code, m.size(), t);
      os << vocab.relations()[r].name;
      for (auto a : t) os << ' ' << a;
      os << '\n';
    }
  }
  for (std::size_t f = 0; f < vocab.functions().size(); ++f) {
    t.resize(vocab.functions()[f].arity);
    const auto& table = m.function_table(f);
    for (std::size_t code = 0; code < table.size(); ++code) {
      decode_tuple(code, m.size(), t);
      os << vocab.functions()[f].name;
      for (auto a : t) os << ' ' << a;
      os << " -> " << table[code] << '\n';
    }
  }
  os << "end\n";
  return os.str();
}

namespace {

struct LineCursor {
  std::vector<std::string> words;
  std::vector<std::size_t> columns;
  std::size_t line = 0;
};

LineCursor split_line(const std::string& text, std::size_t line_no) {
  LineCursor c;
  c.line = line_no;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    c.words.push_back(text.substr(i, j - i));
    c.columns.push_back(i + 1);
    i = j;
  }
  return c;
}

std::uint32_t parse_index(const LineCursor& c, std::size_t w) {
  if (w >= c.words.size()) throw ParseError("missing number", c.line, c.columns.empty() ? 1 : c.columns.back());
  const auto& s = c.words[w];
  if (!all_digits(s) || s.size() > 9) throw ParseError("expected a number, got '" + s + "'", c.line, c.columns[w]);
  return static_cast<std::uint32_t>(std::stoul(s));
}

}  // namespace

Structure parse_structure(std::string_view text) {
  std::vector<LineCursor> lines;
  {
    std::istringstream is{std::string(text)};
    std::string raw;
    std::size_t no = 0;
    while (std::getline(is, raw)) {
      ++no;
      auto c = split_line(raw, no);
      if (!c.words.empty()) lines.push_back(std::move(c));
    }
  }
  std::size_t i = 0;
  if (lines.empty() || lines[0].words != std::vector<std::string>{"structure"})
    throw ParseError("expected 'structure'", lines.empty() ? 1 : lines[0].line, 1);
  ++i;
  Vocabulary vocab;
  try {
    for (; i < lines.size(); ++i) {
      const auto& c = lines[i];
      const auto& head = c.words[0];
      if (head == "relation" && c.words.size() == 3) {
        vocab.add_relation(c.words[1], parse_index(c, 2));
      } else if (head == "function" && c.words.size() == 3) {
        vocab.add_function(c.words[1], parse_index(c, 2));
      } else if (head == "constant" && c.words.size() == 2) {
        vocab.add_constant(c.words[1]);
      } else {
        break;
      }
    }
  } catch (const VocabularyError& e) {
    throw ParseError(e.what(), lines[i].line, 1);
  }
  if (i >= lines.size() || lines[i].words.size() != 2 || lines[i].words[0] != "size")
    throw ParseError("expected 'size <n>'", i < lines.size() ? lines[i].line : lines.back().line, 1);
  const auto n = parse_index(lines[i], 1);
  ++i;
  auto vp = share(std::move(vocab));
  Structure m(vp, n);
  std::vector<std::vector<char>> assigned;
  for (std::size_t f = 0; f < vp->functions().size(); ++f) assigned.emplace_back(m.function_table(f).size(), 0);
  bool ended = false;
  for (; i < lines.size(); ++i) {
    const auto& c = lines[i];
    if (c.words[0] == "end" && c.words.size() == 1) {
      ended = true;
      ++i;
      break;
    }
    Tuple t;
    if (auto r = vp->find_relation(c.words[0])) {
      const auto k = vp->relations()[*r].arity;
      if (c.words.size() != k + 1) throw ParseError("wrong tuple length for " + c.words[0], c.line, c.columns[0]);
      for (std::size_t w = 1; w <= k; ++w) {
        t.push_back(parse_index(c, w));
        if (t.back() >= n) throw ParseError("element outside the universe", c.line, c.columns[w]);
      }
      m.set(*r, t, true);
    } else if (auto f = vp->find_function(c.words[0])) {
      const auto k = vp->functions()[*f].arity;
      if (c.words.size() != k + 3 || c.words[k + 1] != "->")
        throw ParseError("malformed function entry for " + c.words[0], c.line, c.columns[0]);
      for (std::size_t w = 1; w <= k; ++w) {
        t.push_back(parse_index(c, w));
        if (t.back() >= n) throw ParseError("element outside the universe", c.line, c.columns[w]);
      }
      const auto v = parse_index(c, k + 2);
      if (v >= n) throw ParseError("value outside the universe", c.line, c.columns[k + 2]);
      const auto code = tuple_code(t, n);
      if (assigned[*f][code]) throw ParseError("duplicate function entry", c.line, c.columns[0]);
      assigned[*f][code] = 1;
      m.set_value_code(*f, code, v);
    } else {
      throw ParseError("unknown symbol '" + c.words[0] + "'", c.line, c.columns[0]);
    }
  }
  if (!ended) throw ParseError("missing 'end'", lines.back().line, 1);
  if (i != lines.size()) throw ParseError("trailing content after 'end'", lines[i].line, 1);
  for (std::size_t f = 0; f < assigned.size(); ++f)
    for (char a : assigned[f])
      if (!a) throw ParseError("function table for '" + vp->functions()[f].name + "' is not total", lines.back().line, 1);
  return m;
}

}  // namespace aecspace
