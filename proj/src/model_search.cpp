#include "aecspace/model_search.hpp"

#include <algorithm>

#include "aecspace/error.hpp"

namespace aecspace {

PartialStructure::PartialStructure(VocabularyPtr vocab, std::uint32_t size) : vocab_(std::move(vocab)), size_(size) {
  if (size_ == 0 && vocab_->has_constants()) throw VocabularyError("constants need a nonempty universe");
  for (const auto& r : vocab_->relations())
    rel_.emplace_back(static_cast<std::size_t>(saturating_pow(size_, r.arity)), static_cast<std::uint8_t>(Truth::Unknown));
  for (const auto& f : vocab_->functions())
    fun_.emplace_back(static_cast<std::size_t>(saturating_pow(size_, f.arity)), kUnset);
}

PartialStructure::PartialStructure(const Structure& m) : vocab_(m.vocabulary_ptr()), size_(m.size()) {
  for (std::size_t r = 0; r < vocab_->relations().size(); ++r) rel_.push_back(m.relation_table(r));
  for (std::size_t f = 0; f < vocab_->functions().size(); ++f) fun_.push_back(m.function_table(f));
}

void PartialStructure::forget(std::string_view symbol) {
  if (auto r = vocab_->find_relation(symbol)) {
    std::fill(rel_[*r].begin(), rel_[*r].end(), static_cast<std::uint8_t>(Truth::Unknown));
  } else if (auto f = vocab_->find_function(symbol)) {
    std::fill(fun_[*f].begin(), fun_[*f].end(), kUnset);
  } else {
    throw VocabularyError("unknown symbol '" + std::string(symbol) + "'");
  }
}

void PartialStructure::fix_from(const Structure& m) {
  if (m.size() != size_) throw VocabularyError("universe size mismatch");
  const auto& other = m.vocabulary();
  for (std::size_t r = 0; r < other.relations().size(); ++r)
    if (auto mine = vocab_->find_relation(other.relations()[r].name)) rel_[*mine] = m.relation_table(r);
  for (std::size_t f = 0; f < other.functions().size(); ++f)
    if (auto mine = vocab_->find_function(other.functions()[f].name)) fun_[*mine] = m.function_table(f);
}

bool PartialStructure::is_total() const {
  for (const auto& t : rel_)
    if (std::find(t.begin(), t.end(), static_cast<std::uint8_t>(Truth::Unknown)) != t.end()) return false;
  for (const auto& t : fun_)
    if (std::find(t.begin(), t.end(), kUnset) != t.end()) return false;
  return true;
}

Structure PartialStructure::complete() const {
  Structure out(vocab_, size_);
  for (std::size_t r = 0; r < rel_.size(); ++r)
    for (std::size_t c = 0; c < rel_[r].size(); ++c) out.set_code(r, c, rel_[r][c] == static_cast<std::uint8_t>(Truth::True));
  for (std::size_t f = 0; f < fun_.size(); ++f)
    for (std::size_t c = 0; c < fun_[f].size(); ++c) out.set_value_code(f, c, fun_[f][c] == kUnset ? 0 : fun_[f][c]);
  return out;
}

std::vector<CompiledFormula> compile_all(const std::vector<Formula>& formulas, const Vocabulary& vocab) {
  std::vector<CompiledFormula> out;
  out.reserve(formulas.size());
  for (const auto& f : formulas) out.emplace_back(f, vocab);
  return out;
}

namespace {

struct Cell {
  bool relation;
  std::size_t table;
  std::size_t code;
};

class Searcher {
 public:
  Searcher(const PartialStructure& start, const std::vector<CompiledFormula>& sentences,
           const std::function<bool(const Structure&)>& visit, const SearchOptions& options)
      : state_(start), sentences_(sentences), visit_(visit), options_(options) {
    const auto& vocab = start.vocabulary();
    rel_watch_.resize(vocab.relations().size());
    fun_watch_.resize(vocab.functions().size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      for (auto r : sentences[i].relations_used()) rel_watch_[r].push_back(i);
      for (auto f : sentences[i].functions_used()) fun_watch_[f].push_back(i);
    }
    // Functions first: relation atoms over function terms stay unknown until
    // the function values are in.
    for (std::size_t f = 0; f < vocab.functions().size(); ++f) {
      if (options.relevant_symbols_only && fun_watch_[f].empty()) continue;
      for (std::size_t c = 0; c < start.function_cells(f); ++c)
        if (!start.function(f, c)) cells_.push_back({false, f, c});
    }
    for (std::size_t r = 0; r < vocab.relations().size(); ++r) {
      if (options.relevant_symbols_only && rel_watch_[r].empty()) continue;
      for (std::size_t c = 0; c < start.relation_cells(r); ++c)
        if (start.relation(r, c) == Truth::Unknown) cells_.push_back({true, r, c});
    }
    std::size_t slots = 0;
    for (const auto& s : sentences) slots = std::max<std::size_t>(slots, s.variable_slots());
    env_.assign(slots, -1);
  }

  SearchStats run() {
    for (const auto& s : sentences_)
      if (s.evaluate(state_, env_) == Truth::False) return stats_;
    descend(0);
    return stats_;
  }

 private:
  bool consistent_after(const Cell& cell) {
    const auto& watch = cell.relation ? rel_watch_[cell.table] : fun_watch_[cell.table];
    for (auto i : watch)
      if (sentences_[i].evaluate(state_, env_) == Truth::False) return false;
    return true;
  }

  // Returns false once the callback asks to stop.
  bool descend(std::size_t depth) {
    if (++stats_.nodes > options_.node_limit) throw BudgetExceeded("model search exceeded its node limit");
    if (depth == cells_.size()) {
      // Sentences reading only unbranched symbols were settled in run(); the
      // rest are definite here unless they read unbranched unknown cells, which
      // complete() fixes. Re-check on the completed structure to be exact.
      const Structure m = state_.complete();
      const DefiniteModel dm(m);
      for (const auto& s : sentences_)
        if (s.evaluate(dm, env_) != Truth::True) return true;
      ++stats_.solutions;
      return visit_(m);
    }
    const Cell& cell = cells_[depth];
    bool keep_going = true;
    if (cell.relation) {
      for (Truth t : {Truth::False, Truth::True}) {
        state_.set_relation(cell.table, cell.code, t);
        if (consistent_after(cell)) keep_going = descend(depth + 1);
        if (!keep_going) break;
      }
      state_.set_relation(cell.table, cell.code, Truth::Unknown);
    } else {
      for (std::uint32_t v = 0; v < state_.size(); ++v) {
        state_.set_function(cell.table, cell.code, v);
        if (consistent_after(cell)) keep_going = descend(depth + 1);
        if (!keep_going) break;
      }
      state_.set_function(cell.table, cell.code, PartialStructure::kUnset);
    }
    return keep_going;
  }

  PartialStructure state_;
  const std::vector<CompiledFormula>& sentences_;
  const std::function<bool(const Structure&)>& visit_;
  const SearchOptions& options_;
  std::vector<std::vector<std::size_t>> rel_watch_;
  std::vector<std::vector<std::size_t>> fun_watch_;
  std::vector<Cell> cells_;
  std::vector<std::int64_t> env_;
  SearchStats stats_;
};

}  // namespace

SearchStats search_models(const PartialStructure& start, const std::vector<CompiledFormula>& sentences,
                          const std::function<bool(const Structure&)>& visit, const SearchOptions& options) {
  for (const auto& s : sentences)
    if (!s.source().is_sentence()) throw EvaluationError("model search needs sentences: " + s.source().text());
  Searcher searcher(start, sentences, visit, options);
  return searcher.run();
}

std::optional<Structure> find_model(const PartialStructure& start, const std::vector<CompiledFormula>& sentences,
                                    const SearchOptions& options) {
  std::optional<Structure> found;
  search_models(
      start, sentences,
      [&](const Structure& m) {
        found = m;
        return false;
      },
      options);
  return found;
}

}  // namespace aecspace
