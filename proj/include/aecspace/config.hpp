#pragma once

// Run configuration: the AEC to study, the budgets of every stage, the
// command, and where reports go. Loaded from YAML.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aecspace/aec.hpp"
#include "aecspace/error.hpp"
#include "aecspace/fragment.hpp"

namespace aecspace {

/// A semantic problem in a config file; lists every offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::vector<std::string> keys) : Error(what), keys_(std::move(keys)) {}
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::vector<std::string> keys_;
};

struct Budgets {
  std::uint32_t tuple_length = 0;  // T* tuple budget; 0 means the block bound
  std::uint32_t search_cap = 2;    // exhaustive τ*-search sizes in verify-presentation
  FragmentBudget fragment;         // defaults follow the block bound
  std::uint64_t sentence_count = 4096;
  std::uint32_t universe = 2;           // n, the number of constants c_i
  std::uint32_t subset_arity = 3;
  std::uint64_t consistency_limit = 2'000'000;
  std::uint32_t gdelta_sentences = 12;  // size of the truncated index for gdelta-check
  std::uint32_t condition_size = 1;
  std::uint64_t basis_sets = 200'000;
  std::uint32_t roundtrip_size = 3;     // largest τ-structures in the round trip sweep
  std::uint32_t samples = 64;           // random τ*-structures per size
  std::uint32_t intersection_size = 2;  // largest n for class-intersection
  std::uint32_t metric_alphabet = 3;
  std::uint32_t metric_length = 4;
  std::uint32_t metric_degree = 4;
  std::uint32_t group_support = 3;
  std::int64_t group_bound = 2;
};

struct RunConfig {
  std::string name = "run";
  AecSpec aec;
  Budgets budgets;
  std::string command = "all";
  std::string out_dir;        // empty: $AECSPACE_OUT, then "reports"
  std::string format = "both";  // text | json | both

  std::uint32_t tuple_budget() const { return budgets.tuple_length ? budgets.tuple_length : aec.block_bound; }
};

const std::vector<std::string>& command_names();

/// Parses YAML text. Syntax errors become ParseError with line and column;
/// unknown keys and invalid values become ConfigError naming the keys.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::string& path);

/// Applies `--budget-<name> <value>`; names use dashes, e.g. sentence-count.
void apply_budget_override(RunConfig& config, const std::string& name, const std::string& value);
std::vector<std::string> budget_names();

/// Every field that affects results, one `key: value` per line, stable order.
std::string canonical_text(const RunConfig& config);
/// 16 hex digits of a 64-bit FNV-1a hash of canonical_text.
std::string config_hash(const RunConfig& config);

}  // namespace aecspace
