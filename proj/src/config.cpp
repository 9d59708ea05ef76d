#include "aecspace/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace aecspace {

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "validate-aec", "build-presentation", "verify-presentation", "encode",        "decode", "check-b",
      "gdelta-check", "continuity-check",   "class-intersection",  "metric-demo",   "all"};
  return names;
}

namespace {

std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.is_null()) return "";
  return " at " + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1);
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + text + "'", {key});
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'", {key});
}

using Setter = std::function<void(Budgets&, const std::string& key, const std::string& value)>;

template <class Int>
Setter positive(Int Budgets::*field) {
  return [field](Budgets& b, const std::string& key, const std::string& v) {
    const auto x = parse_int<Int>(key, v);
    if (x <= 0) throw ConfigError(key + " must be positive", {key});
    b.*field = x;
  };
}

template <class Int>
Setter positive_fragment(Int FragmentBudget::*field) {
  return [field](Budgets& b, const std::string& key, const std::string& v) {
    const auto x = parse_int<Int>(key, v);
    if (x <= 0) throw ConfigError(key + " must be positive", {key});
    b.fragment.*field = x;
  };
}

// Budget keys as written in YAML; the command line uses dashes and a
// "fragment-" prefix for the nested ones.
const std::map<std::string, Setter>& budget_setters() {
  static const std::map<std::string, Setter> setters = {
      {"tuple_length", positive(&Budgets::tuple_length)},
      {"search_cap", positive(&Budgets::search_cap)},
      {"sentence_count", positive(&Budgets::sentence_count)},
      {"universe", positive(&Budgets::universe)},
      {"subset_arity", positive(&Budgets::subset_arity)},
      {"consistency_limit", positive(&Budgets::consistency_limit)},
      {"gdelta_sentences", positive(&Budgets::gdelta_sentences)},
      {"condition_size", positive(&Budgets::condition_size)},
      {"basis_sets", positive(&Budgets::basis_sets)},
      {"roundtrip_size", positive(&Budgets::roundtrip_size)},
      {"samples", positive(&Budgets::samples)},
      {"intersection_size", positive(&Budgets::intersection_size)},
      {"metric_alphabet", positive(&Budgets::metric_alphabet)},
      {"metric_length", positive(&Budgets::metric_length)},
      {"metric_degree", positive(&Budgets::metric_degree)},
      {"group_support", positive(&Budgets::group_support)},
      {"group_bound", positive(&Budgets::group_bound)},
      {"fragment.variables", positive_fragment(&FragmentBudget::variables)},
      {"fragment.max_free", positive_fragment(&FragmentBudget::max_free)},
      {"fragment.seed_free", positive_fragment(&FragmentBudget::seed_free)},
      {"fragment.max_depth", positive_fragment(&FragmentBudget::max_depth)},
      {"fragment.max_width", positive_fragment(&FragmentBudget::max_width)},
      {"fragment.max_count", positive_fragment(&FragmentBudget::max_count)},
      {"fragment.max_term_depth",
       [](Budgets& b, const std::string& key, const std::string& v) {
         b.fragment.max_term_depth = parse_int<std::uint32_t>(key, v);  // 0 allowed: no function terms
       }},
      {"fragment.seed_substitution",
       [](Budgets& b, const std::string& key, const std::string& v) { b.fragment.seed_substitution = parse_bool(key, v); }},
  };
  return setters;
}

std::string cli_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  std::replace(key.begin(), key.end(), '.', '-');
  return key;
}

void validate(const RunConfig& c) {
  std::vector<std::string> bad;
  std::string why;
  auto flag = [&](const std::string& key, const std::string& reason) {
    bad.push_back(key);
    why += (why.empty() ? "" : "; ") + key + " " + reason;
  };
  const auto& b = c.budgets;
  if (c.aec.block_bound == 0) flag("aec.b", "must be positive");
  if (c.aec.cap < c.aec.block_bound) flag("aec.cap", "must be at least b");
  if (b.tuple_length != 0 && b.tuple_length < c.aec.block_bound) flag("budgets.tuple_length", "must be at least b");
  if (b.gdelta_sentences > 20) flag("budgets.gdelta_sentences", "must be at most 20");
  if (b.metric_length > b.metric_degree) flag("budgets.metric_length", "must not exceed metric_degree");
  if (b.group_support > b.metric_degree) flag("budgets.group_support", "must not exceed metric_degree");
  if (b.metric_alphabet < 2) flag("budgets.metric_alphabet", "must be at least 2");
  if (std::find(command_names().begin(), command_names().end(), c.command) == command_names().end())
    flag("command", "is not one of the documented commands");
  if (c.format != "text" && c.format != "json" && c.format != "both") flag("format", "must be text, json or both");
  if (!bad.empty()) throw ConfigError("invalid config: " + why, bad);
}

// Reports every key of `node` outside `allowed`, prefixed for the message.
void check_keys(const YAML::Node& node, const std::vector<std::string>& allowed, const std::string& prefix,
                std::vector<std::string>& unknown) {
  if (!node.IsMap()) throw ConfigError((prefix.empty() ? "config" : prefix) + " must be a mapping" + where(node), {prefix});
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      unknown.push_back(prefix.empty() ? key : prefix + "." + key);
  }
}

std::string scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key + " must be a scalar" + where(node), {key});
  return node.Scalar();
}

void read_symbols(const YAML::Node& node, const std::string& key, Vocabulary& vocab, bool relations) {
  if (!node) return;
  if (!node.IsMap()) throw ConfigError(key + " must map names to arities" + where(node), {key});
  for (const auto& kv : node) {
    const auto name = kv.first.as<std::string>();
    const auto arity = parse_int<std::uint32_t>(key + "." + name, scalar(kv.second, key + "." + name));
    try {
      if (relations) vocab.add_relation(name, arity);
      else vocab.add_function(name, arity);
    } catch (const Error& e) {
      throw ConfigError(key + "." + name + ": " + e.what() + where(kv.first), {key + "." + name});
    }
  }
}

}  // namespace

std::vector<std::string> budget_names() {
  std::vector<std::string> out;
  for (const auto& [key, setter] : budget_setters()) out.push_back(cli_name(key));
  return out;
}

void apply_budget_override(RunConfig& config, const std::string& name, const std::string& value) {
  for (const auto& [key, setter] : budget_setters())
    if (cli_name(key) == name) {
      setter(config.budgets, "budget-" + name, value);
      validate(config);
      return;
    }
  throw ConfigError("unknown budget '" + name + "'", {"budget-" + name});
}

RunConfig parse_config_text(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, static_cast<std::size_t>(e.mark.line + 1), static_cast<std::size_t>(e.mark.column + 1));
  }
  if (root.IsNull()) throw ConfigError("empty config", {});

  std::vector<std::string> unknown;
  check_keys(root, {"name", "command", "format", "out", "aec", "budgets"}, "", unknown);
  const auto aec = root["aec"];
  if (aec) check_keys(aec, {"vocabulary", "class", "params", "strong", "strong_predicate", "b", "cap"}, "aec", unknown);
  if (aec && aec["vocabulary"])
    check_keys(aec["vocabulary"], {"relations", "functions", "constants"}, "aec.vocabulary", unknown);
  const auto budgets = root["budgets"];
  std::vector<std::string> flat_budget_keys{"fragment"}, fragment_keys;
  for (const auto& [key, setter] : budget_setters()) {
    if (key.rfind("fragment.", 0) == 0) fragment_keys.push_back(key.substr(9));
    else flat_budget_keys.push_back(key);
  }
  if (budgets) check_keys(budgets, flat_budget_keys, "budgets", unknown);
  if (budgets && budgets["fragment"]) check_keys(budgets["fragment"], fragment_keys, "budgets.fragment", unknown);
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("unknown config keys: " + list, unknown);
  }

  RunConfig c;
  if (root["name"]) c.name = scalar(root["name"], "name");
  if (root["command"]) c.command = scalar(root["command"], "command");
  if (root["format"]) c.format = scalar(root["format"], "format");
  if (root["out"]) c.out_dir = scalar(root["out"], "out");

  if (aec) {
    if (const auto v = aec["vocabulary"]) {
      read_symbols(v["relations"], "aec.vocabulary.relations", c.aec.vocab, true);
      read_symbols(v["functions"], "aec.vocabulary.functions", c.aec.vocab, false);
      if (const auto k = v["constants"]) {
        if (!k.IsSequence()) throw ConfigError("aec.vocabulary.constants must be a list" + where(k), {"aec.vocabulary.constants"});
        for (const auto& name : k) {
          try {
            c.aec.vocab.add_constant(scalar(name, "aec.vocabulary.constants"));
          } catch (const ConfigError&) {
            throw;
          } catch (const Error& e) {
            throw ConfigError(std::string("aec.vocabulary.constants: ") + e.what() + where(name), {"aec.vocabulary.constants"});
          }
        }
      }
    }
    if (aec["class"]) c.aec.class_name = scalar(aec["class"], "aec.class");
    if (aec["strong"]) c.aec.strong_name = scalar(aec["strong"], "aec.strong");
    if (aec["strong_predicate"]) c.aec.strong_predicate = scalar(aec["strong_predicate"], "aec.strong_predicate");
    if (const auto p = aec["params"]) {
      if (!p.IsMap()) throw ConfigError("aec.params must be a mapping" + where(p), {"aec.params"});
      for (const auto& kv : p) c.aec.params[kv.first.as<std::string>()] = scalar(kv.second, "aec.params");
    }
    if (aec["b"]) c.aec.block_bound = parse_int<std::uint32_t>("aec.b", scalar(aec["b"], "aec.b"));
    if (aec["cap"]) c.aec.cap = parse_int<std::uint32_t>("aec.cap", scalar(aec["cap"], "aec.cap"));
  }
  if (c.aec.vocab.symbol_count() == 0) c.aec.vocab.add_relation("E", 2);
  if (c.aec.block_bound == 0) throw ConfigError("aec.b must be positive" + where(aec["b"]), {"aec.b"});

  c.budgets.fragment = FragmentBudget::for_block_bound(c.aec.block_bound);
  if (budgets) {
    const auto& setters = budget_setters();
    for (const auto& kv : budgets) {
      const auto key = kv.first.as<std::string>();
      if (key == "fragment") {
        for (const auto& f : kv.second) {
          const auto full = "fragment." + f.first.as<std::string>();
          setters.at(full)(c.budgets, "budgets." + full, scalar(f.second, "budgets." + full));
        }
      } else {
        setters.at(key)(c.budgets, "budgets." + key, scalar(kv.second, "budgets." + key));
      }
    }
  }
  validate(c);
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path, {});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

std::string canonical_text(const RunConfig& c) {
  std::ostringstream out;
  out << "name: " << c.name << "\n";
  std::istringstream symbols(serialize(c.aec.vocab));
  for (std::string line; std::getline(symbols, line);) out << "vocabulary " << line << "\n";
  out << "class: " << c.aec.class_name << "\n";
  out << "strong: " << c.aec.strong_name << "\n";
  out << "strong_predicate: " << c.aec.strong_predicate << "\n";
  for (const auto& [k, v] : c.aec.params) out << "param " << k << ": " << v << "\n";
  out << "b: " << c.aec.block_bound << "\n";
  out << "cap: " << c.aec.cap << "\n";
  const auto& b = c.budgets;
  const auto& f = b.fragment;
  out << "tuple_length: " << c.tuple_budget() << "\n"
      << "search_cap: " << b.search_cap << "\n"
      << "fragment.variables: " << f.variables << "\n"
      << "fragment.max_free: " << f.max_free << "\n"
      << "fragment.seed_free: " << f.seed_free << "\n"
      << "fragment.max_depth: " << f.max_depth << "\n"
      << "fragment.max_width: " << f.max_width << "\n"
      << "fragment.max_term_depth: " << f.max_term_depth << "\n"
      << "fragment.seed_substitution: " << (f.seed_substitution ? "true" : "false") << "\n"
      << "fragment.max_count: " << f.max_count << "\n"
      << "sentence_count: " << b.sentence_count << "\n"
      << "universe: " << b.universe << "\n"
      << "subset_arity: " << b.subset_arity << "\n"
      << "consistency_limit: " << b.consistency_limit << "\n"
      << "gdelta_sentences: " << b.gdelta_sentences << "\n"
      << "condition_size: " << b.condition_size << "\n"
      << "basis_sets: " << b.basis_sets << "\n"
      << "roundtrip_size: " << b.roundtrip_size << "\n"
      << "samples: " << b.samples << "\n"
      << "intersection_size: " << b.intersection_size << "\n"
      << "metric_alphabet: " << b.metric_alphabet << "\n"
      << "metric_length: " << b.metric_length << "\n"
      << "metric_degree: " << b.metric_degree << "\n"
      << "group_support: " << b.group_support << "\n"
      << "group_bound: " << b.group_bound << "\n"
      << "command: " << c.command << "\n"
      << "format: " << c.format << "\n";
  return out.str();
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a offset basis
  for (unsigned char ch : canonical_text(c)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace aecspace
