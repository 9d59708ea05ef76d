#include "aecspace/pipeline.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <set>

#include "aecspace/aec.hpp"
#include "aecspace/fragment.hpp"
#include "aecspace/gmetric.hpp"
#include "aecspace/logicspace.hpp"
#include "aecspace/presentation.hpp"

namespace aecspace {

bool RunResult::passed() const {
  return std::all_of(stages.begin(), stages.end(), [](const StageResult& s) { return s.passed(); });
}

std::vector<std::string> stages_for(const std::string& command) {
  if (command != "all") return {command};
  std::vector<std::string> out;
  for (const auto& c : command_names())
    if (c != "all") out.push_back(c);
  return out;
}

namespace {

CheckResult check(const std::string& name) { return CheckResult{name, true, 0, {}, {}}; }

void append(Report& into, const Report& from, const std::string& prefix = "") {
  for (auto c : from.checks) {
    c.name = prefix + c.name;
    into.checks.push_back(std::move(c));
  }
}

// Shared, lazily built objects of one run.
class Context {
 public:
  Context(const RunConfig& config, std::ostream* log) : config_(config), log_(log) {}

  template <class F>
  auto timed(const std::string& what, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto result = f();
    if (log_)
      *log_ << "  " << what << ": "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << "s\n";
    return result;
  }

  const RunConfig& config() const { return config_; }

  const ToyAEC& aec() {
    if (!aec_) aec_ = make_aec(config_.aec);
    return *aec_;
  }

  const Report& validation() {
    if (!validation_) validation_ = timed("validate", [&] { return validate_aec(aec()); });
    return *validation_;
  }

  const PresentationTheory& theory() {
    if (!theory_) theory_ = timed("presentation", [&] { return build_presentation(aec(), config_.tuple_budget()); });
    return *theory_;
  }

  const Fragment& fragment() {
    if (!fragment_)
      fragment_ = timed("fragment", [&] {
        return fragment_closure(theory().formulas(), theory().vocab.tau_star, config_.budgets.fragment);
      });
    return *fragment_;
  }

  const SentenceIndex& sentences(std::uint32_t n) {
    auto it = sentences_.find(n);
    if (it == sentences_.end()) {
      auto s = timed("sentences n=" + std::to_string(n),
                     [&] { return SentenceIndex::build(fragment(), n, config_.budgets.sentence_count); });
      it = sentences_.emplace(n, std::move(s)).first;
    }
    return it->second;
  }

  std::vector<Structure> expansions(std::uint32_t n) {
    std::vector<Structure> out;
    for (const auto& m : members(aec(), n)) out.push_back(expand(aec(), theory(), m));
    return out;
  }

  // Reproducible pseudo-random structures; raw generator bits keep the
  // stream independent of the standard library's distributions.
  std::vector<Structure> samples(const VocabularyPtr& vocab, std::uint32_t n, std::uint32_t count) {
    std::mt19937_64 rng(0x5eed0000ull + n);
    std::vector<Structure> out;
    for (std::uint32_t k = 0; k < count; ++k) {
      Structure m(vocab, n);
      for (std::size_t r = 0; r < vocab->relations().size(); ++r)
        for (std::size_t code = 0; code < m.relation_table(r).size(); ++code) m.set_code(r, code, rng() & 1);
      for (std::size_t f = 0; f < vocab->functions().size(); ++f)
        for (std::size_t code = 0; code < m.function_table(f).size(); ++code)
          m.set_value_code(f, code, static_cast<std::uint32_t>(rng() % n));
      out.push_back(std::move(m));
    }
    return out;
  }

 private:
  const RunConfig& config_;
  std::ostream* log_;
  std::optional<ToyAEC> aec_;
  std::optional<Report> validation_;
  std::optional<PresentationTheory> theory_;
  std::optional<Fragment> fragment_;
  std::map<std::uint32_t, SentenceIndex> sentences_;
};

std::string first_failure(const Report& r) {
  for (const auto& c : r.checks)
    if (!c.passed) return c.name + ": " + c.counterexample;
  return "";
}

// ------------------------------------------------------------------ stages

StageResult stage_validate(Context& ctx) {
  StageResult out;
  out.report = ctx.validation();
  out.facts["class"] = ctx.aec().describe();
  return out;
}

StageResult stage_build(Context& ctx) {
  StageResult out;
  const auto& t = ctx.theory();
  out.artifacts["tau_star.txt"] = serialize(*t.vocab.tau_star);
  out.artifacts["tstar.txt"] = export_Tstar(t);
  out.facts["blocks"] = std::to_string(t.catalog.blocks.size());
  out.facts["pair-classes"] = std::to_string(t.catalog.pairs.size());
  out.facts["axioms"] = std::to_string(t.axioms.size());
  for (int schema = 1; schema <= 5; ++schema) out.facts["axioms-schema-" + std::to_string(schema)] = std::to_string(t.count(schema));
  if (!t.vocab.renamed.empty()) {
    std::string renamed;
    for (const auto& r : t.vocab.renamed) renamed += (renamed.empty() ? "" : "; ") + r;
    out.facts["renamed"] = renamed;
  }

  auto schemata = check("tstar-schemata");
  for (int schema = 1; schema <= 5; ++schema) {
    ++schemata.cases;
    if (t.count(schema) == 0) schemata.fail("schema " + std::to_string(schema) + " is empty");
  }
  out.report.checks.push_back(schemata);

  const auto& fr = ctx.fragment();
  std::size_t seed_derived = 0;
  for (const auto& m : fr.members()) seed_derived += fr.is_seed_derived(m);
  out.facts["fragment-members"] = std::to_string(fr.size());
  out.facts["fragment-seed-derived"] = std::to_string(seed_derived);
  out.facts["fragment-terms"] = std::to_string(fr.terms().size());
  append(out.report, ctx.timed("fragment audit", [&] { return audit_fragment(fr); }), "fragment-");

  auto idempotent = check("fragment-closure-idempotent");
  const auto again = ctx.timed("fragment reclosure", [&] {
    return fragment_closure(fr.members(), fr.vocabulary(), fr.budget());
  });
  idempotent.cases = again.size();
  if (again.size() != fr.size()) {
    idempotent.fail("reclosure has " + std::to_string(again.size()) + " members, not " + std::to_string(fr.size()));
  } else {
    for (const auto& m : again.members())
      if (!fr.contains(m)) {
        idempotent.fail("reclosure adds " + m.text());
        break;
      }
  }
  out.report.checks.push_back(idempotent);
  return out;
}

StageResult stage_verify(Context& ctx) {
  StageResult out;
  auto valid = check("aec-valid");
  valid.cases = 1;
  if (!ctx.validation().passed()) {
    valid.fail("validate-aec failed, " + first_failure(ctx.validation()));
    out.report.checks.push_back(valid);
    return out;
  }
  out.report.checks.push_back(valid);
  VerifyOptions options;
  options.search_cap = ctx.config().budgets.search_cap;
  append(out.report, ctx.timed("verify", [&] { return verify_presentation(ctx.aec(), ctx.theory(), options); }));
  return out;
}

StageResult stage_encode(Context& ctx) {
  StageResult out;
  const auto n = ctx.config().budgets.universe;
  const auto& s = ctx.sentences(n);
  out.facts["universe"] = std::to_string(n);
  out.facts["sentences"] = std::to_string(s.size());
  out.facts["sentences-atomic"] = std::to_string(s.atomic_count());
  out.facts["sentences-truncated"] = s.truncated() ? "yes" : "no";
  out.artifacts["sentences.txt"] = [&] {
    std::string text;
    for (const auto& f : s.sentences()) text += f.text() + "\n";
    return text;
  }();

  auto domain = ctx.expansions(n);
  const auto expansions = domain.size();
  for (auto& m : ctx.samples(s.vocabulary(), n, ctx.config().budgets.samples)) domain.push_back(std::move(m));

  // The encoder's compiled path against one formula-at-a-time evaluation.
  auto agrees = check("encode-agrees-with-evaluation");
  std::vector<TheoryFunction> codes;
  for (std::size_t k = 0; k < domain.size(); ++k) {
    codes.push_back(encode(domain[k], s));
    if (k >= expansions) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      ++agrees.cases;
      if (codes.back().value(i) != evaluate(domain[k], s.at(i)))
        agrees.fail(s.at(i).text() + " on " + serialize(domain[k]));
    }
  }
  out.report.checks.push_back(agrees);

  auto injective = check("encode-injective");
  for (std::size_t a = 0; a < domain.size(); ++a)
    for (std::size_t b = a + 1; b < domain.size(); ++b) {
      ++injective.cases;
      if (domain[a] != domain[b] && codes[a] == codes[b])
        injective.fail(serialize(domain[a]) + " and " + serialize(domain[b]) + " share a code");
    }
  injective.note = std::to_string(expansions) + " expansions, " + std::to_string(domain.size() - expansions) + " samples";
  out.report.checks.push_back(injective);
  out.report.checks.push_back(atomic_determination(s));

  for (std::size_t k = 0; k < expansions; ++k)
    out.artifacts["theory-" + std::to_string(k) + ".txt"] = "# " + domain[k].signature() + "\n" + serialize(codes[k], s);
  return out;
}

StageResult stage_decode(Context& ctx) {
  StageResult out;
  const auto& b = ctx.config().budgets;
  const auto& a = ctx.aec();
  const auto& t = ctx.theory();

  auto tau = check("roundtrip-tau");
  for (std::uint32_t n = 1; n <= b.roundtrip_size; ++n) {
    const auto s = SentenceIndex::atomic(a.vocab, n);
    for_each_structure(a.vocab, n, [&](const Structure& m) {
      ++tau.cases;
      if (decode(encode(m, s), s) != m) tau.fail(serialize(m));
      return true;
    }, std::uint64_t{1} << 16);
  }
  out.report.checks.push_back(tau);

  auto expansions = check("roundtrip-expansions");
  auto sampled = check("roundtrip-sampled");
  for (std::uint32_t n = 1; n <= std::max(a.cap, b.roundtrip_size); ++n) {
    const auto s = SentenceIndex::atomic(t.vocab.tau_star, n);
    if (n <= a.cap)
      for (const auto& m : ctx.expansions(n)) {
        ++expansions.cases;
        if (decode(encode(m, s), s) != m) expansions.fail(serialize(m));
      }
    if (n <= b.roundtrip_size)
      for (const auto& m : ctx.samples(t.vocab.tau_star, n, b.samples)) {
        ++sampled.cases;
        if (decode(encode(m, s), s) != m) sampled.fail(serialize(m));
      }
  }
  out.report.checks.push_back(expansions);
  out.report.checks.push_back(sampled);

  // Truth in the decoded structure matches f on every listed sentence.
  auto induction = check("decode-induction");
  const auto& s = ctx.sentences(b.universe);
  for (const auto& m : ctx.expansions(b.universe)) {
    const auto f = encode(m, s);
    const auto back = decode(f, s);
    const DefiniteModel model(back);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ++induction.cases;
      if ((s.compiled(i).evaluate(model) == Truth::True) != f.value(i)) induction.fail(s.at(i).text());
    }
  }
  out.report.checks.push_back(induction);

  auto rejects = check("decode-rejects-bad-witnesses");
  const auto& vocab = *t.vocab.tau_star;
  const auto fn = std::find_if(vocab.functions().begin(), vocab.functions().end(), [](const Symbol&) { return true; });
  if (fn == vocab.functions().end() || b.universe < 2) {
    rejects.note = "no function symbols or a one-element universe";
  } else {
    const auto members_n = ctx.expansions(b.universe);
    if (!members_n.empty()) {
      const auto f = encode(members_n.front(), s);
      const Term value = Term::apply(fn->name, std::vector<Term>(fn->arity, Term::element(0)));
      auto twice = f, none = f;
      for (std::uint32_t l = 0; l < b.universe; ++l) {
        const auto i = s.find(Formula::equals(value, Term::element(l)));
        if (!i) continue;
        twice.set(*i, true);
        none.set(*i, false);
      }
      auto expect = [&](const TheoryFunction& g, DecodeError::Kind kind, const std::string& label) {
        ++rejects.cases;
        try {
          decode(g, s);
          rejects.fail(label + " decoded without complaint");
        } catch (const DecodeError& e) {
          if (e.kind() != kind) rejects.fail(label + " raised the wrong error: " + e.what());
        }
      };
      expect(twice, DecodeError::Kind::MultipleWitnesses, "two witnesses");
      expect(none, DecodeError::Kind::NoWitness, "no witness");
    }
  }
  out.report.checks.push_back(rejects);
  return out;
}

StageResult stage_check_b(Context& ctx) {
  StageResult out;
  const auto& b = ctx.config().budgets;
  const BOptions options{b.subset_arity, b.consistency_limit};

  auto members_ok = check("expansions-in-B");
  for (std::uint32_t n = 1; n <= ctx.aec().cap; ++n) {
    const auto& s = ctx.sentences(n);
    for (const auto& m : ctx.expansions(n)) {
      ++members_ok.cases;
      const auto verdict = check_B_membership(encode(m, s), s, options);
      if (!verdict.member)
        members_ok.fail(serialize(m) + " violates condition " + std::to_string(verdict.violations.front().condition) +
                        ": " + verdict.violations.front().witness);
    }
  }
  out.report.checks.push_back(members_ok);

  // Each damage is tried on the expansions in order until the index has room
  // for it; the verdict must name the expected condition.
  auto corrupted = [&](const std::string& name, auto corrupt, auto accept) {
    auto c = check(name);
    c.cases = 1;
    for (std::uint32_t n = 1; n <= ctx.aec().cap; ++n) {
      const auto& s = ctx.sentences(n);
      for (const auto& m : ctx.expansions(n)) {
        const auto g = corrupt(encode(m, s), s);
        if (!g) continue;
        const auto verdict = check_B_membership(*g, s, options);
        std::string named;
        for (const auto& v : verdict.violations) named += (named.empty() ? "" : ",") + std::to_string(v.condition);
        c.note = "size " + std::to_string(n) + ", violated {" + named + "}";
        if (!accept(verdict)) c.fail("verdict names {" + named + "}");
        return c;
      }
    }
    c.fail("no expansion leaves room for this damage");
    return c;
  };
  out.report.checks.push_back(corrupted("reject-double-truth", corrupt_double_truth,
                                        [](const BMembership& v) { return !v.member && v.violates(2); }));
  out.report.checks.push_back(corrupted("reject-missing-witness", corrupt_missing_witness,
                                        [](const BMembership& v) { return !v.member && v.violates(4); }));
  out.report.checks.push_back(corrupted("reject-inconsistent-subset", corrupt_inconsistent_subset, [](const BMembership& v) {
    return !v.member && v.violations.size() == 1 && v.violates(1);
  }));
  return out;
}

StageResult stage_gdelta(Context& ctx) {
  StageResult out;
  const auto& b = ctx.config().budgets;
  const auto small = truncated_index(ctx.sentences(b.universe), b.gdelta_sentences);
  const BOptions options{b.subset_arity, b.consistency_limit};
  out.facts["sentences"] = std::to_string(small.size());
  out.facts["subset-arity"] = std::to_string(b.subset_arity);
  std::string listing;
  for (const auto& f : small.sentences()) listing += f.text() + "\n";
  out.artifacts["gdelta-sentences.txt"] = listing;
  out.artifacts["gdelta-witnesses.txt"] = export_witnesses(gdelta_witnesses(small, options), small);
  out.report = ctx.timed("gdelta", [&] { return gdelta_equivalence(small, options); });
  return out;
}

StageResult stage_continuity(Context& ctx) {
  StageResult out;
  const auto& b = ctx.config().budgets;
  const auto n = b.universe;
  ContinuityOptions options;
  options.condition_size = b.condition_size;

  // Expanded vocabulary: expansions plus reproducible samples as the domain,
  // fragment members as the basis.
  {
    const auto& s = ctx.sentences(n);
    auto domain = ctx.expansions(n);
    for (auto& m : ctx.samples(s.vocabulary(), n, b.samples)) domain.push_back(std::move(m));
    BasisOptions bo;
    bo.max_sets = b.basis_sets;
    const auto base = basis(BasisMode::Fragment, s.vocabulary(), n, bo, &ctx.fragment());
    out.facts["tau-star-basis-sets"] = std::to_string(base.sets.size());
    out.facts["tau-star-basis-truncated"] = base.truncated ? "yes" : "no";
    out.facts["tau-star-domain"] = std::to_string(domain.size());
    append(out.report, ctx.timed("continuity tau*", [&] { return continuity_check(s, domain, base, options); }), "tau-star-");
  }
  // Base vocabulary: every structure of size n.
  {
    BasisOptions bo;
    bo.max_sets = b.basis_sets;
    const auto fr = fragment_closure({}, ctx.aec().vocab, bo.budget);
    const auto s = SentenceIndex::build(fr, n, b.sentence_count);
    const auto domain = all_structures(s);
    for (auto mode : {BasisMode::QuantifierFree, BasisMode::FirstOrder}) {
      const auto base = basis(mode, s.vocabulary(), n, bo);
      out.facts["tau-" + to_string(mode) + "-basis-sets"] = std::to_string(base.sets.size());
      auto weight = check("tau-" + to_string(mode) + "-weight");
      weight.cases = base.sets.size();
      if (base.sets.size() > b.basis_sets) weight.fail("basis exceeds the budget");
      weight.note = std::to_string(base.sets.size()) + " sets from " + std::to_string(base.formulas) + " formulas";
      out.report.checks.push_back(weight);
      append(out.report, continuity_check(s, domain, base, options), "tau-" + to_string(mode) + "-");
    }
    out.facts["tau-domain"] = std::to_string(domain.size());
    out.facts["tau-sentences"] = std::to_string(s.size());
  }
  return out;
}

StageResult stage_intersection(Context& ctx) {
  StageResult out;
  const auto top = ctx.config().budgets.intersection_size;
  for (std::uint32_t n = 1; n <= top; ++n)
    append(out.report, class_as_intersection(ctx.aec(), ctx.theory(), n), "size-" + std::to_string(n) + "-");
  append(out.report, covering_ablation(ctx.aec(), ctx.theory(), top));
  return out;
}

StageResult stage_metric(Context& ctx) {
  StageResult out;
  const auto& b = ctx.config().budgets;
  append(out.report, verify_metric(b.metric_alphabet, b.metric_length, b.metric_degree), "metric-");
  append(out.report, verify_group(b.metric_degree, b.group_support, b.group_bound), "group-");
  append(out.report, cauchy_demos(b.metric_alphabet, b.metric_length, b.metric_degree));
  for (std::uint32_t length = 1; length <= b.metric_length; ++length) {
    std::uint64_t points = 1;
    for (std::uint32_t i = 0; i < length; ++i) points *= b.metric_alphabet;
    out.facts["triples-length-" + std::to_string(length)] = std::to_string(points * points * points);
  }
  out.facts["degree"] = std::to_string(b.metric_degree);
  return out;
}

StageResult run_stage(const std::string& name, Context& ctx) {
  static const std::map<std::string, StageResult (*)(Context&)> table = {
      {"validate-aec", stage_validate},     {"build-presentation", stage_build},
      {"verify-presentation", stage_verify}, {"encode", stage_encode},
      {"decode", stage_decode},              {"check-b", stage_check_b},
      {"gdelta-check", stage_gdelta},        {"continuity-check", stage_continuity},
      {"class-intersection", stage_intersection}, {"metric-demo", stage_metric},
  };
  StageResult out;
  try {
    out = table.at(name)(ctx);
  } catch (const Error& e) {
    auto c = check("stage-error");
    c.fail(e.what());
    out.report.checks.push_back(c);
  }
  out.stage = name;
  return out;
}

nlohmann::json to_json(const StageResult& s) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : s.report.checks)
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"cases", c.cases},
                      {"counterexample", c.counterexample},
                      {"note", c.note}});
  return {{"stage", s.stage}, {"passed", s.passed()}, {"checks", checks}, {"facts", s.facts}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

RunResult run_pipeline(const RunConfig& config, std::ostream* log) {
  RunResult result;
  result.hash = config_hash(config);
  Context ctx(config, log);
  for (const auto& stage : stages_for(config.command)) {
    if (log) *log << stage << "\n";
    const auto start = std::chrono::steady_clock::now();
    result.stages.push_back(run_stage(stage, ctx));
    if (log)
      *log << stage << (result.stages.back().passed() ? " pass " : " FAIL ")
           << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << "s\n";
  }
  return result;
}

std::string output_root(const RunConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  if (const char* env = std::getenv("AECSPACE_OUT"); env && *env) return env;
  return "reports";
}

std::string render_text(const StageResult& s) {
  std::string out = "stage: " + s.stage + "\nstatus: " + (s.passed() ? "pass" : "fail") + "\n";
  for (const auto& [k, v] : s.facts) out += "fact " + k + ": " + v + "\n";
  for (const auto& c : s.report.checks) {
    out += "check " + c.name + ": " + (c.passed ? "pass" : "fail") + " (" + std::to_string(c.cases) + " cases)\n";
    if (!c.note.empty()) out += "  note: " + c.note + "\n";
    if (!c.counterexample.empty()) out += "  counterexample: " + c.counterexample + "\n";
  }
  return out;
}

std::string write_reports(const RunResult& result, const RunConfig& config, const std::string& root) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(root) / result.hash;
  fs::create_directories(dir);
  const bool text = config.format != "json", json = config.format != "text";

  nlohmann::json failures = nlohmann::json::array();
  nlohmann::json stages = nlohmann::json::array();
  std::string summary = "config: " + config.name + "\nhash: " + result.hash + "\ncommand: " + config.command + "\n";
  for (const auto& s : result.stages) {
    if (text) write_file(dir / (s.stage + ".txt"), render_text(s));
    if (json) write_file(dir / (s.stage + ".json"), to_json(s).dump(2) + "\n");
    if (!s.artifacts.empty()) {
      fs::create_directories(dir / "artifacts" / s.stage);
      for (const auto& [name, contents] : s.artifacts) write_file(dir / "artifacts" / s.stage / name, contents);
    }
    for (const auto& c : s.report.checks)
      if (!c.passed) failures.push_back({{"stage", s.stage}, {"check", c.name}, {"counterexample", c.counterexample}});
    summary += s.stage + ": " + (s.passed() ? "pass" : "fail") + "\n";
    stages.push_back({{"stage", s.stage}, {"passed", s.passed()}});
  }
  summary += std::string("overall: ") + (result.passed() ? "pass" : "fail") + "\n\n" + canonical_text(config);
  if (text) write_file(dir / "summary.txt", summary);
  if (json)
    write_file(dir / "summary.json", nlohmann::json{{"config", config.name},
                                                    {"hash", result.hash},
                                                    {"command", config.command},
                                                    {"passed", result.passed()},
                                                    {"stages", stages}}
                                             .dump(2) +
                                         "\n");
  write_file(dir / "failures.json", failures.dump(2) + "\n");
  return dir.string();
}

}  // namespace aecspace
