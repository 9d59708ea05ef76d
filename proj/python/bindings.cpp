#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "aecspace/aec.hpp"
#include "aecspace/config.hpp"
#include "aecspace/gmetric.hpp"
#include "aecspace/logicspace.hpp"
#include "aecspace/pipeline.hpp"
#include "aecspace/presentation.hpp"

namespace py = pybind11;
using namespace aecspace;

namespace {

py::dict report_dict(const Report& r) {
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict d;
    d["name"] = c.name;
    d["passed"] = c.passed;
    d["cases"] = c.cases;
    d["counterexample"] = c.counterexample;
    d["note"] = c.note;
    checks.append(d);
  }
  py::dict out;
  out["passed"] = r.passed();
  out["checks"] = checks;
  return out;
}

// Runs a config given as YAML text; returns stage name -> report and facts.
py::dict run(const std::string& yaml, const std::string& command) {
  auto config = parse_config_text(yaml);
  if (!command.empty()) config.command = command;
  RunResult result;
  {
    py::gil_scoped_release release;
    result = run_pipeline(config);
  }
  py::dict stages;
  for (const auto& s : result.stages) {
    auto d = report_dict(s.report);
    d["facts"] = s.facts;
    stages[py::str(s.stage)] = d;
  }
  py::dict out;
  out["hash"] = result.hash;
  out["passed"] = result.passed();
  out["stages"] = stages;
  return out;
}

AecSpec spec_from(const std::string& yaml) { return parse_config_text(yaml).aec; }

}  // namespace

PYBIND11_MODULE(_aecspace, m) {
  m.doc() = "Finite AEC presentations, theory-function spaces and group metrics";

  const auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  m.def("parse_formula", [](const std::string& text) { return parse_formula(text).text(); },
        "Parse a formula and print it back in normal form.");
  m.def("evaluate", [](const std::string& structure, const std::string& formula) {
    return evaluate(parse_structure(structure), parse_formula(formula));
  }, "Truth of a sentence in a serialized structure.");
  m.def("canonical", [](const std::string& structure) { return serialize(canonical_form(parse_structure(structure)).structure); },
        "Serialized canonical copy of a structure.");

  m.def("config_hash", [](const std::string& yaml) { return config_hash(parse_config_text(yaml)); });
  m.def("run", &run, py::arg("yaml"), py::arg("command") = "");

  m.def("members", [](const std::string& yaml, std::uint32_t size) {
    std::vector<std::string> out;
    for (const auto& s : members(make_aec(spec_from(yaml)), size)) out.push_back(serialize(s));
    return out;
  }, "Class members of the config's AEC on {0..size-1}, serialized.");
  m.def("validate_aec", [](const std::string& yaml) { return report_dict(validate_aec(make_aec(spec_from(yaml)))); });
  m.def("export_theory", [](const std::string& yaml) {
    const auto config = parse_config_text(yaml);
    const auto a = make_aec(config.aec);
    return export_Tstar(build_presentation(a, config.tuple_budget()));
  }, "The presentation theory as text.");

  m.def("encode_atomic", [](const std::string& structure) {
    const auto s = parse_structure(structure);
    const auto index = SentenceIndex::atomic(s.vocabulary_ptr(), s.size());
    return serialize(encode(s, index), index);
  }, "The atomic theory function of a structure, one sentence per line.");

  m.def("metric", [](const Sequence& x, const Sequence& y, std::uint32_t degree) {
    return first_difference_metric(x, y, degree).text();
  }, "First-difference distance as a sparse group element.");
  m.def("ball", [](const Sequence& x, std::uint32_t alpha, std::uint32_t degree) {
    return ball(x, GroupElement::unit(degree, alpha)).text();
  }, "The ball of radius r_alpha around x.");
  m.def("cauchy_limit", [](const std::vector<Sequence>& head, const std::vector<Sequence>& cycle, std::uint32_t degree) {
    const auto v = cauchy_and_limit(SequenceFamily{head, cycle}, degree);
    return py::make_tuple(v.is_cauchy, v.limit);
  }, "Whether the family is Cauchy, and its limit when it converges.");
}
