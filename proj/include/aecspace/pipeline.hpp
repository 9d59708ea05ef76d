#pragma once

// Stage runner behind the command line tool. Each stage yields a report and
// optional artifacts; writing them out is a separate step so results can be
// compared in memory.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "aecspace/config.hpp"
#include "aecspace/report.hpp"

namespace aecspace {

struct StageResult {
  std::string stage;
  Report report;
  std::map<std::string, std::string> facts;      // summary values, sorted by key
  std::map<std::string, std::string> artifacts;  // file name -> contents

  bool passed() const { return report.passed(); }
};

struct RunResult {
  std::string hash;
  std::vector<StageResult> stages;

  bool passed() const;
};

/// Stages executed by a command, in order.
std::vector<std::string> stages_for(const std::string& command);

/// Runs the configured command. Progress and timings go to `log` when given;
/// nothing time-dependent enters the results.
RunResult run_pipeline(const RunConfig& config, std::ostream* log = nullptr);

/// Output root: the config's `out`, then $AECSPACE_OUT, then "reports".
std::string output_root(const RunConfig& config);

/// Writes `<root>/<hash>/`: one text and/or JSON file per stage, artifacts
/// under artifacts/, summary files and failures.json. Returns the directory.
std::string write_reports(const RunResult& result, const RunConfig& config, const std::string& root);

/// Plain-text rendering of one stage.
std::string render_text(const StageResult& stage);

}  // namespace aecspace
