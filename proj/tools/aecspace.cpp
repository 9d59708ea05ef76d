// Command line front end: aecspace <command> --config <path> [--out <dir>]
// [--budget-<name> <value>]... Exit status 0 on pass, 1 on a failed check,
// 2 on usage or config errors.

#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "aecspace/config.hpp"
#include "aecspace/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace aecspace;
  CLI::App app{"Executable checks for abstract elementary classes and their logic spaces"};
  app.set_help_all_flag("--help-all", "Show every budget option");

  std::string command, config_path, out_dir, format;
  bool quiet = false;
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(command_names()));
  app.add_option("-c,--config", config_path, "YAML config file")->required();
  app.add_option("-o,--out", out_dir, "Report root (default: $AECSPACE_OUT, then ./reports)");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json", "both"}));
  app.add_flag("-q,--quiet", quiet, "No progress output on stderr");

  std::map<std::string, std::string> budgets;
  for (const auto& name : budget_names())
    app.add_option("--budget-" + name, budgets[name], "Budget override")->group("Budgets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunConfig config;
  try {
    config = parse_config(config_path);
    config.command = command;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!format.empty()) config.format = format;
    for (const auto& [name, value] : budgets)
      if (!value.empty()) apply_budget_override(config, name, value);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    for (const auto& key : e.keys()) std::cerr << "  offending key: " << key << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    const auto result = run_pipeline(config, quiet ? nullptr : &std::cerr);
    const auto dir = write_reports(result, config, output_root(config));
    for (const auto& stage : result.stages) {
      std::cout << stage.stage << ": " << (stage.passed() ? "pass" : "FAIL") << "\n";
      for (const auto& c : stage.report.checks)
        if (!c.passed) std::cout << "  " << c.name << ": " << c.counterexample << "\n";
    }
    std::cout << "reports: " << dir << "\n";
    return result.passed() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
