#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace aecspace {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::uint64_t cases = 0;
  std::string counterexample;  // first failure, empty on success
  std::string note;            // free-form detail, e.g. counts

  void fail(const std::string& why) {
    if (passed) counterexample = why;
    passed = false;
  }
};

struct Report {
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

}  // namespace aecspace
