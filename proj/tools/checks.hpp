#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "app.hpp"

namespace cramerlab::checks {

/// One pinned comparison: passes when `value <= limit`.
struct CheckLine {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  int criterion = 0;
  std::string title;
  std::vector<CheckLine> checks;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  app::Json details = app::Json::object();

  bool passed() const;
  std::size_t failures() const;
  std::string summary_line() const;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  int workers = 1;
};

struct SuiteInfo {
  std::string name;
  int criterion;
  std::string title;
  double budget_seconds;
};

const std::vector<SuiteInfo>& suites();
const std::vector<std::string>& suite_names();

/// Runs one suite; `seconds` is filled in, the runtime budget is not enforced here.
SuiteReport run_suite(const std::string& name, const SuiteOptions& options = {});

app::Json to_json(const SuiteReport& report);

}  // namespace cramerlab::checks
