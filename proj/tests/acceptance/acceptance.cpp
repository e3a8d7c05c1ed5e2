#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "checks.hpp"

// One line per criterion: PASS only when every check holds and the runtime fits the budget.
int main(int argc, char** argv) {
  CLI::App cli{"acceptance criteria"};
  int only = 0;
  bool verbose = false;
  std::uint64_t seed = 1;
  int workers = 1;
  cli.add_option("--only", only, "run a single criterion (1-11)")->check(CLI::Range(0, 11));
  cli.add_option("--seed", seed, "master seed");
  cli.add_option("--workers", workers, "worker threads");
  cli.add_flag("--verbose,-v", verbose, "print every check");
  CLI11_PARSE(cli, argc, argv);

  cramerlab::checks::SuiteOptions opt;
  opt.seed = seed;
  opt.workers = workers;
  bool all_ok = true;
  for (const auto& info : cramerlab::checks::suites()) {
    if (only != 0 && info.criterion != only) continue;
    cramerlab::checks::SuiteReport rep;
    try {
      rep = cramerlab::checks::run_suite(info.name, opt);
    } catch (const std::exception& e) {
      rep.checks.push_back({"suite raised an exception", 1.0, 0.0, false, e.what()});
    }
    const bool in_time = rep.seconds <= info.budget_seconds;
    const bool ok = rep.passed() && in_time;
    all_ok = all_ok && ok;
    std::printf("[%s] C%02d %-18s %zu/%zu checks  %.2fs/%.0fs  %s\n", ok ? "PASS" : "FAIL", info.criterion,
                info.name.c_str(), rep.checks.size() - rep.failures(), rep.checks.size(), rep.seconds,
                info.budget_seconds, info.title.c_str());
    for (const auto& c : rep.checks) {
      if (!verbose && c.passed) continue;
      std::printf("    %s %s: %.6g (limit %.6g) %s\n", c.passed ? "ok  " : "FAIL", c.name.c_str(), c.value, c.limit,
                  c.detail.c_str());
    }
    if (!in_time) std::printf("    FAIL runtime %.1fs exceeds the %.0fs budget\n", rep.seconds, info.budget_seconds);
    std::fflush(stdout);
  }
  return all_ok ? 0 : 1;
}
