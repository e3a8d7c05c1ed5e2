#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "app.hpp"
#include "cramerlab/errors.hpp"

namespace {

constexpr int kConfigError = 2;

struct Args {
  std::string config;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;
  std::string suite;
};

int execute(const std::string& command, const Args& args, const CLI::App& sub) {
  using namespace cramerlab;
  app::Json resolved;
  try {
    const app::Json raw = args.config.empty() ? app::Json::object() : app::load_config(args.config);
    app::Overrides o;
    if (sub.count("--seed")) o.seed = args.seed;
    if (sub.count("--workers")) o.workers = args.workers;
    if (sub.count("--out")) o.out = args.out;
    if (sub.get_option_no_throw("--suite") && sub.count("--suite")) o.suite = args.suite;
    resolved = app::resolve_config(command, raw, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    const app::RunResult r = app::run(command, resolved);
    const std::string dir = resolved["out"].get<std::string>();
    app::write_artifacts(r, command, dir);
    std::cout << r.summary << "\n";
    for (const auto& a : r.artifacts) std::cout << "wrote " << dir << "/" << a.name << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << command << " failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Cramer transform, half-space depth and random polytope experiments"};
  cli.set_version_flag("--version", CRAMERLAB_VERSION);
  cli.require_subcommand(1);
  Args args;
  const std::map<std::string, std::string> help{
      {"transform", "Legendre transform Lambda* at query points"},
      {"depth", "Tukey half-space depth and Lambda* at query points"},
      {"simulate", "two-level estimate of E mu(K_N) for one N"},
      {"beta", "beta = Var(Lambda*)/(E Lambda*)^2 and the threshold bounds"},
      {"moments", "moments of Lambda* (and of the log-depth for bodies)"},
      {"threshold", "sweep over rho = ln(N)/n with both bounds per row"},
      {"verify", "run one acceptance suite"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : cramerlab::app::commands()) {
    CLI::App* sub = cli.add_subcommand(name, help.at(name));
    sub->add_option("--config", args.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "master seed");
    sub->add_option("--workers", args.workers, "worker threads (0 = all cores; falls back to CRAMERLAB_WORKERS)");
    sub->add_option("--out", args.out, "output directory");
    if (name == "verify") sub->add_option("--suite", args.suite, "suite name");
    subs[name] = sub;
  }
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) return execute(name, args, *sub);
  }
  return kConfigError;
}
