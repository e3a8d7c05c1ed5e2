#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cramerlab/measures.hpp"

namespace cramerlab::app {

using Json = nlohmann::ordered_json;

/// Subcommands in the order `--help` lists them.
const std::vector<std::string>& commands();

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::string> suite;
};

/// Merges `raw` over the defaults of `command`.  Unknown keys, wrong types and
/// out-of-range values throw ConfigError.  The result echoes every default.
Json resolve_config(const std::string& command, const Json& raw, const Overrides& overrides = {});

/// FNV-1a over the resolved config minus the execution-only keys (workers, out).
std::string config_hash(const Json& resolved);

MeasureModel build_model(const Json& model_spec);

struct Artifact {
  std::string name;
  std::string content;
};

struct RunResult {
  int exit_code = 0;
  /// Everything here is a pure function of the resolved config (workers included).
  std::vector<Artifact> artifacts;
  /// Wall-clock and execution details; written as <command>.meta.json.
  Json meta;
  std::string summary;
};

RunResult run(const std::string& command, const Json& resolved);

/// Writes the artifacts and the meta sidecar into `dir` (created if missing).
void write_artifacts(const RunResult& result, const std::string& command, const std::string& dir);

/// Reads and parses a config file; ConfigError on I/O or syntax errors.
Json load_config(const std::string& path);

}  // namespace cramerlab::app
