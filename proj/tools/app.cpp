#include "app.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "checks.hpp"
#include "cramerlab/analysis.hpp"
#include "cramerlab/depth.hpp"
#include "cramerlab/errors.hpp"
#include "cramerlab/parallel.hpp"
#include "cramerlab/polytope.hpp"
#include "cramerlab/threshold.hpp"
#include "cramerlab/transform.hpp"

namespace cramerlab::app {

namespace {

Json common_defaults() {
  Json model = {{"kind", "gaussian"}, {"n", 10}, {"side", 1.0}, {"radius", 1.0}, {"components", Json::array()}};
  return {{"model", model}, {"seed", 1}, {"workers", 1}, {"out", "cramerlab-out"}};
}

Json defaults_for(const std::string& command) {
  Json d = common_defaults();
  const Json points = {{"count", 8}, {"values", Json::array()}};
  if (command == "transform") {
    d["points"] = points;
    d["laplace"] = {{"method", "auto"}, {"samples", 1 << 18}};
  } else if (command == "depth") {
    d["points"] = points;
    d["depth"] = {{"starts", 32}, {"refine", 4}, {"max_steps", 20}, {"tail_samples", 100000}, {"force_search", false}};
  } else if (command == "simulate") {
    d["N"] = 1000;
    d["rho"] = nullptr;
    d["trials"] = 64;
    d["test_points"] = 4096;
  } else if (command == "beta") {
    d["dimensions"] = Json::array();
    d["samples"] = 100000;
    d["path"] = "auto";
    d["delta"] = 0.5;
    d["isotropic_samples"] = 1000000;
  } else if (command == "moments") {
    d["dimensions"] = Json::array();
    d["samples"] = 100000;
    d["path"] = "auto";
    d["exp_half"] = false;
    d["omega"] = false;
    d["depth_tail_samples"] = 20000;
  } else if (command == "threshold") {
    d["dimensions"] = Json::array();
    d["rho_grid"] = Json::array();
    d["grid_points"] = 9;
    d["delta"] = 0.5;
    d["trials"] = 64;
    d["test_points"] = 4096;
    d["n_max"] = 1000000;
    d["moment_samples"] = 100000;
    d["sublevel_samples"] = 100000;
    d["isotropic_samples"] = 200000;
  } else if (command == "verify") {
    d["suite"] = "lemma43";
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return d;
}

std::string type_name(const Json& j) {
  if (j.is_number_integer()) return "integer";
  return j.type_name();
}

void merge(Json& target, const Json& raw, const std::string& path) {
  if (!raw.is_object()) throw ConfigError(path.empty() ? "config must be a JSON object" : path + " must be an object");
  for (const auto& [key, value] : raw.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!target.contains(key)) throw ConfigError("unknown key '" + where + "'");
    Json& slot = target[key];
    if (slot.is_object()) {
      merge(slot, value, where);
    } else if (slot.is_null()) {
      if (!value.is_null() && !value.is_number()) throw ConfigError(where + " must be a number or null");
      slot = value;
    } else if (slot.is_number_integer()) {
      if (!value.is_number_integer()) throw ConfigError(where + " must be an integer, got " + type_name(value));
      slot = value;
    } else if (slot.is_number()) {
      if (!value.is_number()) throw ConfigError(where + " must be a number, got " + type_name(value));
      slot = value.get<double>();
    } else if (slot.type() != value.type()) {
      throw ConfigError(where + " must be " + std::string(slot.type_name()) + ", got " + type_name(value));
    } else {
      slot = value;
    }
  }
}

std::int64_t positive_int(const Json& cfg, const char* key, std::int64_t min = 1) {
  const auto v = cfg.at(key).get<std::int64_t>();
  if (v < min) throw ConfigError(std::string(key) + " must be at least " + std::to_string(min));
  return v;
}

Custom1D build_law(const Json& spec) {
  if (!spec.is_object() || !spec.contains("law") || !spec["law"].is_string()) {
    throw ConfigError("model.components entries need a string 'law'");
  }
  const auto law = spec["law"].get<std::string>();
  std::vector<std::string> allowed;
  if (law == "uniform") allowed = {"half_width"};
  else if (law == "laplace" || law == "logistic") allowed = {"scale"};
  else if (law == "exponential") allowed = {"rate"};
  else if (law == "gaussian") allowed = {"sigma"};
  else if (law == "ball_marginal") allowed = {"n", "radius"};
  else throw ConfigError("unknown law '" + law + "'");
  for (const auto& [key, value] : spec.items()) {
    if (key == "law") continue;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("law '" + law + "' has no parameter '" + key + "'");
    }
    if (!value.is_number()) throw ConfigError("parameter '" + key + "' must be a number");
  }
  auto param = [&](const char* key, double fallback) {
    const double v = spec.contains(key) ? spec[key].get<double>() : fallback;
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("parameter '" + std::string(key) + "' must be positive");
    return v;
  };
  if (law == "uniform") return Custom1D::uniform(param("half_width", 0.5));
  if (law == "laplace") return Custom1D::laplace(param("scale", 1.0));
  if (law == "logistic") return Custom1D::logistic(param("scale", 1.0));
  if (law == "exponential") return Custom1D::centered_exponential(param("rate", 1.0));
  if (law == "gaussian") return Custom1D::gaussian(param("sigma", 1.0));
  const double nd = param("n", 2.0);
  if (nd != std::floor(nd)) throw ConfigError("ball_marginal n must be an integer");
  return Custom1D::ball_marginal(static_cast<int>(nd), param("radius", 1.0));
}

MeasureModel model_with_dimension(const Json& spec, int n) {
  Json copy = spec;
  copy["n"] = n;
  return build_model(copy);
}

std::vector<int> dimensions_of(const Json& cfg) {
  std::vector<int> dims;
  if (cfg.contains("dimensions")) {
    for (const auto& d : cfg["dimensions"]) {
      if (!d.is_number_integer() || d.get<int>() < 1) throw ConfigError("dimensions must be positive integers");
      dims.push_back(d.get<int>());
    }
  }
  if (dims.empty()) {
    dims.push_back(cfg["model"]["n"].get<int>());
  } else {
    const auto kind = cfg["model"]["kind"].get<std::string>();
    if (kind == "product" || kind == "custom1d") throw ConfigError("dimensions cannot vary for kind '" + kind + "'");
  }
  return dims;
}

LaplaceMethod parse_method(const std::string& s) {
  if (s == "auto") return LaplaceMethod::Auto;
  if (s == "closed_form") return LaplaceMethod::ClosedForm;
  if (s == "quadrature") return LaplaceMethod::Quadrature1DTensor;
  if (s == "monte_carlo") return LaplaceMethod::MonteCarlo;
  throw ConfigError("laplace.method must be auto, closed_form, quadrature or monte_carlo");
}

MomentPath parse_path(const std::string& s) {
  if (s == "auto") return MomentPath::Auto;
  if (s == "monte_carlo") return MomentPath::MonteCarlo;
  throw ConfigError("path must be auto or monte_carlo");
}

double open_unit(const Json& cfg, const char* key) {
  const double v = cfg.at(key).get<double>();
  if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(key) + " must lie in (0, 1)");
  return v;
}

std::size_t sample_size_for(const Json& cfg, int n) {
  if (!cfg["rho"].is_null()) {
    const double rho = cfg["rho"].get<double>();
    if (!(rho > 0.0)) throw ConfigError("rho must be positive");
    const double N = std::round(std::exp(rho * n));
    if (!(N < 1e9)) throw ConfigError("rho gives N above 1e9");
    return static_cast<std::size_t>(N);
  }
  return static_cast<std::size_t>(positive_int(cfg, "N"));
}

// Semantic checks beyond types; everything a run needs is validated here so a
// bad config never produces partial output.
void validate(const std::string& command, const Json& cfg) {
  const MeasureModel model = build_model(cfg["model"]);
  for (int n : dimensions_of(cfg)) model_with_dimension(cfg["model"], n);
  if (cfg["workers"].get<int>() < 0) throw ConfigError("workers must be non-negative");
  if (command == "transform" || command == "depth") {
    positive_int(cfg["points"], "count");
    for (const auto& p : cfg["points"]["values"]) {
      if (!p.is_array() || static_cast<int>(p.size()) != model.dimension()) {
        throw ConfigError("points.values entries must be arrays of length " + std::to_string(model.dimension()));
      }
      for (const auto& c : p) {
        if (!c.is_number()) throw ConfigError("points.values entries must be numeric");
      }
    }
  }
  if (command == "transform") {
    const LaplaceMethod method = parse_method(cfg["laplace"]["method"].get<std::string>());
    positive_int(cfg["laplace"], "samples", 16);
    try {
      resolve_method(model, method);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  } else if (command == "depth") {
    const Json& d = cfg["depth"];
    positive_int(d, "starts");
    positive_int(d, "refine");
    positive_int(d, "max_steps");
    positive_int(d, "tail_samples", 100);
  } else if (command == "simulate") {
    positive_int(cfg, "trials");
    positive_int(cfg, "test_points");
    if (sample_size_for(cfg, model.dimension()) <= static_cast<std::size_t>(model.dimension())) {
      throw ConfigError("N must exceed the dimension");
    }
  } else if (command == "beta") {
    positive_int(cfg, "samples", 100);
    positive_int(cfg, "isotropic_samples", 100);
    parse_path(cfg["path"].get<std::string>());
    open_unit(cfg, "delta");
  } else if (command == "moments") {
    positive_int(cfg, "samples", 100);
    positive_int(cfg, "depth_tail_samples", 100);
    parse_path(cfg["path"].get<std::string>());
  } else if (command == "threshold") {
    open_unit(cfg, "delta");
    positive_int(cfg, "grid_points", 2);
    positive_int(cfg, "trials");
    positive_int(cfg, "test_points");
    positive_int(cfg, "n_max", 2);
    positive_int(cfg, "moment_samples", 100);
    positive_int(cfg, "sublevel_samples", 100);
    positive_int(cfg, "isotropic_samples", 100);
    for (const auto& r : cfg["rho_grid"]) {
      if (!r.is_number()) throw ConfigError("rho_grid entries must be numbers");
    }
  } else if (command == "verify") {
    const auto name = cfg["suite"].get<std::string>();
    const auto& names = checks::suite_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw ConfigError("unknown suite '" + name + "'");
    }
  }
}

Json without_execution_keys(const Json& cfg) {
  Json copy = cfg;
  copy.erase("workers");
  copy.erase("out");
  return copy;
}

RngStream master_stream(const Json& cfg) { return {cfg["seed"].get<std::uint64_t>(), 0}; }

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"ci", e.ci}, {"exact", e.exact}};
}

Json moments_json(const MomentReport& r) {
  return {{"mean", r.mean},
          {"second_moment", r.second_moment},
          {"variance", r.variance},
          {"exp_half_moment", r.exp_half_moment},
          {"ci",
           {{"mean", r.ci.mean},
            {"second_moment", r.ci.second_moment},
            {"variance", r.ci.variance},
            {"exp_half_moment", r.ci.exp_half_moment}}},
          {"sample_count", r.sample_count},
          {"exact", r.exact},
          {"censored", r.censored},
          {"right_censored", r.right_censored},
          {"beta_std_error", r.beta_std_error},
          {"low_confidence", r.low_confidence},
          {"path", r.path}};
}

Json report_json(const ThresholdReport& r) {
  return {{"beta", r.beta},
          {"delta", r.delta},
          {"mean_over_n", r.mean_over_n},
          {"rho1_bound", r.rho1_bound},
          {"rho2_bound", r.rho2_bound},
          {"regime", to_string(r.regime)},
          {"conditions_met", {{"lower", r.conditions_met.lower}, {"upper", r.conditions_met.upper}}}};
}

Json header(const std::string& command, const Json& cfg) {
  return {{"command", command},
          {"version", CRAMERLAB_VERSION},
          {"config_hash", config_hash(cfg)},
          {"seed", cfg["seed"]},
          {"config", without_execution_keys(cfg)}};
}

std::vector<Eigen::VectorXd> query_points(const Json& cfg, const MeasureModel& model, RngStream stream) {
  std::vector<Eigen::VectorXd> pts;
  const int n = model.dimension();
  if (!cfg["points"]["values"].empty()) {
    for (const auto& p : cfg["points"]["values"]) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x[i] = p[static_cast<std::size_t>(i)].get<double>();
      pts.push_back(std::move(x));
    }
    return pts;
  }
  const PointMatrix draws = sample(model, cfg["points"]["count"].get<std::size_t>(), stream);
  for (Eigen::Index r = 0; r < draws.rows(); ++r) pts.emplace_back(draws.row(r).transpose());
  return pts;
}

std::string to_text(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

RunResult run_transform(const Json& cfg) {
  const MeasureModel model = build_model(cfg["model"]);
  const int workers = cfg["workers"].get<int>();
  const RngStream root = master_stream(cfg);
  const auto pts = query_points(cfg, model, root.child(1));
  CramerOptions opt;
  opt.laplace.method = parse_method(cfg["laplace"]["method"].get<std::string>());
  opt.laplace.mc_samples = cfg["laplace"]["samples"].get<std::size_t>();
  opt.laplace.stream = root.child(2);
  opt.laplace.workers = workers;
  const CramerTransform transform(model, opt);
  std::vector<LegendreResult> res(pts.size());
  parallel_for(pts.size(), workers, [&](std::size_t i) { res[i] = transform(pts[i]); });

  const bool deterministic = transform.method() != LaplaceMethod::MonteCarlo;
  Json out = header("transform", cfg);
  out["model"] = model.describe();
  out["method"] = to_string(transform.method());
  Json rows = Json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rows.push_back({{"x", vector_json(pts[i])},
                    {"value", res[i].value},
                    // Monte Carlo Lambda has no per-point interval; see the README.
                    {"ci", deterministic ? Json(0.0) : Json(nullptr)},
                    {"argmax_xi", vector_json(res[i].argmax_xi)},
                    {"grad_norm", res[i].grad_norm},
                    {"iterations", res[i].iterations},
                    {"status", to_string(res[i].status)}});
  }
  out["points"] = rows;
  RunResult r;
  r.artifacts.push_back({"transform.json", out.dump(2) + "\n"});
  r.summary = std::to_string(pts.size()) + " Legendre transforms (" + to_string(transform.method()) + ")";
  return r;
}

RunResult run_depth(const Json& cfg) {
  const MeasureModel model = build_model(cfg["model"]);
  const int workers = cfg["workers"].get<int>();
  const RngStream root = master_stream(cfg);
  const auto pts = query_points(cfg, model, root.child(1));
  const Json& d = cfg["depth"];
  DepthOptions opt;
  opt.starts = d["starts"].get<int>();
  opt.refine = d["refine"].get<int>();
  opt.max_steps = d["max_steps"].get<int>();
  opt.tail.samples = d["tail_samples"].get<std::size_t>();
  opt.tail.stream = root.child(2);
  opt.seed = root.child(3).stream_index;
  opt.force_search = d["force_search"].get<bool>();
  const DirectionalTail tail(model, opt.tail);
  const CramerTransform transform(model);
  std::vector<DepthResult> res(pts.size());
  std::vector<double> lambda(pts.size());
  parallel_for(pts.size(), workers, [&](std::size_t i) {
    res[i] = depth(tail, pts[i], opt);
    lambda[i] = transform(pts[i]).value;
  });

  Json out = header("depth", cfg);
  out["model"] = model.describe();
  Json rows = Json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rows.push_back({{"x", vector_json(pts[i])},
                    {"phi", res[i].phi},
                    {"ci", res[i].ci},
                    {"omega", res[i].log_depth_omega},
                    {"method", to_string(res[i].method)},
                    {"direction", vector_json(res[i].direction)},
                    {"lambda_star", lambda[i]},
                    {"chernoff_holds", res[i].phi - res[i].ci <= std::exp(-lambda[i])}});
  }
  out["points"] = rows;
  RunResult r;
  r.artifacts.push_back({"depth.json", out.dump(2) + "\n"});
  r.summary = std::to_string(pts.size()) + " depth evaluations";
  return r;
}

RunResult run_simulate(const Json& cfg) {
  const MeasureModel model = build_model(cfg["model"]);
  const std::size_t N = sample_size_for(cfg, model.dimension());
  const auto trials = cfg["trials"].get<std::size_t>();
  const auto test_points = cfg["test_points"].get<std::size_t>();
  const MeasureEstimate e =
      estimate_measure(model, N, trials, test_points, master_stream(cfg).child(4), cfg["workers"].get<int>());
  const double rho = std::log(static_cast<double>(N)) / model.dimension();

  std::string csv = "row,N,rho,inside_fraction,stderr,ci\n";
  for (std::size_t i = 0; i < e.per_trial.size(); ++i) {
    csv += std::to_string(i) + "," + std::to_string(N) + "," + to_text(rho) + "," + to_text(e.per_trial[i]) + ",,\n";
  }
  csv += "aggregate," + std::to_string(N) + "," + to_text(rho) + "," + to_text(e.value) + "," + to_text(e.std_error) +
         "," + to_text(e.ci) + "\n";

  Json out = header("simulate", cfg);
  out["model"] = model.describe();
  out["N"] = N;
  out["rho"] = rho;
  out["estimate"] = {{"value", e.value}, {"std_error", e.std_error}, {"ci", e.ci}};
  out["trials"] = e.trials;
  out["test_points"] = e.test_points;
  RunResult r;
  r.artifacts.push_back({"simulate.csv", csv});
  r.artifacts.push_back({"simulate.json", out.dump(2) + "\n"});
  r.summary = "E mu(K_N) = " + to_text(e.value) + " +- " + to_text(e.ci) + " at N = " + std::to_string(N);
  return r;
}

MomentBudget moment_budget(const Json& cfg, RngStream stream, const char* samples_key) {
  MomentBudget b;
  b.samples = cfg[samples_key].get<std::size_t>();
  b.stream = stream;
  b.workers = cfg["workers"].get<int>();
  if (cfg.contains("path")) b.path = parse_path(cfg["path"].get<std::string>());
  return b;
}

RunResult run_beta(const Json& cfg) {
  const RngStream root = master_stream(cfg);
  const double delta = cfg["delta"].get<double>();
  Json entries = Json::array();
  std::string summary;
  for (int n : dimensions_of(cfg)) {
    const MeasureModel model = model_with_dimension(cfg["model"], n);
    const RngStream s = root.child(static_cast<std::uint64_t>(n));
    const RatioEstimate beta = beta_parameter(model, moment_budget(cfg, s.child(1), "samples"));
    IsotropicBudget ib;
    ib.samples = cfg["isotropic_samples"].get<std::size_t>();
    ib.stream = s.child(2);
    ib.workers = cfg["workers"].get<int>();
    const double L = isotropic_constant(model, ib);
    const ThresholdReport report = rho_bounds(beta.value, delta, beta.moments.mean / n, n, L);
    entries.push_back({{"n", n},
                       {"model", model.describe()},
                       {"beta", {{"value", beta.value}, {"std_error", beta.std_error}, {"ci", beta.ci},
                                 {"exact", beta.exact}, {"low_confidence", beta.low_confidence}}},
                       {"n_beta", n * beta.value},
                       {"moments", moments_json(beta.moments)},
                       {"isotropic_constant", L},
                       {"threshold_report", report_json(report)}});
    summary += "n=" + std::to_string(n) + " beta=" + to_text(beta.value) + " ";
  }
  Json out = header("beta", cfg);
  out["results"] = entries;
  RunResult r;
  r.artifacts.push_back({"beta.json", out.dump(2) + "\n"});
  r.summary = summary;
  return r;
}

RunResult run_moments(const Json& cfg) {
  const RngStream root = master_stream(cfg);
  Json entries = Json::array();
  for (int n : dimensions_of(cfg)) {
    const MeasureModel model = model_with_dimension(cfg["model"], n);
    const RngStream s = root.child(static_cast<std::uint64_t>(n));
    MomentBudget b = moment_budget(cfg, s.child(1), "samples");
    b.exp_half = cfg["exp_half"].get<bool>();
    Json e = {{"n", n}, {"model", model.describe()}, {"cramer", moments_json(cramer_moments(model, b))}};
    if (cfg["omega"].get<bool>()) {
      if (!model.is_body()) throw ConfigError("omega moments need a body kind (cube or ball)");
      OmegaBudget ob;
      ob.moments = moment_budget(cfg, s.child(2), "samples");
      ob.depth.tail.samples = cfg["depth_tail_samples"].get<std::size_t>();
      ob.depth.tail.stream = s.child(3);
      e["omega"] = moments_json(omega_moments(model, ob));
    }
    entries.push_back(std::move(e));
  }
  Json out = header("moments", cfg);
  out["results"] = entries;
  RunResult r;
  r.artifacts.push_back({"moments.json", out.dump(2) + "\n"});
  r.summary = std::to_string(entries.size()) + " moment reports";
  return r;
}

RunResult run_threshold(const Json& cfg) {
  const RngStream root = master_stream(cfg);
  const double delta = cfg["delta"].get<double>();
  const int workers = cfg["workers"].get<int>();
  std::vector<SweepRow> all_rows;
  Json entries = Json::array();
  for (int n : dimensions_of(cfg)) {
    const MeasureModel model = model_with_dimension(cfg["model"], n);
    const RngStream s = root.child(static_cast<std::uint64_t>(n));
    SweepBudget budget;
    budget.n_max = cfg["n_max"].get<std::size_t>();
    budget.trials = cfg["trials"].get<std::size_t>();
    budget.test_points = cfg["test_points"].get<std::size_t>();
    budget.moments.samples = cfg["moment_samples"].get<std::size_t>();
    budget.moments.stream = s.child(1);
    budget.sublevel.samples = cfg["sublevel_samples"].get<std::size_t>();
    budget.sublevel.stream = s.child(2);
    budget.workers = workers;

    std::vector<double> grid;
    for (const auto& v : cfg["rho_grid"]) grid.push_back(v.get<double>());
    RatioEstimate beta;
    if (grid.empty()) {
      MomentBudget mb = budget.moments;
      mb.workers = workers;
      beta = beta_parameter(model, mb);
      grid = default_rho_grid(beta.moments.mean / n, beta.value, n, cfg["grid_points"].get<std::size_t>(),
                              budget.n_max, delta);
    }
    const SweepResult sw = sweep(model, grid, budget, s.child(3));
    IsotropicBudget ib;
    ib.samples = cfg["isotropic_samples"].get<std::size_t>();
    ib.stream = s.child(4);
    ib.workers = workers;
    const double L = isotropic_constant(model, ib);
    const ThresholdReport report = rho_bounds(sw.beta, delta, sw.cramer.mean / n, n, L);

    std::set<double> levels{delta, 0.5, 1.0 - delta};
    Json located = Json::array();
    for (double level : levels) {
      Json item = {{"level", level}};
      try {
        item["rho"] = locate_threshold(sw.rows, level);
      } catch (const OutOfRangeError& e) {
        item["rho"] = nullptr;
        item["hint"] = e.what();
      }
      located.push_back(item);
    }
    Json skipped = Json::array();
    for (const auto& k : sw.skipped) skipped.push_back({{"rho", k.rho}, {"N", k.N}, {"reason", k.reason}});
    Json profile = Json::array();
    for (const auto& p : sw.sublevel) {
      profile.push_back({{"t", p.t}, {"measure", estimate_json(p.measure)}, {"depth_floor", p.depth_floor},
                         {"depth_floor_exact", p.depth_floor_exact}});
    }
    Json bound_se = Json::array();
    for (std::size_t i = 0; i < sw.rows.size(); ++i) {
      bound_se.push_back({{"rho", sw.rows[i].rho}, {"lemma54_stderr", sw.lemma54_stderr[i]},
                          {"lemma57_stderr", sw.lemma57_stderr[i]}});
    }
    entries.push_back({{"n", n},
                       {"model", model.describe()},
                       {"rho_grid", grid},
                       {"thresholds", located},
                       {"asymptotic_threshold", sw.cramer.mean / n},
                       {"beta", {{"value", sw.beta}, {"ci", sw.beta_ci}}},
                       {"cramer_moments", moments_json(sw.cramer)},
                       {"isotropic_constant", L},
                       {"threshold_report", report_json(report)},
                       {"sublevel_profile", profile},
                       {"bound_stderr", bound_se},
                       {"skipped", skipped}});
    all_rows.insert(all_rows.end(), sw.rows.begin(), sw.rows.end());
  }
  Json out = header("threshold", cfg);
  out["results"] = entries;
  RunResult r;
  r.artifacts.push_back({"threshold.csv", sweep_csv(all_rows)});
  r.artifacts.push_back({"threshold.json", out.dump(2) + "\n"});
  r.summary = std::to_string(all_rows.size()) + " sweep rows";
  return r;
}

RunResult run_verify(const Json& cfg) {
  checks::SuiteOptions opt;
  opt.seed = cfg["seed"].get<std::uint64_t>();
  opt.workers = cfg["workers"].get<int>();
  const checks::SuiteReport rep = checks::run_suite(cfg["suite"].get<std::string>(), opt);
  Json out = header("verify", cfg);
  out["suite"] = checks::to_json(rep);
  RunResult r;
  r.artifacts.push_back({"verify.json", out.dump(2) + "\n"});
  r.exit_code = rep.passed() ? 0 : 1;
  r.summary = rep.summary_line();
  return r;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"transform", "depth", "simulate", "beta", "moments", "threshold", "verify"};
  return names;
}

Json resolve_config(const std::string& command, const Json& raw, const Overrides& overrides) {
  Json cfg = defaults_for(command);
  const bool workers_given = raw.is_object() && raw.contains("workers");
  merge(cfg, raw.is_null() ? Json::object() : raw, "");
  if (!workers_given) {
    if (const char* env = std::getenv("CRAMERLAB_WORKERS")) {
      try {
        cfg["workers"] = std::stoi(env);
      } catch (const std::exception&) {
        throw ConfigError("CRAMERLAB_WORKERS must be an integer");
      }
    }
  }
  if (overrides.seed) cfg["seed"] = *overrides.seed;
  if (overrides.workers) cfg["workers"] = *overrides.workers;
  if (overrides.out) cfg["out"] = *overrides.out;
  if (overrides.suite) {
    if (command != "verify") throw ConfigError("--suite applies to verify only");
    cfg["suite"] = *overrides.suite;
  }
  try {
    validate(command, cfg);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::string config_hash(const Json& resolved) {
  const std::string text = without_execution_keys(resolved).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MeasureModel build_model(const Json& spec) {
  const auto kind = spec.at("kind").get<std::string>();
  const int n = spec.at("n").get<int>();
  if (n < 1) throw ConfigError("model.n must be positive");
  const Json& comps = spec.at("components");
  if (!comps.empty() && kind != "product" && kind != "custom1d") {
    throw ConfigError("model.components only applies to product and custom1d");
  }
  try {
    if (kind == "gaussian") return MeasureModel::standard_gaussian(n);
    if (kind == "cube") return MeasureModel::uniform_cube(n, spec.at("side").get<double>());
    if (kind == "ball") return MeasureModel::uniform_ball(n, spec.at("radius").get<double>());
    if (kind == "ball_vol1") return MeasureModel::uniform_ball_vol1(n);
    if (kind == "product" || kind == "custom1d") {
      std::vector<Custom1D> laws;
      for (const auto& c : comps) laws.push_back(build_law(c));
      if (kind == "custom1d") {
        if (laws.size() != 1 || n != 1) throw ConfigError("custom1d needs n = 1 and exactly one component");
        return MeasureModel::custom1d(laws.front());
      }
      if (laws.empty()) throw ConfigError("product needs at least one component");
      if (static_cast<int>(laws.size()) != n) throw ConfigError("model.n must equal the number of components");
      return MeasureModel::product(std::move(laws));
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  throw ConfigError("unknown model kind '" + kind + "' (gaussian, cube, ball, ball_vol1, product, custom1d)");
}

RunResult run(const std::string& command, const Json& resolved) {
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  RunResult r;
  if (command == "transform") r = run_transform(resolved);
  else if (command == "depth") r = run_depth(resolved);
  else if (command == "simulate") r = run_simulate(resolved);
  else if (command == "beta") r = run_beta(resolved);
  else if (command == "moments") r = run_moments(resolved);
  else if (command == "threshold") r = run_threshold(resolved);
  else if (command == "verify") r = run_verify(resolved);
  else throw ConfigError("unknown command '" + command + "'");
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json names = Json::array();
  for (const auto& a : r.artifacts) names.push_back(a.name);
  r.meta = {{"command", command},
            {"version", CRAMERLAB_VERSION},
            {"config_hash", config_hash(resolved)},
            {"seed", resolved["seed"]},
            {"workers", resolved["workers"]},
            {"resolved_workers", resolve_workers(resolved["workers"].get<int>())},
            {"out", resolved["out"]},
            {"started_utc", started},
            {"wall_clock_seconds", seconds},
            {"exit_code", r.exit_code},
            {"artifacts", names},
            {"config", resolved}};
  return r;
}

void write_artifacts(const RunResult& result, const std::string& command, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + path.string());
  };
  for (const auto& a : result.artifacts) write(a.name, a.content);
  write(command + ".meta.json", result.meta.dump(2) + "\n");
}

Json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

}  // namespace cramerlab::app
