#include "checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cramerlab/analysis.hpp"
#include "cramerlab/closedform.hpp"
#include "cramerlab/depth.hpp"
#include "cramerlab/errors.hpp"
#include "cramerlab/parallel.hpp"
#include "cramerlab/polytope.hpp"
#include "cramerlab/threshold.hpp"
#include "cramerlab/transform.hpp"

namespace cramerlab::checks {

namespace {

using app::Json;

constexpr double kZ95 = 1.959963984540054;

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

class Collector {
 public:
  explicit Collector(SuiteReport& report) : report_(report) {}

  void add(std::string name, double value, double limit, std::string detail = {}) {
    // NaN never passes.
    const bool ok = value <= limit;
    report_.checks.push_back({std::move(name), value, limit, ok, std::move(detail)});
  }

 private:
  SuiteReport& report_;
};

Eigen::VectorXd random_direction(int n, RngEngine& eng) {
  Eigen::VectorXd v(n);
  eng.fill_normal({v.data(), static_cast<std::size_t>(n)});
  return v.normalized();
}

/// Uniform on the body shrunk by `shrink`.
Eigen::VectorXd interior_point(const MeasureModel& m, RngEngine& eng, double shrink) {
  const int n = m.dimension();
  if (m.kind() == MeasureKind::UniformCube) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = shrink * (eng.uniform() - 0.5) * m.side();
    return x;
  }
  return random_direction(n, eng) * (shrink * m.radius() * std::pow(eng.uniform(), 1.0 / n));
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Log-integral closed forms against quadrature.
void lemma43(Collector& out, const SuiteOptions&) {
  constexpr double kTol = 1e-10;
  for (int n = 2; n <= 50; ++n) {
    const auto exact = closedform::log_integral_moments(n);
    const auto quad = closedform::log_integral_moments_quadrature(n);
    out.add("n=" + std::to_string(n) + " first", rel_err(exact.first, quad.first), kTol,
            "closed " + fmt(exact.first, 17) + " quadrature " + fmt(quad.first, 17));
    out.add("n=" + std::to_string(n) + " second", rel_err(exact.second, quad.second), kTol,
            "closed " + fmt(exact.second, 17) + " quadrature " + fmt(quad.second, 17));
  }
}

// Legendre transform of the Gaussian from sampled and closed-form Lambda.
void gaussian_legendre(Collector& out, const SuiteOptions& opt) {
  constexpr double kMcTol = 1e-3;
  constexpr double kClosedTol = 1e-12;
  constexpr int kPoints = 50;
  // Sampled Lambda has relative noise growing like exp(|xi|^2); |x| <= 1/2 keeps it well below kMcTol.
  constexpr double kMcRadius = 0.5;
  constexpr double kClosedRadius = 4.0;
  const RngStream root{opt.seed, 2};
  for (int n : {2, 5, 10}) {
    const MeasureModel g = MeasureModel::standard_gaussian(n);
    CramerOptions mc;
    mc.strategy = CramerStrategy::Joint;
    mc.laplace.method = LaplaceMethod::MonteCarlo;
    mc.laplace.mc_samples = std::size_t{1} << 20;
    mc.laplace.stream = root.child(static_cast<std::uint64_t>(n));
    mc.laplace.workers = opt.workers;
    CramerOptions cf;
    cf.strategy = CramerStrategy::Joint;
    cf.laplace.method = LaplaceMethod::ClosedForm;
    const CramerTransform t_mc(g, mc);
    const CramerTransform t_cf(g, cf);
    RngEngine eng(root.child(100 + static_cast<std::uint64_t>(n)));
    double worst_mc = 0.0, worst_cf = 0.0;
    int bad_status = 0;
    for (int k = 0; k < kPoints; ++k) {
      const Eigen::VectorXd dir = random_direction(n, eng);
      const double u = std::pow(eng.uniform(), 1.0 / n);
      const Eigen::VectorXd x_mc = dir * (kMcRadius * u);
      const Eigen::VectorXd x_cf = dir * (kClosedRadius * u);
      const auto a = t_mc(x_mc);
      const auto b = t_cf(x_cf);
      if (a.status != LegendreStatus::Converged || b.status != LegendreStatus::Converged) ++bad_status;
      worst_mc = std::max(worst_mc, rel_err(a.value, 0.5 * x_mc.squaredNorm()));
      worst_cf = std::max(worst_cf, rel_err(b.value, 0.5 * x_cf.squaredNorm()));
    }
    const std::string tag = "n=" + std::to_string(n);
    out.add(tag + " sampled Lambda, worst relative error", worst_mc, kMcTol,
            std::to_string(kPoints) + " points, |x| <= 0.5, 2^20 draws");
    out.add(tag + " closed-form Lambda, worst relative error", worst_cf, kClosedTol,
            std::to_string(kPoints) + " points, |x| <= 4");
    out.add(tag + " non-converged solves", bad_status, 0);
  }
}

// The joint n-dimensional solve on a product equals the sum of 1-D transforms.
void product_additivity(Collector& out, const SuiteOptions& opt) {
  constexpr double kTol = 1e-6;
  constexpr int kPoints = 50;
  const std::vector<Custom1D> pool{Custom1D::laplace(1.0),  Custom1D::uniform(0.5),
                                   Custom1D::centered_exponential(1.0), Custom1D::logistic(1.0),
                                   Custom1D::gaussian(0.7), Custom1D::ball_marginal(3, 1.0)};
  const RngStream root{opt.seed, 3};
  for (int k = 2; k <= 6; ++k) {
    std::vector<Custom1D> laws;
    std::string names;
    for (int i = 0; i < k; ++i) {
      laws.push_back(pool[static_cast<std::size_t>(i + k) % pool.size()]);
      names += (i ? "," : "") + laws.back().name();
    }
    const MeasureModel prod = MeasureModel::product(laws);
    CramerOptions joint;
    joint.strategy = CramerStrategy::Joint;
    joint.laplace.method = LaplaceMethod::Quadrature1DTensor;
    const CramerTransform transform(prod, joint);
    const PointMatrix pts = sample(prod, kPoints, root.child(static_cast<std::uint64_t>(k)));
    std::vector<double> err(kPoints, 0.0);
    parallel_for(kPoints, opt.workers, [&](std::size_t r) {
      const Eigen::VectorXd x = pts.row(static_cast<Eigen::Index>(r)).transpose();
      const auto j = transform(x);
      double sum = 0.0;
      bool infinite = false;
      for (int i = 0; i < k; ++i) {
        const auto s = cramer_1d(laws[static_cast<std::size_t>(i)], x[i]);
        if (s.status == LegendreStatus::AtInfinity) infinite = true;
        sum += s.value;
      }
      if (infinite || j.status == LegendreStatus::AtInfinity) {
        err[r] = (infinite == (j.status == LegendreStatus::AtInfinity)) ? 0.0 : 1.0;
      } else if (j.status != LegendreStatus::Converged) {
        err[r] = std::numeric_limits<double>::infinity();
      } else {
        err[r] = std::abs(j.value - sum) / std::max(1.0, std::abs(sum));
      }
    });
    out.add(std::to_string(k) + "-fold product, worst error", *std::max_element(err.begin(), err.end()), kTol,
            names);
  }
}

// Tukey depth against exp(-Lambda*) on cube and ball.
void depth_cramer(Collector& out, const SuiteOptions& opt) {
  constexpr int kPoints = 100;
  constexpr double kRoundoff = 1e-12;
  const RngStream root{opt.seed, 4};
  for (int n = 2; n <= 10; ++n) {
    for (const auto& m : {MeasureModel::uniform_cube(n), MeasureModel::uniform_ball_vol1(n)}) {
      const bool cube = m.kind() == MeasureKind::UniformCube;
      DepthOptions dopt;
      dopt.tail.samples = 30000;
      dopt.tail.stream = root.child(static_cast<std::uint64_t>(2 * n + cube));
      dopt.starts = 16;
      dopt.refine = 1;
      dopt.max_steps = 10;
      const CramerTransform transform(m);
      const DirectionalTail tail(m, dopt.tail);
      RngEngine eng(root.child(1000 + static_cast<std::uint64_t>(2 * n + cube)));
      std::vector<Eigen::VectorXd> pts;
      for (int k = 0; k < kPoints; ++k) pts.push_back(interior_point(m, eng, 0.95));
      std::vector<double> chernoff(kPoints), lower(kPoints), upper(kPoints);
      std::vector<int> bad(kPoints, 0);
      parallel_for(kPoints, opt.workers, [&](std::size_t i) {
        const auto d = cube ? depth(tail, pts[i], dopt) : depth(m, pts[i]);
        const auto c = transform(pts[i]);
        bad[i] = c.status != LegendreStatus::Converged;
        const double omega_ci = d.ci / d.phi;
        chernoff[i] = d.phi - d.ci - std::exp(-c.value);
        lower[i] = d.log_depth_omega - 5 * std::sqrt(n) - omega_ci - c.value;
        upper[i] = c.value - d.log_depth_omega - omega_ci;
      });
      const std::string tag = std::string(cube ? "cube" : "ball") + " n=" + std::to_string(n);
      out.add(tag + " phi - ci - exp(-Lambda*)", *std::max_element(chernoff.begin(), chernoff.end()), kRoundoff);
      out.add(tag + " omega - 5 sqrt(n) - ci - Lambda*", *std::max_element(lower.begin(), lower.end()), kRoundoff);
      out.add(tag + " Lambda* - omega - ci", *std::max_element(upper.begin(), upper.end()), kRoundoff);
      out.add(tag + " non-converged solves", std::count(bad.begin(), bad.end(), 1), 0);
    }
  }
}

void exp_half(Collector& out, const SuiteOptions&) {
  constexpr double kLimit = 2.0 + 1e-6;
  for (const auto& law : {Custom1D::uniform(0.5), Custom1D::laplace(1.0), Custom1D::centered_exponential(1.0),
                          Custom1D::logistic(1.0), Custom1D::gaussian(1.0)}) {
    double v = std::numeric_limits<double>::quiet_NaN();
    std::string detail;
    try {
      v = exp_half_moment_1d(law);
    } catch (const PrecisionError& e) {
      detail = e.what();
    }
    out.add(law.name() + " E exp(Lambda*/2)", v, kLimit, detail);
  }
}

// Variance of <xi, Z> under the tilted measure is at most n.
void nguyen(Collector& out, const SuiteOptions& opt) {
  constexpr int kTilts = 100;
  const RngStream root{opt.seed, 6};
  for (int n : {3, 6, 10}) {
    for (const auto& m : {MeasureModel::uniform_cube(n), MeasureModel::uniform_ball_vol1(n)}) {
      const bool cube = m.kind() == MeasureKind::UniformCube;
      RngEngine eng(root.child(static_cast<std::uint64_t>(2 * n + cube)));
      std::vector<Eigen::VectorXd> xis;
      for (int k = 0; k < kTilts; ++k) {
        // |xi| log-uniform on [0.1, 1000].
        xis.push_back(random_direction(n, eng) * std::pow(10.0, -1.0 + 4.0 * eng.uniform()));
      }
      std::vector<double> excess(kTilts), ratio(kTilts);
      parallel_for(kTilts, opt.workers, [&](std::size_t i) {
        const TiltedMeasure tilted(m, xis[i]);
        const Estimate v = tilted.projected_variance(xis[i]);
        excess[i] = v.value - n - 4 * v.ci;
        ratio[i] = v.value / n;
      });
      const std::string tag = std::string(cube ? "cube" : "ball") + " n=" + std::to_string(n);
      // Var = n exactly in the cube limit |xi| -> inf; allow for the last bits of the sum.
      out.add(tag + " max Var - n - 4 ci", *std::max_element(excess.begin(), excess.end()), 1e-12 * n,
              "max Var/n = " + fmt(*std::max_element(ratio.begin(), ratio.end())));
    }
  }
}

void ball_example(Collector& out, const SuiteOptions& opt) {
  const RngStream root{opt.seed, 7};
  for (int n = 4; n <= 40; n += 2) {
    const auto m = closedform::ball_mean_omega(n);
    out.add("n=" + std::to_string(n) + " |E omega - (n+1)/2 H_{n/2}|", std::abs(m.quadrature - m.leading),
            5 * std::log(n), "E omega = " + fmt(m.quadrature, 8));
  }
  for (int n = 4; n <= 16; n += 2) {
    MomentBudget b;
    b.path = MomentPath::MonteCarlo;
    b.samples = 20000;
    b.stream = root.child(static_cast<std::uint64_t>(n));
    b.workers = opt.workers;
    const MomentReport r = cramer_moments(MeasureModel::uniform_ball_vol1(n), b);
    const double lead = closedform::ball_mean_omega_leading(n);
    const double se = r.ci.mean / kZ95;
    const double limit = std::max(5 * std::log(n), 3 * se) + 5 * std::sqrt(n);
    out.add("n=" + std::to_string(n) + " |E Lambda* (sampled) - (n+1)/2 H_{n/2}|", std::abs(r.mean - lead), limit,
            "E Lambda* = " + fmt(r.mean) + " +- " + fmt(r.ci.mean));
  }
  for (int n = 4; n <= 20; ++n) {
    const RatioEstimate beta = beta_parameter(MeasureModel::uniform_ball_vol1(n));
    out.add("n=" + std::to_string(n) + " beta sqrt(n)", beta.value * std::sqrt(n), 20.0,
            "beta = " + fmt(beta.value));
  }
}

void gaussian_beta(Collector& out, const SuiteOptions& opt) {
  const RngStream root{opt.seed, 8};
  for (int n = 4; n <= 20; ++n) {
    MomentBudget b;
    b.path = MomentPath::MonteCarlo;
    b.samples = 200000;
    b.stream = root.child(static_cast<std::uint64_t>(n));
    b.workers = opt.workers;
    const RatioEstimate beta = beta_parameter(MeasureModel::standard_gaussian(n), b);
    out.add("n=" + std::to_string(n) + " |beta - 2/n|", std::abs(beta.value - 2.0 / n), 4 * beta.ci,
            "beta = " + fmt(beta.value) + " +- " + fmt(beta.ci));
  }
}

struct ThresholdCase {
  MeasureModel model;
  std::string label;
  double target;
  double tolerance;
};

void thresholds(Collector& out, Json& details, const SuiteOptions& opt) {
  constexpr double kLevel = 0.5;
  constexpr double kSandwichSe = 4.0;
  std::vector<ThresholdCase> cases;
  for (int n : {10, 16}) cases.push_back({MeasureModel::standard_gaussian(n), "gaussian", 0.5, 0.15});
  // E Lambda*/n for the cube does not depend on n.
  const double cube_mean = cramer_moments(MeasureModel::uniform_cube(1)).mean;
  for (int n : {8, 12}) cases.push_back({MeasureModel::uniform_cube(n), "cube", cube_mean, 0.2});
  {
    const int n = 10;
    cases.push_back({MeasureModel::uniform_ball_vol1(n), "ball", (n + 1) * closedform::harmonic(n / 2) / (2.0 * n),
                     0.25});
  }
  const RngStream root{opt.seed, 9};
  Json rows = Json::array();
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& tc = cases[c];
    const int n = tc.model.dimension();
    SweepBudget budget;
    budget.trials = 16;
    budget.test_points = 512;
    budget.moments.stream = root.child(3 * c);
    budget.sublevel.stream = root.child(3 * c + 1);
    budget.workers = opt.workers;
    MomentBudget mb = budget.moments;
    mb.workers = opt.workers;
    const RatioEstimate beta = beta_parameter(tc.model, mb);
    const auto grid = default_rho_grid(beta.moments.mean / n, beta.value, n, 9, budget.n_max);
    const SweepResult sw = sweep(tc.model, grid, budget, root.child(3 * c + 2));
    const std::string tag = tc.label + " n=" + std::to_string(n);

    double located = std::numeric_limits<double>::quiet_NaN();
    std::string note;
    try {
      located = locate_threshold(sw.rows, kLevel);
      note = "rho_0.5 = " + fmt(located) + ", target " + fmt(tc.target);
    } catch (const OutOfRangeError& e) {
      note = e.what();
    }
    out.add(tag + " |rho_0.5 - target|", std::abs(located - tc.target), tc.tolerance, note);

    double upper_gap = -std::numeric_limits<double>::infinity();
    double lower_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sw.rows.size(); ++i) {
      const auto& r = sw.rows[i];
      const double se54 = std::hypot(r.stderr_, sw.lemma54_stderr[i]);
      const double se57 = std::hypot(r.stderr_, sw.lemma57_stderr[i]);
      upper_gap = std::max(upper_gap, r.estimate - r.lemma54_bound - kSandwichSe * se54);
      lower_gap = std::max(lower_gap, r.lemma57_bound - r.estimate - kSandwichSe * se57);
      rows.push_back({{"case", tag},
                      {"rho", r.rho},
                      {"N", r.N},
                      {"estimate", r.estimate},
                      {"stderr", r.stderr_},
                      {"lemma54_bound", r.lemma54_bound},
                      {"lemma57_bound", r.lemma57_bound}});
    }
    out.add(tag + " estimate - upper bound - 4 se", upper_gap, 0.0, std::to_string(sw.rows.size()) + " rows");
    out.add(tag + " lower bound - estimate - 4 se", lower_gap, 0.0);
  }
  details["rows"] = rows;
}

void membership(Collector& out, const SuiteOptions& opt) {
  constexpr int kInstances = 1000;
  constexpr int kDim = 3;
  constexpr std::size_t kN = 20;
  const RngStream root{opt.seed, 10};
  const MeasureModel g = MeasureModel::standard_gaussian(kDim);
  std::vector<int> disagree(kInstances), bad_cert(kInstances), inside(kInstances);
  parallel_for(kInstances, opt.workers, [&](std::size_t i) {
    const PolytopeSample poly = sample_polytope(g, kN, root.child(2 * i));
    const PointMatrix x_draw = sample(g, 1, root.child(2 * i + 1));
    const Eigen::VectorXd x = x_draw.row(0).transpose();
    const MembershipResult a = contains(poly, x);
    const MembershipResult b = contains_lp(poly.points, x);
    disagree[i] = a.verdict != b.verdict;
    inside[i] = a.verdict == Membership::Inside;
    if (a.verdict == Membership::Inside) {
      const double total = a.weights.sum();
      const double residual = (poly.points.transpose() * a.weights - x).norm();
      bad_cert[i] = a.weights.minCoeff() < -1e-12 || std::abs(total - 1.0) > 1e-9 || residual > 1e-7;
    } else {
      const double worst = ((poly.points.rowwise() - x.transpose()) * a.direction).maxCoeff();
      bad_cert[i] = std::abs(a.direction.norm() - 1.0) > 1e-9 || worst > -a.margin + 1e-9 || !(a.margin > 0.0);
    }
  });
  const int n_inside = std::count(inside.begin(), inside.end(), 1);
  out.add("verdicts differing from the LP oracle", std::count(disagree.begin(), disagree.end(), 1), 0,
          std::to_string(kInstances) + " instances, " + std::to_string(n_inside) + " inside");
  out.add("invalid certificates", std::count(bad_cert.begin(), bad_cert.end(), 1), 0);
}

// Small configs for every subcommand; run at 1 and 4 workers and compare bytes.
Json reproducibility_config(const std::string& command) {
  if (command == "transform") {
    return {{"model", {{"kind", "gaussian"}, {"n", 3}}},
            {"points", {{"values", {{0.1, 0.2, -0.3}, {0.5, 0.0, 0.2}, {-0.4, 0.3, 0.1}}}}},
            {"laplace", {{"method", "monte_carlo"}, {"samples", 65536}}}};
  }
  if (command == "depth") {
    return {{"model", {{"kind", "cube"}, {"n", 3}}},
            {"points", {{"count", 4}}},
            {"depth", {{"starts", 8}, {"refine", 2}, {"tail_samples", 5000}}}};
  }
  if (command == "simulate") return {{"model", {{"kind", "cube"}, {"n", 3}}}, {"N", 50}, {"trials", 8}, {"test_points", 128}};
  if (command == "beta") {
    return {{"model", {{"kind", "ball_vol1"}, {"n", 3}}},
            {"path", "monte_carlo"},
            {"samples", 2000},
            {"isotropic_samples", 5000}};
  }
  if (command == "moments") {
    return {{"model",
             {{"kind", "product"}, {"n", 2}, {"components", {{{"law", "laplace"}}, {{"law", "exponential"}}}}}},
            {"path", "monte_carlo"},
            {"samples", 2000},
            {"exp_half", true}};
  }
  if (command == "threshold") {
    return {{"model", {{"kind", "gaussian"}, {"n", 4}}},
            {"rho_grid", {0.6, 0.9, 1.2}},
            {"trials", 4},
            {"test_points", 64},
            {"moment_samples", 2000},
            {"sublevel_samples", 2000},
            {"isotropic_samples", 2000}};
  }
  return {{"suite", "lemma43"}};
}

void reproducibility(Collector& out, const SuiteOptions& opt) {
  for (const auto& command : app::commands()) {
    const Json raw = reproducibility_config(command);
    std::vector<app::RunResult> runs;
    for (int workers : {1, 4}) {
      app::Overrides o;
      o.seed = opt.seed;
      o.workers = workers;
      runs.push_back(app::run(command, app::resolve_config(command, raw, o)));
    }
    int differing = 0;
    std::size_t bytes = 0;
    if (runs[0].artifacts.size() != runs[1].artifacts.size()) {
      differing = 1;
    } else {
      for (std::size_t i = 0; i < runs[0].artifacts.size(); ++i) {
        differing += runs[0].artifacts[i].name != runs[1].artifacts[i].name ||
                     runs[0].artifacts[i].content != runs[1].artifacts[i].content;
        bytes += runs[0].artifacts[i].content.size();
      }
    }
    out.add(command + " artifacts differing between 1 and 4 workers", differing, 0,
            std::to_string(runs[0].artifacts.size()) + " artifacts, " + std::to_string(bytes) + " bytes");
  }
}

}  // namespace

bool SuiteReport::passed() const { return failures() == 0 && !checks.empty(); }

std::size_t SuiteReport::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

std::string SuiteReport::summary_line() const {
  std::ostringstream os;
  os << suite << ": " << checks.size() - failures() << "/" << checks.size() << " checks passed";
  return os.str();
}

const std::vector<SuiteInfo>& suites() {
  static const std::vector<SuiteInfo> list{
      {"lemma43", 1, "log-integral closed forms vs quadrature", 1.0},
      {"gaussian_legendre", 2, "Gaussian Legendre transform, sampled and closed-form Lambda", 60.0},
      {"product_additivity", 3, "product measures: joint Lambda* equals the sum of 1-D values", 60.0},
      {"depth_cramer", 4, "Tukey depth against exp(-Lambda*) on cube and ball", 600.0},
      {"exp_half", 5, "E exp(Lambda*/2) <= 2 in dimension one", 10.0},
      {"nguyen", 6, "tilted variance of <xi, Z> is at most n", 300.0},
      {"ball_example", 7, "ball: E omega, E Lambda* and beta", 1800.0},
      {"gaussian_beta", 8, "Gaussian beta equals 2/n", 300.0},
      {"thresholds", 9, "located thresholds and bound sandwiches", 7200.0},
      {"membership", 10, "hull membership against the LP oracle", 60.0},
      {"reproducibility", 11, "byte-identical artifacts at 1 and 4 workers", 300.0},
  };
  return list;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : suites()) v.push_back(s.name);
    return v;
  }();
  return names;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& options) {
  const auto& list = suites();
  const auto it = std::find_if(list.begin(), list.end(), [&](const auto& s) { return s.name == name; });
  if (it == list.end()) throw ConfigError("unknown suite '" + name + "'");
  SuiteReport rep;
  rep.suite = it->name;
  rep.criterion = it->criterion;
  rep.title = it->title;
  rep.budget_seconds = it->budget_seconds;
  Collector out(rep);
  const auto start = std::chrono::steady_clock::now();
  switch (it->criterion) {
    case 1: lemma43(out, options); break;
    case 2: gaussian_legendre(out, options); break;
    case 3: product_additivity(out, options); break;
    case 4: depth_cramer(out, options); break;
    case 5: exp_half(out, options); break;
    case 6: nguyen(out, options); break;
    case 7: ball_example(out, options); break;
    case 8: gaussian_beta(out, options); break;
    case 9: thresholds(out, rep.details, options); break;
    case 10: membership(out, options); break;
    default: reproducibility(out, options); break;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

Json to_json(const SuiteReport& report) {
  Json list = Json::array();
  for (const auto& c : report.checks) {
    list.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed},
                    {"detail", c.detail}});
  }
  Json j = {{"name", report.suite},
            {"title", report.title},
            {"passed", report.passed()},
            {"count", report.checks.size()},
            {"failures", report.failures()},
            {"checks", list}};
  if (!report.details.empty()) j["details"] = report.details;
  return j;
}

}  // namespace cramerlab::checks
