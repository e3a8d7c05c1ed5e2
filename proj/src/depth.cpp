#include "cramerlab/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "cramerlab/closedform.hpp"
#include "cramerlab/errors.hpp"
#include "cramerlab/parallel.hpp"
#include "cramerlab/transform.hpp"

namespace cramerlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;
constexpr int kGrowthDirections = 64;

Eigen::VectorXd unit_or_axis(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (norm > 0.0 && std::isfinite(norm)) return v / norm;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(v.size());
  e[0] = 1.0;
  return e;
}

DepthResult make_result(double phi, Eigen::VectorXd direction, DepthMethod method, double ci) {
  DepthResult r;
  r.phi = phi;
  r.log_depth_omega = phi > 0.0 ? -std::log(phi) : kInf;
  r.direction = std::move(direction);
  r.method = method;
  r.ci = ci;
  return r;
}

struct Candidate {
  Eigen::VectorXd theta;
  Estimate tail;
};

// Smaller tail first; ties go to the lexicographically smaller direction.
bool better(const Candidate& a, const Candidate& b) {
  if (a.tail.value != b.tail.value) return a.tail.value < b.tail.value;
  return std::lexicographical_compare(a.theta.data(), a.theta.data() + a.theta.size(), b.theta.data(),
                                      b.theta.data() + b.theta.size());
}

// Orthonormal basis of the tangent space at theta (n x (n-1)).
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& theta) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(theta)};
  const Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(theta.size() - 1);
}

Eigen::VectorXd rotate(const Eigen::VectorXd& theta, const Eigen::VectorXd& tangent, double angle) {
  return (std::cos(angle) * theta + std::sin(angle) * tangent).normalized();
}

// Projected descent with forward differences along a tangent basis.  The tail
// oracle reuses its draws, so differences are not swamped by sampling noise.
Candidate refine(const DirectionalTail& tail, const Eigen::VectorXd& x, Candidate best, const DepthOptions& opt) {
  const int n = static_cast<int>(x.size());
  if (n < 2) return best;
  double angle = opt.fd_angle;
  double step = 0.2;
  for (int it = 0; it < opt.max_steps; ++it) {
    const Eigen::MatrixXd basis = tangent_basis(best.theta);
    Eigen::VectorXd g(n - 1);
    for (int k = 0; k < n - 1; ++k) {
      g[k] = (tail(x, rotate(best.theta, basis.col(k), angle)).value - best.tail.value) / angle;
    }
    const double gnorm = g.norm();
    if (!(gnorm > 0.0)) {
      // Flat at this resolution (indicator counts); look further out once.
      if (angle >= 0.5) break;
      angle *= 4.0;
      continue;
    }
    const Eigen::VectorXd descent = -(basis * g) / gnorm;
    bool accepted = false;
    for (int ls = 0; ls < 6; ++ls) {
      Candidate trial{rotate(best.theta, descent, step), {}};
      trial.tail = tail(x, trial.theta);
      if (trial.tail.value < best.tail.value) {
        best = std::move(trial);
        step = std::min(1.5 * step, 1.0);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      angle = std::max(0.25 * angle, 1e-6);
      if (step < 1e-5) break;
    }
  }
  return best;
}

std::vector<Eigen::VectorXd> search_starts(const DirectionalTail& tail, const Eigen::VectorXd& x,
                                           const DepthOptions& opt) {
  const int n = static_cast<int>(x.size());
  const auto total = static_cast<std::size_t>(std::max(opt.starts, 1));
  std::vector<Eigen::VectorXd> starts;
  auto add = [&](const Eigen::VectorXd& v) {
    if (starts.size() >= total || !(v.norm() > 0.0) || !v.allFinite()) return;
    starts.push_back(v.normalized());
  };
  const bool centered = !(x.norm() > 0.0);
  if (!centered) add(x);
  if (opt.cramer_start && !centered) {
    // The Legendre maximizer gives a half-space of mass at most exp(-Lambda*(x)).
    try {
      const auto r = cramer(tail.model(), x);
      if (r.status != LegendreStatus::AtInfinity) add(r.argmax_xi);
    } catch (const std::runtime_error&) {
      // No hint when Lambda is unavailable; the other starts remain.
    }
  }
  if (opt.extra_start) add(*opt.extra_start);
  if (!centered) add(-x);
  for (int i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[i] = sign;
      add(e);
    }
  }
  for (std::uint64_t k = 0; starts.size() < total; ++k) {
    RngEngine eng({opt.seed, k});
    Eigen::VectorXd v(n);
    eng.fill_normal({v.data(), static_cast<std::size_t>(n)});
    add(v);
  }
  return starts;
}

// E <X, y>_+^t from sample rows, in log space; returns (h, se of h).
Estimate mc_support(const PointMatrix& draws, const Eigen::VectorXd& y, double t) {
  const Eigen::VectorXd proj = draws * y;
  const auto m = static_cast<double>(proj.size());
  double peak = -kInf;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    if (proj[i] > 0.0) peak = std::max(peak, t * std::log(proj[i]));
  }
  if (!std::isfinite(peak)) throw EstimatorDegenerate("centroid_support: no positive projections");
  double sum = 0.0;
  double sum2 = 0.0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    if (proj[i] > 0.0) {
      const double v = std::exp(t * std::log(proj[i]) - peak);
      sum += v;
      sum2 += v * v;
    }
  }
  const double mean = sum / m;
  const double var = std::max(0.0, sum2 / m - mean * mean);
  const double rel = std::sqrt(var / m) / mean;
  const double h = std::exp((std::numbers::ln2 + peak + std::log(mean)) / t);
  const double se = h * rel / t;
  return {h, se, kZ95 * se, false};
}

int axis_index(const Eigen::VectorXd& y) {
  int axis = -1;
  for (int i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) continue;
    if (axis >= 0) return -1;
    axis = i;
  }
  return axis;
}

// Exact support value when a 1-D reduction exists.
std::optional<double> exact_support(const MeasureModel& model, const Eigen::VectorXd& y, double t) {
  auto from_moment = [t](double moment) { return std::exp((std::numbers::ln2 + std::log(moment)) / t); };
  switch (model.kind()) {
    case MeasureKind::StandardGaussian:
      // 2 E g_+^t = E |g|^t = 2^{t/2} Gamma((t+1)/2) / sqrt(pi).
      return std::exp((0.5 * t * std::numbers::ln2 + std::lgamma(0.5 * (t + 1.0)) - 0.5 * std::log(std::numbers::pi)) /
                      t);
    case MeasureKind::UniformBallVol1:
    case MeasureKind::UniformBallUnit:
      return from_moment(model.ball_marginal().positive_moment(t));
    default: break;
  }
  const int axis = axis_index(y);
  if (model.separable() && axis >= 0) {
    const auto& comp = model.components()[static_cast<std::size_t>(axis)];
    return from_moment(y[axis] > 0.0 ? comp.positive_moment(t) : comp.negative_moment(t));
  }
  return std::nullopt;
}

void require_t(double t, double minimum, const char* what) {
  if (!(t >= minimum) || !std::isfinite(t)) throw DomainError(std::string(what) + ": t out of range");
}

}  // namespace

const char* to_string(DepthMethod method) {
  return method == DepthMethod::Exact ? "Exact" : "DirectionSearch";
}

DepthResult depth(const MeasureModel& model, const Eigen::VectorXd& x, const DepthOptions& options) {
  const int n = model.dimension();
  if (x.size() != n) throw DomainError("depth: point has the wrong dimension");
  if (!model.in_interior(x)) return make_result(0.0, unit_or_axis(x), DepthMethod::Exact, 0.0);
  if (!options.force_search) {
    const Eigen::VectorXd dir = unit_or_axis(x);
    switch (model.kind()) {
      case MeasureKind::StandardGaussian:
        return make_result(closedform::normal_sf(x.norm()), dir, DepthMethod::Exact, 0.0);
      case MeasureKind::UniformBallVol1:
      case MeasureKind::UniformBallUnit:
        return make_result(closedform::BallTail(n).F(x.norm() / model.radius()), dir, DepthMethod::Exact, 0.0);
      default: break;
    }
    if (n == 1) {
      const auto& law = model.components()[0];
      const double up = law.sf(x[0]);
      const double down = law.cdf(x[0]);
      return make_result(std::min(up, down), Eigen::VectorXd::Constant(1, up <= down ? 1.0 : -1.0),
                         DepthMethod::Exact, 0.0);
    }
  }
  TailBudget budget = options.tail;
  budget.workers = options.workers;
  return depth(DirectionalTail(model, budget), x, options);
}

DepthResult depth(const DirectionalTail& tail, const Eigen::VectorXd& x, const DepthOptions& options) {
  const auto& model = tail.model();
  if (x.size() != model.dimension()) throw DomainError("depth: point has the wrong dimension");
  if (!model.in_interior(x)) return make_result(0.0, unit_or_axis(x), DepthMethod::Exact, 0.0);

  const auto starts = search_starts(tail, x, options);
  std::vector<Candidate> screened(starts.size());
  parallel_for(starts.size(), options.workers, [&](std::size_t i) {
    screened[i] = {starts[i], tail(x, starts[i])};
  });
  std::vector<Candidate> ranked = screened;
  std::sort(ranked.begin(), ranked.end(), better);
  const std::size_t refine_count = std::min(ranked.size(), static_cast<std::size_t>(std::max(options.refine, 0)));
  std::vector<Candidate> refined(refine_count);
  parallel_for(refine_count, options.workers, [&](std::size_t i) { refined[i] = refine(tail, x, ranked[i], options); });

  Candidate best = ranked.front();
  for (const auto& c : refined) {
    if (better(c, best)) best = c;
  }
  return make_result(best.tail.value, best.theta, DepthMethod::DirectionSearch, best.tail.ci);
}

Estimate centroid_support(const MeasureModel& model, const Eigen::VectorXd& y, double t,
                          const CentroidBudget& budget) {
  if (y.size() != model.dimension()) throw DomainError("centroid_support: direction has the wrong dimension");
  require_unit(y);
  require_t(t, 1.0, "centroid_support");
  if (const auto exact = exact_support(model, y, t)) return {*exact, 0.0, 0.0, true};
  const PointMatrix draws = sample(model, budget.samples, budget.stream, budget.workers);
  return mc_support(draws, y, t);
}

Estimate centroid_growth_ratio(const MeasureModel& model, double t, const CentroidBudget& budget) {
  require_t(t, 2.0, "centroid_growth_ratio");
  const int n = model.dimension();
  std::vector<Eigen::VectorXd> directions;
  const RngStream dir_stream = budget.stream.child(1);
  for (int k = 0; k < kGrowthDirections; ++k) {
    RngEngine eng(dir_stream, static_cast<std::uint64_t>(k) * RngEngine::normal_draws(static_cast<std::size_t>(n)));
    Eigen::VectorXd v(n);
    eng.fill_normal({v.data(), static_cast<std::size_t>(n)});
    directions.push_back(v.normalized());
  }
  // One shared sample for every direction that needs Monte Carlo.
  PointMatrix draws;
  auto support = [&](const Eigen::VectorXd& y, double s) {
    if (const auto exact = exact_support(model, y, s)) return Estimate{*exact, 0.0, 0.0, true};
    if (draws.rows() == 0) draws = sample(model, budget.samples, budget.stream, budget.workers);
    return mc_support(draws, y, s);
  };
  Estimate best{kInf, 0.0, 0.0, true};
  for (const auto& y : directions) {
    const Estimate ht = support(y, t);
    const Estimate h2 = support(y, 2.0);
    const double r = ht.value / h2.value;
    const double rel = std::hypot(ht.std_error / ht.value, h2.std_error / h2.value);
    if (r < best.value) best = {r, r * rel, kZ95 * r * rel, ht.exact && h2.exact};
  }
  return best;
}

}  // namespace cramerlab
