#include "cramerlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include <boost/math/special_functions/gamma.hpp>

#include "cramerlab/closedform.hpp"
#include "cramerlab/errors.hpp"
#include "cramerlab/parallel.hpp"
#include "cramerlab/quadrature.hpp"

namespace cramerlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ95 = 1.959963984540054;
constexpr std::size_t kChunk = 1024;
constexpr double kCensorFraction = 1e-3;
constexpr double kOneDimTol = 1e-8;

bool is_body(const MeasureModel& m) {
  return m.kind() == MeasureKind::UniformCube || m.kind() == MeasureKind::UniformBallVol1 ||
         m.kind() == MeasureKind::UniformBallUnit;
}

bool is_ball(const MeasureModel& m) {
  return m.kind() == MeasureKind::UniformBallVol1 || m.kind() == MeasureKind::UniformBallUnit;
}

// Moments of a list of values with delta-method CIs; +inf entries are censored.
MomentReport moments_from_values(const std::vector<double>& values, bool exp_half) {
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0, e1 = 0.0, e2 = 0.0;
  std::size_t used = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    ++used;
    const double v2 = v * v;
    s1 += v;
    s2 += v2;
    s3 += v2 * v;
    s4 += v2 * v2;
    if (exp_half) {
      const double e = std::exp(0.5 * v);
      e1 += e;
      e2 += e * e;
    }
  }
  MomentReport r;
  r.sample_count = used;
  r.censored = values.size() - used;
  r.right_censored = static_cast<double>(r.censored) > kCensorFraction * static_cast<double>(values.size());
  r.path = "MonteCarlo";
  if (used < 2) throw EstimatorDegenerate("moments: fewer than two usable draws");
  const double m = static_cast<double>(used);
  const double m1 = s1 / m, m2 = s2 / m, m3 = s3 / m, m4 = s4 / m;
  const double var_v = std::max(0.0, m2 - m1 * m1);
  const double var_v2 = std::max(0.0, m4 - m2 * m2);
  const double cov = m3 - m1 * m2;
  r.mean = m1;
  r.second_moment = m2;
  r.variance = m2 - m1 * m1;
  r.ci.mean = kZ95 * std::sqrt(var_v / m);
  r.ci.second_moment = kZ95 * std::sqrt(var_v2 / m);
  // Var(m2 - m1^2) with gradient (-2 m1, 1).
  const double var_var = 4 * m1 * m1 * var_v - 4 * m1 * cov + var_v2;
  r.ci.variance = kZ95 * std::sqrt(std::max(0.0, var_var) / m);
  // beta = (m2 - m1^2) / m1^2 with gradient (-2 m2 / m1^3, 1 / m1^2).
  const double g1 = -2 * m2 / (m1 * m1 * m1);
  const double g2 = 1 / (m1 * m1);
  r.beta_std_error = std::sqrt(std::max(0.0, g1 * g1 * var_v + 2 * g1 * g2 * cov + g2 * g2 * var_v2) / m);
  if (exp_half) {
    r.exp_half_moment = e1 / m;
    r.ci.exp_half_moment = kZ95 * std::sqrt(std::max(0.0, e2 / m - r.exp_half_moment * r.exp_half_moment) / m);
  } else {
    r.exp_half_moment = kNaN;
  }
  return r;
}

MomentReport exact_report(double mean, double second, double exp_half, const std::string& path) {
  MomentReport r;
  r.mean = mean;
  r.second_moment = second;
  r.variance = second - mean * mean;
  r.exp_half_moment = exp_half;
  r.exact = true;
  r.path = path;
  return r;
}

struct OneDimMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  double eh = 0.0;
};

// int g(Lambda*(x)) d law(x) for g = v, v^2, e^{v/2}, split at the mean.
OneDimMoments one_dim_moments(const Custom1D& law, const CramerTransform& transform, bool exp_half) {
  // The moments share nodes, so each Legendre solve is done once.
  Eigen::VectorXd x(1);
  std::unordered_map<double, double> cache;
  auto lstar = [&](double z) {
    if (auto it = cache.find(z); it != cache.end()) return it->second;
    x[0] = z;
    const auto r = transform(x);
    const double v = r.status == LegendreStatus::AtInfinity ? kInf : r.value;
    cache.emplace(z, v);
    return v;
  };
  // Next to a finite support end the solver gives up (AtInfinity) although Lambda* is
  // finite.  Stop the integrals where that starts; the dropped sliver has mass ~1e-9.
  auto finite_end = [&](double end) {
    if (!std::isfinite(lstar(end))) {
      double inside = 0.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (inside + end);
        if (mid == inside || mid == end) break;
        (std::isfinite(lstar(mid)) ? inside : end) = mid;
      }
      return inside;
    }
    return end;
  };
  const double lower = finite_end(law.effective_lower());
  const double upper = finite_end(law.effective_upper());
  auto integrate = [&](auto g) {
    auto f = [&](double z) {
      const double v = lstar(z);
      return std::isfinite(v) ? g(v) * law.pdf(z) : 0.0;
    };
    double total = 0.0;
    if (lower < 0.0) total += quad::tanh_sinh(f, lower, 0.0, kOneDimTol).value;
    if (upper > 0.0) total += quad::tanh_sinh(f, 0.0, upper, kOneDimTol).value;
    return total;
  };
  OneDimMoments out;
  out.m1 = integrate([](double v) { return v; });
  out.m2 = integrate([](double v) { return v * v; });
  out.eh = exp_half ? exp_half_moment_1d(law) : kNaN;
  return out;
}

MomentReport separable_moments(const MeasureModel& model, bool exp_half) {
  const auto comps = model.components();
  double mean = 0.0, var = 0.0, eh = 1.0;
  if (model.kind() == MeasureKind::UniformCube) {
    // Identical coordinates: one 1-D computation with the closed-form Lambda.
    const CramerTransform t(MeasureModel::uniform_cube(1, model.side()));
    const OneDimMoments m = one_dim_moments(comps[0], t, exp_half);
    const double n = model.dimension();
    mean = n * m.m1;
    var = n * (m.m2 - m.m1 * m.m1);
    eh = std::pow(m.eh, n);
  } else {
    for (const auto& c : comps) {
      const CramerTransform t(MeasureModel::custom1d(c));
      const OneDimMoments m = one_dim_moments(c, t, exp_half);
      mean += m.m1;
      var += m.m2 - m.m1 * m.m1;
      eh *= m.eh;
    }
  }
  return exact_report(mean, var + mean * mean, exp_half ? eh : kNaN, "Quadrature1D");
}

MomentReport ball_moments(const MeasureModel& model, bool exp_half) {
  const int n = model.dimension();
  const double radius = model.radius();
  const Custom1D& marginal = model.ball_marginal();
  auto lstar = [&](double u) {
    const auto r = cramer_1d(marginal, radius * u);
    return r.status == LegendreStatus::AtInfinity ? kInf : r.value;
  };
  // |X| / radius has density n u^{n-1} on (0, 1).
  auto radial = [&](auto g) {
    auto f = [&](double u) {
      const double v = lstar(u);
      return std::isfinite(v) ? g(v) * n * std::pow(u, n - 1) : 0.0;
    };
    return quad::tanh_sinh(f, 0.0, 1.0, 1e-10).value;
  };
  const double m1 = radial([](double v) { return v; });
  const double m2 = radial([](double v) { return v * v; });
  double eh = kNaN;
  if (exp_half) {
    // Near the sphere exp(Lambda*/2) ~ (1-u)^{-(n+1)/4}: integrable only for n <= 2.
    eh = n >= 3 ? kInf : radial([](double v) { return std::exp(0.5 * v); });
  }
  return exact_report(m1, m2, eh, "RadialQuadrature");
}

std::vector<double> omega_sample(const MeasureModel& model, std::size_t count, const OmegaBudget& budget,
                                 std::vector<double>* omega_ci) {
  const PointMatrix x = sample(model, count, budget.moments.stream, budget.moments.workers);
  std::vector<double> out(count);
  if (omega_ci) omega_ci->assign(count, 0.0);
  if (is_ball(model)) {
    for (std::size_t i = 0; i < count; ++i) out[i] = depth(model, x.row(static_cast<Eigen::Index>(i)).transpose()).log_depth_omega;
    return out;
  }
  TailBudget tb = budget.depth.tail;
  tb.workers = budget.moments.workers;
  const DirectionalTail tail(model, tb);
  DepthOptions opt = budget.depth;
  opt.workers = 1;
  parallel_for(count, budget.moments.workers, [&](std::size_t i) {
    const auto d = depth(tail, x.row(static_cast<Eigen::Index>(i)).transpose(), opt);
    out[i] = d.log_depth_omega;
    if (omega_ci) (*omega_ci)[i] = d.phi > 0.0 ? d.ci / d.phi : kInf;
  });
  return out;
}

RatioEstimate ratio_from(const MomentReport& m) {
  if (m.mean - m.ci.mean <= 0.0) throw EstimatorDegenerate("ratio: the mean is not resolved away from 0");
  RatioEstimate r;
  r.value = m.variance / (m.mean * m.mean);
  r.std_error = m.exact ? 0.0 : m.beta_std_error;
  r.ci = kZ95 * r.std_error;
  r.exact = m.exact;
  r.moments = m;
  return r;
}

}  // namespace

std::vector<double> cramer_sample(const MeasureModel& model, std::size_t count, RngStream stream, int workers) {
  const CramerTransform transform(model);
  std::vector<double> out(count);
  const int n = model.dimension();
  parallel_chunks(count, kChunk, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    PointMatrix block(static_cast<Eigen::Index>(end - begin), n);
    model.sample_into(block, stream, begin);
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = transform(block.row(static_cast<Eigen::Index>(i - begin)).transpose());
      out[i] = r.status == LegendreStatus::AtInfinity ? kInf : r.value;
    }
  });
  return out;
}

MomentReport cramer_moments(const MeasureModel& model, const MomentBudget& budget) {
  if (budget.path == MomentPath::Auto) {
    const double n = model.dimension();
    if (model.kind() == MeasureKind::StandardGaussian) {
      // Lambda* = |X|^2 / 2 with |X|^2 ~ chi^2_n; E e^{|X|^2/4} = 2^{n/2}.
      return exact_report(n / 2, (n * n + 2 * n) / 4, budget.exp_half ? std::pow(2.0, n / 2) : kNaN,
                          "ClosedForm");
    }
    if (model.separable()) return separable_moments(model, budget.exp_half);
    if (is_ball(model)) return ball_moments(model, budget.exp_half);
  }
  return moments_from_values(cramer_sample(model, budget.samples, budget.stream, budget.workers), budget.exp_half);
}

MomentReport omega_moments(const MeasureModel& model, const OmegaBudget& budget) {
  if (!is_body(model)) throw DomainError("omega_moments: needs a uniform cube or ball");
  const int n = model.dimension();
  if (is_ball(model) && budget.moments.path == MomentPath::Auto) {
    return exact_report(closedform::ball_mean_omega(n).quadrature, closedform::ball_second_omega(n).quadrature, kNaN,
                        "RadialQuadrature");
  }
  std::vector<double> omega_ci;
  const auto values = omega_sample(model, budget.moments.samples, budget, &omega_ci);
  MomentReport r = moments_from_values(values, false);
  double noise = 0.0;
  for (double c : omega_ci) noise += (c / kZ95) * (c / kZ95);
  noise /= static_cast<double>(omega_ci.size());
  r.low_confidence = noise > 0.1 * r.variance;
  return r;
}

RatioEstimate beta_parameter(const MeasureModel& model, const MomentBudget& budget) {
  return ratio_from(cramer_moments(model, budget));
}

RatioEstimate tau_parameter(const MeasureModel& model, const OmegaBudget& budget) {
  RatioEstimate r = ratio_from(omega_moments(model, budget));
  r.low_confidence = r.moments.low_confidence;
  return r;
}

double isotropic_constant(const MeasureModel& model, const IsotropicBudget& budget) {
  const int n = model.dimension();
  if (budget.samples <= static_cast<std::size_t>(n)) throw SampleSizeError("isotropic_constant: too few samples");
  const PointMatrix x = sample(model, budget.samples, budget.stream, budget.workers);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const PointMatrix centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(budget.samples - 1);
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw SampleSizeError("isotropic_constant: empirical covariance is not positive definite");
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return std::exp(model.log_sup_density() / n + log_det / (2.0 * n));
}

const char* to_string(BetaRegime regime) { return regime == BetaRegime::SmallBeta ? "SmallBeta" : "LargeBeta"; }

ThresholdReport rho_bounds(double beta, double delta, double mean_over_n, int n, double isotropic, double c2) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("rho_bounds: delta must lie in (0, 1)");
  if (!(beta >= 0.0)) throw DomainError("rho_bounds: beta must be nonnegative");
  ThresholdReport r;
  r.beta = beta;
  r.delta = delta;
  r.mean_over_n = mean_over_n;
  const double scale = n / (isotropic * isotropic);
  const double root = std::sqrt(8 * beta / delta);
  const double small_hyp = c2 * std::log(2 / delta) * std::sqrt(delta / beta);
  if (beta < 0.125 && 8 * beta < delta) {
    r.regime = BetaRegime::SmallBeta;
    r.rho1_bound = (1 - root) * mean_over_n;
    r.conditions_met.lower = scale >= small_hyp;
  } else {
    r.regime = BetaRegime::LargeBeta;
    if (beta < 1.0 && beta < delta) {
      r.rho1_bound = (1 - std::pow(2 * beta / (beta + delta), 0.25)) * mean_over_n;
      const double gap = delta - beta;
      r.conditions_met.lower = scale >= c2 / gap * std::log(2 / gap);
    } else {
      r.rho1_bound = kNaN;
    }
  }
  if (beta < 0.5 && 2 * beta < delta) {
    r.rho2_bound = (1 + root) * mean_over_n;
    r.conditions_met.upper = scale >= small_hyp;
  } else {
    r.rho2_bound = kNaN;
  }
  return r;
}

MomentRatioCheck moment_ratio_check(const MeasureModel& model, const MomentBudget& budget) {
  if (!is_body(model)) throw DomainError("moment_ratio_check: needs a uniform cube or ball");
  const MomentReport m = cramer_moments(model, budget);
  const double n = model.dimension();
  MomentRatioCheck c;
  c.lhs = (n + 1) * (n + 1) * m.mean * m.mean;
  c.rhs = n * (n + 2) * m.second_moment;
  // Gradient of lhs - rhs in (m1, m2) is (2 (n+1)^2 m1, -n(n+2)); the CIs are combined conservatively.
  c.ci = 2 * (n + 1) * (n + 1) * std::abs(m.mean) * m.ci.mean + n * (n + 2) * m.ci.second_moment;
  c.holds = c.lhs - c.rhs <= 4 * c.ci + 1e-12 * c.rhs;
  c.variance_margin = m.variance - m.mean * m.mean / (n * (n + 2));
  return c;
}

double exp_half_moment_1d(const Custom1D& law) {
  // With u = 1 - F(x) = v^2 on the right (and u = F(x) on the left), the depth bound
  // e^{Lambda*/2} <= u^{-1/2} makes the integrand 2 v e^{Lambda*(x(v))/2} bounded by 2.
  constexpr double kVmin = 1e-7;
  auto lstar = [&law](double x) {
    const auto r = cramer_1d(law, x);
    return r.status == LegendreStatus::AtInfinity ? kInf : r.value;
  };
  auto invert = [&law](double u, bool right) {
    // x with sf(x) = u (right) or cdf(x) = u (left): Newton on the log of the tail mass,
    // kept inside a shrinking bracket.
    auto log_mass = [&](double x) { return std::log(right ? law.sf(x) : law.cdf(x)); };
    const double target = std::log(u);
    double inner = 0.0;
    double outer = right ? law.upper() : law.lower();
    if (!std::isfinite(outer)) {
      outer = right ? law.effective_upper() : law.effective_lower();
      while (log_mass(outer) > target) outer = 2 * outer + (right ? 1.0 : -1.0);
    }
    double x = 0.5 * (inner + outer);
    for (int it = 0; it < 200; ++it) {
      const double lm = log_mass(x);
      const double gap = lm - target;
      if (std::abs(gap) < 1e-13) break;
      (gap > 0.0 ? inner : outer) = x;
      // d/dx ln(tail mass) = -+ pdf / mass.
      const double slope = (right ? -1.0 : 1.0) * law.pdf(x) / std::exp(lm);
      double next = x - gap / slope;
      if (!(std::isfinite(next) && (next - inner) * (next - outer) < 0.0)) next = 0.5 * (inner + outer);
      if (next == x) break;
      x = next;
    }
    return x;
  };
  double total = 0.0;
  for (bool right : {false, true}) {
    const double side_mass = right ? law.sf(0.0) : law.cdf(0.0);
    const double vmax = std::sqrt(side_mass);
    // v = e^{-y} turns the slowly varying behaviour near v = 0 into smooth decay in y.
    auto f = [&](double y) {
      const double v = std::exp(-y);
      const double value = lstar(invert(v * v, right));
      return std::isfinite(value) ? 2 * v * v * std::exp(0.5 * value) : 2 * v;
    };
    // Next to a finite support end the Legendre solve reports AtInfinity; the
    // integration then stops where that starts.
    const double y0 = -std::log(vmax);
    double y1 = -std::log(kVmin);
    auto finite_at = [&](double y) {
      const double v = std::exp(-y);
      return std::isfinite(lstar(invert(v * v, right)));
    };
    if (!finite_at(y1)) {
      double good = y0;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (good + y1);
        (finite_at(mid) ? good : y1) = mid;
      }
      y1 = good;
    }
    const auto res = quad::gauss_kronrod(f, y0, y1, 1e-9, 12);
    if (!(res.error <= 1e-7 * std::max(1.0, std::abs(res.value)))) {
      throw PrecisionError("exp_half_moment_1d: quadrature did not converge", total + res.value);
    }
    // The dropped piece v < e^{-y1} has an integrand in [0, 2]; count its midpoint.
    total += res.value + std::exp(-y1);
  }
  return total;
}

Estimate kappa_exp_moment(const MeasureModel& model, const MomentBudget& budget) {
  if (!is_body(model)) throw DomainError("kappa_exp_moment: needs a uniform cube or ball");
  const double kappa = 1.0 / model.dimension();
  const auto values = cramer_sample(model, budget.samples, budget.stream, budget.workers);
  double s = 0.0, s2 = 0.0;
  std::size_t used = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    const double e = std::exp(0.5 * kappa * v);
    s += e;
    s2 += e * e;
    ++used;
  }
  if (used < 2) throw EstimatorDegenerate("kappa_exp_moment: every draw was censored");
  const double m = static_cast<double>(used);
  const double mean = s / m;
  const double se = std::sqrt(std::max(0.0, s2 / m - mean * mean) / m);
  return {mean, se, kZ95 * se, false};
}

double kappa_exp_bound(int n, double c) {
  return std::pow(std::exp(2.0) * n, 1.0 / (2.0 * n)) * c * std::sqrt(static_cast<double>(n));
}

double ball_sublevel_radius(const MeasureModel& ball, double t) {
  if (!is_ball(ball)) throw DomainError("ball_sublevel_radius: needs a ball");
  if (!(t >= 0.0)) throw DomainError("ball_sublevel_radius: t must be nonnegative");
  const double radius = ball.radius();
  const Custom1D& marginal = ball.ball_marginal();
  double lo = 0.0;
  double hi = radius;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const auto r = cramer_1d(marginal, mid);
    const bool above = r.status == LegendreStatus::AtInfinity || r.value > t;
    (above ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<SublevelPoint> sublevel_profile(const MeasureModel& model, std::span<const double> t_grid,
                                            const SublevelBudget& budget) {
  const int n = model.dimension();
  std::vector<SublevelPoint> out;
  out.reserve(t_grid.size());
  if (model.kind() == MeasureKind::StandardGaussian) {
    for (double t : t_grid) {
      const double tt = std::max(t, 0.0);
      SublevelPoint p{t, {boost::math::gamma_p(0.5 * n, tt), 0.0, 0.0, true}, closedform::normal_sf(std::sqrt(2 * tt)),
                      true};
      out.push_back(p);
    }
    return out;
  }
  if (is_ball(model)) {
    const closedform::BallTail tail(n);
    for (double t : t_grid) {
      const double u = std::max(t, 0.0) > 0.0 ? ball_sublevel_radius(model, t) / model.radius() : 0.0;
      out.push_back({t, {std::pow(u, n), 0.0, 0.0, true}, tail.F(u), true});
    }
    return out;
  }
  const auto values = cramer_sample(model, budget.samples, budget.stream, budget.workers);
  const double m = static_cast<double>(values.size());
  for (double t : t_grid) {
    const double hits = static_cast<double>(std::count_if(values.begin(), values.end(), [t](double v) { return v <= t; }));
    const double p = hits / m;
    const double se = std::sqrt(std::max(p * (1 - p), 1.0 / m) / m);
    SublevelPoint sp{t, {p, se, kZ95 * se, false}, kNaN, false};
    // Bodies: the depth lower bound 0.1 exp(-t - 2 sqrt(n)) holds on all of B_t.
    if (is_body(model)) sp.depth_floor = 0.1 * std::exp(-t - 2 * std::sqrt(static_cast<double>(n)));
    out.push_back(sp);
  }
  return out;
}

}  // namespace cramerlab
