#include "cramerlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>

#include "cramerlab/closedform.hpp"
#include "cramerlab/errors.hpp"
#include "cramerlab/parallel.hpp"
#include "cramerlab/quadrature.hpp"

namespace cramerlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// ln(1e16): the effective support keeps density >= 1e-16 * max.
constexpr double kTruncationDrop = 36.841361487904734;
constexpr int kQuantileKnots = 4096;
constexpr double kZ95 = 1.959963984540054;

// E exp(s Z) = pi c s / sin(pi c s) for the logistic law of scale c.
Tilt1D logistic_tilt(double c, double s) {
  const double pc = std::numbers::pi * c;
  const double x = pc * s;
  if (std::abs(x) >= std::numbers::pi) return {kInf, s > 0.0 ? kInf : -kInf, kInf};
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return {x2 * (1.0 / 6 + x2 * (1.0 / 180 + x2 / 2835)), pc * x * (1.0 / 3 + x2 * (1.0 / 45 + 2 * x2 / 945)),
            pc * pc * (1.0 / 3 + x2 * (1.0 / 15 + 2 * x2 / 189))};
  }
  const double sn = std::sin(x);
  return {std::log(x / sn), pc * (1.0 / x - std::cos(x) / sn), pc * pc * (1.0 / (sn * sn) - 1.0 / (x * x))};
}

// S_nu(z) - 1 where S_nu(z) = sum_k (z^2/4)^k Gamma(nu+1) / (k! Gamma(nu+k+1)), so that
// I_nu(z) = (z/2)^nu S_nu(z) / Gamma(nu+1).  All terms are positive.  Returning the
// tail keeps ln S accurate for small z, which the Newton line search relies on.
double bessel_series_tail(double nu, double z) {
  const double q = 0.25 * z * z;
  double term = 1.0;
  double tail = 0.0;
  for (int k = 1; k < 10000; ++k) {
    term *= q / (k * (nu + k));
    tail += term;
    if (term < 1e-17 * (1.0 + tail)) break;
  }
  return tail;
}

// ln I_{nu+1}(z) - ln I_nu(z) and ln I_nu(z) for large z by the uniform (Debye)
// expansion, with the difference formed term by term to keep its precision.
struct DebyeLog {
  double log_i = 0.0;
  double diff = 0.0;
};

double debye_series(double nu, double z) {
  const double root = std::hypot(nu, z);
  const double w = 1.0 / root;
  const double p2 = (nu * w) * (nu * w);
  const double u1 = w * (3 - 5 * p2) / 24;
  const double u2 = w * w * (81 + p2 * (-462 + 385 * p2)) / 1152;
  const double u3 = w * w * w * (30375 + p2 * (-369603 + p2 * (765765 - 425425 * p2))) / 414720;
  const double u4 =
      w * w * w * w * (4465125 + p2 * (-94121676 + p2 * (349922430 + p2 * (-446185740 + 185910725 * p2)))) / 39813120;
  return u1 + u2 + u3 + u4;
}

DebyeLog debye_log_bessel(double nu, double z) {
  // ln I_nu(z) = S - nu ln((nu + S)/z) - ln(2 pi S)/2 + ln(1 + series), S = sqrt(nu^2 + z^2).
  const double s0 = std::hypot(nu, z);
  const double s1 = std::hypot(nu + 1, z);
  auto log_ratio = [z](double v, double root) { return std::log1p((v + v * v / (root + z)) / z); };  // ln((v+root)/z)
  DebyeLog out;
  const double series0 = debye_series(nu, z);
  const double series1 = debye_series(nu + 1, z);
  out.log_i = s0 - nu * log_ratio(nu, s0) - 0.5 * std::log(2 * std::numbers::pi * s0) + std::log1p(series0);
  out.diff = (2 * nu + 1) / (s0 + s1) - (nu + 1) * log_ratio(nu + 1, s1) + nu * log_ratio(nu, s0) -
             0.5 * std::log1p((s1 - s0) / s0) + std::log1p(series1) - std::log1p(series0);
  return out;
}

// First coordinate of the uniform ball of radius R in dimension n = 2 nu:
// E exp(s Z) = Gamma(nu+1) (2/z)^nu I_nu(z) with z = R |s|.
Tilt1D ball_marginal_tilt(double nu, double radius, double s) {
  const double z = radius * std::abs(s);
  const double sign = s > 0.0 ? 1.0 : -1.0;
  if (z < 50.0) {
    const double t0 = bessel_series_tail(nu, z);
    const double r_over_z = (1.0 + bessel_series_tail(nu + 1, z)) / (2 * (nu + 1) * (1.0 + t0));
    const double r = z * r_over_z;
    const double var = 1.0 - (2 * nu + 1) * r_over_z - r * r;
    return {std::log1p(t0), sign * radius * r, radius * radius * std::max(var, 0.0)};
  }
  double value = 0.0;
  double one_minus_r = 0.0;
  if (z < 700.0) {
    const double i0 = boost::math::cyl_bessel_i(nu, z);
    const double i1 = boost::math::cyl_bessel_i(nu + 1, z);
    value = std::lgamma(nu + 1) + nu * std::log(2 / z) + std::log(i0);
    one_minus_r = (i0 - i1) / i0;
  } else {
    const DebyeLog d = debye_log_bessel(nu, z);
    value = std::lgamma(nu + 1) + nu * std::log(2 / z) + d.log_i;
    one_minus_r = -std::expm1(d.diff);
  }
  const double r = 1.0 - one_minus_r;
  // Lambda'' = R^2 (1 - r^2 - (2 nu + 1) r / z).
  const double var = one_minus_r * (2.0 - one_minus_r) - (2 * nu + 1) * r / z;
  return {value, sign * radius * r, radius * radius * std::max(var, 0.0)};
}

}  // namespace


// ---------------------------------------------------------------------------
// Custom1D

struct Custom1D::Impl {
  std::string name;
  LogDensity g;
  double lower = -kInf;
  double upper = kInf;
  double log_norm = 0.0;
  double mode = 0.0;
  double peak = 0.0;  // max of g
  double eff_lo = 0.0;
  double eff_hi = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  bool symmetric = false;
  Custom1D::Exact exact;

  mutable std::once_flag quantile_once;
  mutable quad::MonotoneCubic quantile_table;

  double raw(double z) const {
    if (!(z > lower && z < upper)) return -kInf;
    const double v = g(z);
    return std::isnan(v) ? -kInf : v;
  }

  // int exp(g) over (a, b) with the result in log space.
  double log_mass(double a, double b) const {
    if (!(a < b)) return -kInf;
    auto gg = [this](double z) { return raw(z); };
    const auto w = quad::concave_window(gg, a, b, kTruncationDrop + 4.0);
    auto f = [&](double z) { return std::exp(raw(z) - w.peak); };
    const double mass = quad::integrate_on_window(f, w, 1e-12).value;
    return mass > 0.0 ? w.peak + std::log(mass) : -kInf;
  }

  void build_quantile() const {
    std::vector<double> xs(kQuantileKnots);
    std::vector<double> fs(kQuantileKnots);
    const double step = (eff_hi - eff_lo) / (kQuantileKnots - 1);
    double cumulative = 0.0;
    auto f = [this](double z) { return std::exp(raw(z) - log_norm); };
    xs[0] = eff_lo;
    fs[0] = std::exp(log_mass(lower, eff_lo) - log_norm);
    cumulative = fs[0];
    for (int j = 1; j < kQuantileKnots; ++j) {
      xs[j] = j + 1 == kQuantileKnots ? eff_hi : eff_lo + step * j;
      cumulative += quad::gauss_kronrod(f, xs[j - 1], xs[j], 1e-10, 8).value;
      fs[j] = cumulative;
    }
    // Knots whose CDF does not increase in double precision carry no information.
    std::vector<double> u;
    std::vector<double> x;
    u.reserve(kQuantileKnots);
    x.reserve(kQuantileKnots);
    for (int j = 0; j < kQuantileKnots; ++j) {
      if (u.empty() || fs[j] > u.back()) {
        u.push_back(fs[j]);
        x.push_back(xs[j]);
      }
    }
    quantile_table = quad::MonotoneCubic(std::move(u), std::move(x));
  }
};

Custom1D::Custom1D(std::string name, LogDensity log_density, double lower, double upper)
    : Custom1D(std::move(name), std::move(log_density), lower, upper, Exact{}) {}

Custom1D::Custom1D(std::string name, LogDensity log_density, double lower, double upper, Exact exact) {
  if (!(lower < upper)) throw DomainError("Custom1D: empty support");
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  impl->g = std::move(log_density);
  impl->lower = lower;
  impl->upper = upper;
  const Impl& d = *impl;

  auto gg = [&d](double z) { return d.raw(z); };
  const auto window = quad::concave_window(gg, lower, upper, kTruncationDrop);
  impl->mode = window.argmax;
  impl->peak = window.peak;
  impl->eff_lo = window.lo;
  impl->eff_hi = window.hi;

  // Concavity spot check on a 1000-point grid of the effective support.
  constexpr int kGrid = 1000;
  const double span = impl->eff_hi - impl->eff_lo;
  std::vector<double> grid(kGrid);
  for (int i = 0; i < kGrid; ++i) grid[i] = d.raw(impl->eff_lo + span * (i + 0.5) / kGrid);
  for (int i = 1; i + 1 < kGrid; ++i) {
    const double mid = 0.5 * (grid[i - 1] + grid[i + 1]);
    const double scale = std::max({1.0, std::abs(grid[i]), std::abs(mid)});
    if (!std::isfinite(grid[i]) || grid[i] < mid - 1e-12 * scale) {
      throw DomainError("Custom1D '" + impl->name + "': log-density is not concave");
    }
  }

  auto unit = [&](double z) { return std::exp(d.raw(z) - window.peak); };
  const double mass = quad::integrate_on_window(unit, window, 1e-13).value;
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw DomainError("Custom1D '" + impl->name + "': density does not integrate");
  }
  impl->log_norm = window.peak + std::log(mass);

  const double a = window.argmax;
  auto first = [&](double z) { return (z - a) * unit(z); };
  auto second = [&](double z) { return (z - a) * (z - a) * unit(z); };
  const double m1 = quad::integrate_on_window(first, window, 1e-13).value / mass;
  const double m2 = quad::integrate_on_window(second, window, 1e-13).value / mass;
  impl->mean = a + m1;
  impl->variance = m2 - m1 * m1;
  const double sd = std::sqrt(impl->variance);
  if (std::abs(impl->mean) > 1e-8 * std::max(1.0, sd)) {
    std::ostringstream os;
    os << "Custom1D '" << impl->name << "': mean " << impl->mean << " is not 0";
    throw DomainError(os.str());
  }

  bool symmetric = lower == -upper;
  for (int i = 0; symmetric && i < kGrid; ++i) {
    const double z = impl->eff_lo + span * (i + 0.5) / kGrid;
    const double l = d.raw(z);
    const double r = d.raw(-z);
    if (std::abs(l - r) > 1e-12 * std::max(1.0, std::abs(l))) symmetric = false;
  }
  impl->symmetric = symmetric;
  impl->exact = std::move(exact);
  impl_ = std::move(impl);
}

Custom1D Custom1D::uniform(double half_width) {
  if (!(half_width > 0.0)) throw DomainError("uniform: half width must be positive");
  const double side = 2.0 * half_width;
  auto tilt = [side](double s) -> Tilt1D {
    return {closedform::uniform_log_laplace(s, side), closedform::uniform_log_laplace_d1(s, side),
            closedform::uniform_log_laplace_d2(s, side)};
  };
  auto cdf = [half_width](double x) { return (x + half_width) / (2 * half_width); };
  auto sf = [half_width](double x) { return (half_width - x) / (2 * half_width); };
  return Custom1D("uniform", [](double) { return 0.0; }, -half_width, half_width, {tilt, cdf, sf});
}

Custom1D Custom1D::laplace(double scale) {
  if (!(scale > 0.0)) throw DomainError("laplace: scale must be positive");
  auto tilt = [scale](double s) -> Tilt1D {
    const double bs = scale * s;
    if (std::abs(bs) >= 1.0) return {kInf, s > 0.0 ? kInf : -kInf, kInf};
    const double q = 1.0 - bs * bs;
    return {-std::log1p(-bs * bs), 2.0 * scale * bs / q, 2.0 * scale * scale * (1.0 + bs * bs) / (q * q)};
  };
  auto sf = [scale](double x) {
    return x >= 0.0 ? 0.5 * std::exp(-x / scale) : 1.0 - 0.5 * std::exp(x / scale);
  };
  auto cdf = [sf](double x) { return sf(-x); };
  return Custom1D("laplace", [scale](double z) { return -std::abs(z) / scale; }, -kInf, kInf, {tilt, cdf, sf});
}

Custom1D Custom1D::centered_exponential(double rate) {
  if (!(rate > 0.0)) throw DomainError("centered_exponential: rate must be positive");
  const double shift = 1.0 / rate;
  auto tilt = [rate, shift](double s) -> Tilt1D {
    if (s >= rate) return {kInf, kInf, kInf};
    const double gap = rate - s;
    // -s/rate - ln(1 - s/rate), written to stay accurate for small s.
    const double u = s / rate;
    const double value = std::abs(u) < 1e-4 ? u * u * (0.5 + u * (1.0 / 3.0 + 0.25 * u)) : -u - std::log1p(-u);
    return {value, s / (rate * gap), 1.0 / (gap * gap)};
  };
  auto cdf = [rate, shift](double x) { return -std::expm1(-rate * (x + shift)); };
  auto sf = [rate, shift](double x) { return std::exp(-rate * (x + shift)); };
  return Custom1D(
      "centered_exponential", [rate, shift](double z) { return -rate * (z + shift); }, -shift, kInf,
      {tilt, cdf, sf});
}

Custom1D Custom1D::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian: sigma must be positive");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double var = sigma * sigma;
  auto tilt = [var](double s) -> Tilt1D { return {0.5 * var * s * s, var * s, var}; };
  auto cdf = [sigma](double x) { return closedform::normal_sf(-x / sigma); };
  auto sf = [sigma](double x) { return closedform::normal_sf(x / sigma); };
  return Custom1D("gaussian", [inv](double z) { return -z * z * inv; }, -kInf, kInf, {tilt, cdf, sf});
}

Custom1D Custom1D::logistic(double scale) {
  if (!(scale > 0.0)) throw DomainError("logistic: scale must be positive");
  return Custom1D(
      "logistic",
      [scale](double z) {
        const double a = std::abs(z) / scale;
        return -a - 2.0 * std::log1p(std::exp(-a));
      },
      -kInf, kInf,
      {[scale](double s) { return logistic_tilt(scale, s); },
       [scale](double x) { return 1.0 / (1.0 + std::exp(-x / scale)); },
       [scale](double x) { return 1.0 / (1.0 + std::exp(x / scale)); }});
}

Custom1D Custom1D::ball_marginal(int n, double radius) {
  if (n < 1 || !(radius > 0.0)) throw DomainError("ball_marginal: bad dimension or radius");
  const double a = 0.5 * (n - 1);
  const auto tail = std::make_shared<const closedform::BallTail>(n);
  return Custom1D(
      "ball_marginal",
      [a, radius](double z) {
        if (a == 0.0) return 0.0;
        const double u = z / radius;
        return a * std::log1p(-u * u);
      },
      -radius, radius,
      {[n, radius](double s) { return ball_marginal_tilt(0.5 * n, radius, s); },
       [tail, radius](double x) { return x <= 0.0 ? tail->F(-x / radius) : 1.0 - tail->F(x / radius); },
       [tail, radius](double x) { return x >= 0.0 ? tail->F(x / radius) : 1.0 - tail->F(-x / radius); }});
}

const std::string& Custom1D::name() const { return impl_->name; }
double Custom1D::lower() const { return impl_->lower; }
double Custom1D::upper() const { return impl_->upper; }
double Custom1D::effective_lower() const { return impl_->eff_lo; }
double Custom1D::effective_upper() const { return impl_->eff_hi; }
double Custom1D::mean() const { return impl_->mean; }
double Custom1D::variance() const { return impl_->variance; }
double Custom1D::log_sup_density() const { return impl_->peak - impl_->log_norm; }
bool Custom1D::symmetric() const { return impl_->symmetric; }

double Custom1D::log_pdf(double x) const { return impl_->raw(x) - impl_->log_norm; }
double Custom1D::pdf(double x) const { return std::exp(log_pdf(x)); }

double Custom1D::cdf(double x) const {
  const Impl& d = *impl_;
  if (x <= d.lower) return 0.0;
  if (x >= d.upper) return 1.0;
  if (d.exact.cdf) return d.exact.cdf(x);
  if (x <= d.mode) return std::exp(d.log_mass(d.lower, x) - d.log_norm);
  return 1.0 - std::exp(d.log_mass(x, d.upper) - d.log_norm);
}

double Custom1D::sf(double x) const {
  const Impl& d = *impl_;
  if (x <= d.lower) return 1.0;
  if (x >= d.upper) return 0.0;
  if (d.exact.sf) return d.exact.sf(x);
  if (x >= d.mode) return std::exp(d.log_mass(x, d.upper) - d.log_norm);
  return 1.0 - std::exp(d.log_mass(d.lower, x) - d.log_norm);
}

double Custom1D::quantile(double u) const {
  std::call_once(impl_->quantile_once, [this] { impl_->build_quantile(); });
  return impl_->quantile_table(u);
}

double Custom1D::normalization_check() const {
  const Impl& d = *impl_;
  auto f = [&d](double z) { return std::exp(d.raw(z) - d.log_norm); };
  // Independent rule: double exponential on the effective window, split at the mode.
  double total = 0.0;
  if (d.mode > d.eff_lo) total += quad::tanh_sinh(f, d.eff_lo, d.mode, 1e-12).value;
  if (d.mode < d.eff_hi) total += quad::tanh_sinh(f, d.mode, d.eff_hi, 1e-12).value;
  return total;
}

Tilt1D Custom1D::tilt(double s) const {
  const Impl& d = *impl_;
  if (s == 0.0) return {0.0, d.mean, d.variance};
  if (d.exact.tilt) return d.exact.tilt(s);
  auto h = [&d, s](double z) { return d.raw(z) + s * z; };
  // On an unbounded side the tilted density must still decay; otherwise Lambda(s) = +inf.
  const double far = 1e6 * (1.0 + std::max(std::abs(d.eff_lo), std::abs(d.eff_hi)));
  if ((s > 0.0 && !std::isfinite(d.upper) && h(far + 1.0) >= h(far)) ||
      (s < 0.0 && !std::isfinite(d.lower) && h(-far - 1.0) >= h(-far))) {
    return {kInf, s > 0.0 ? kInf : -kInf, kInf};
  }
  const auto w = quad::concave_window(h, d.lower, d.upper, kTruncationDrop + 4.0);
  const double a = w.argmax;
  auto e = [&](double z) { return std::exp(h(z) - w.peak); };
  auto e1 = [&](double z) { return (z - a) * e(z); };
  auto e2 = [&](double z) { return (z - a) * (z - a) * e(z); };
  const double i0 = quad::integrate_on_window(e, w, 1e-13).value;
  const double i1 = quad::integrate_on_window(e1, w, 1e-13).value;
  const double i2 = quad::integrate_on_window(e2, w, 1e-13).value;
  if (!(i0 > 0.0)) throw PrecisionError("Custom1D::tilt: tilted mass vanished");
  const double m1 = i1 / i0;
  return {w.peak + std::log(i0) - d.log_norm, a + m1, std::max(0.0, i2 / i0 - m1 * m1)};
}

double Custom1D::positive_moment(double p) const {
  const Impl& d = *impl_;
  if (!(p > 0.0)) throw DomainError("positive_moment: p must be positive");
  if (d.upper <= 0.0) return 0.0;
  const double lo = std::max(0.0, d.lower);
  auto h = [&d, p](double z) { return z > 0.0 ? d.raw(z) + p * std::log(z) : -kInf; };
  const auto w = quad::concave_window(h, lo, d.upper, kTruncationDrop + 4.0);
  auto e = [&](double z) { return std::exp(h(z) - w.peak); };
  const double i0 = quad::integrate_on_window(e, w, 1e-13).value;
  return std::exp(w.peak - d.log_norm) * i0;
}

double Custom1D::negative_moment(double p) const {
  const Impl& d = *impl_;
  if (!(p > 0.0)) throw DomainError("negative_moment: p must be positive");
  if (d.lower >= 0.0) return 0.0;
  const double hi = std::min(0.0, d.upper);
  auto h = [&d, p](double z) { return z < 0.0 ? d.raw(z) + p * std::log(-z) : -kInf; };
  const auto w = quad::concave_window(h, d.lower, hi, kTruncationDrop + 4.0);
  auto e = [&](double z) { return std::exp(h(z) - w.peak); };
  const double i0 = quad::integrate_on_window(e, w, 1e-13).value;
  return std::exp(w.peak - d.log_norm) * i0;
}

// ---------------------------------------------------------------------------
// MeasureModel

const char* to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::UniformCube: return "UniformCube";
    case MeasureKind::UniformBallVol1: return "UniformBallVol1";
    case MeasureKind::UniformBallUnit: return "UniformBallUnit";
    case MeasureKind::StandardGaussian: return "StandardGaussian";
    case MeasureKind::Product: return "Product";
    case MeasureKind::Custom1D: return "Custom1D";
  }
  return "?";
}

namespace {

void require_dimension(int n) {
  if (n < 1) throw DomainError("measure dimension must be positive");
}

double log_ball_volume(int n, double radius) {
  const double dn = n;
  return 0.5 * dn * std::log(std::numbers::pi) - std::lgamma(0.5 * dn + 1.0) + dn * std::log(radius);
}

}  // namespace

MeasureModel MeasureModel::uniform_cube(int n, double side) {
  require_dimension(n);
  if (!(side > 0.0)) throw DomainError("uniform_cube: side must be positive");
  MeasureModel m;
  m.kind_ = MeasureKind::UniformCube;
  m.n_ = n;
  m.side_ = side;
  m.support_.shape = Support::Shape::Box;
  m.support_.lower = Eigen::VectorXd::Constant(n, -0.5 * side);
  m.support_.upper = Eigen::VectorXd::Constant(n, 0.5 * side);
  m.caps_.closed_form_laplace = true;
  m.components_.assign(static_cast<std::size_t>(n), Custom1D::uniform(0.5 * side));
  return m;
}

MeasureModel MeasureModel::uniform_ball(int n, double radius) {
  require_dimension(n);
  if (!(radius > 0.0)) throw DomainError("uniform_ball: radius must be positive");
  MeasureModel m;
  m.kind_ = MeasureKind::UniformBallUnit;
  m.n_ = n;
  m.radius_ = radius;
  m.support_.shape = Support::Shape::Ball;
  m.support_.radius = radius;
  m.caps_.exact_depth = true;
  m.caps_.exact_tail = true;
  m.marginal_ = std::make_shared<const Custom1D>(Custom1D::ball_marginal(n, radius));
  return m;
}

MeasureModel MeasureModel::uniform_ball_unit(int n) { return uniform_ball(n, 1.0); }

MeasureModel MeasureModel::uniform_ball_vol1(int n) {
  require_dimension(n);
  // Radius with pi^{n/2} r^n / Gamma(n/2+1) = 1.
  const double radius = std::exp(std::lgamma(0.5 * n + 1.0) / n) / std::sqrt(std::numbers::pi);
  MeasureModel m = uniform_ball(n, radius);
  m.kind_ = MeasureKind::UniformBallVol1;
  if (std::abs(log_ball_volume(n, radius)) > 1e-12) {
    throw DomainError("uniform_ball_vol1: volume normalization failed");
  }
  return m;
}

MeasureModel MeasureModel::standard_gaussian(int n) {
  require_dimension(n);
  MeasureModel m;
  m.kind_ = MeasureKind::StandardGaussian;
  m.n_ = n;
  m.support_.shape = Support::Shape::Whole;
  m.caps_ = {true, true, true, true};
  return m;
}

MeasureModel MeasureModel::product(std::vector<Custom1D> components) {
  if (components.empty()) throw DomainError("product: need at least one component");
  MeasureModel m;
  m.kind_ = MeasureKind::Product;
  m.n_ = static_cast<int>(components.size());
  m.support_.shape = Support::Shape::Box;
  m.support_.lower.resize(m.n_);
  m.support_.upper.resize(m.n_);
  for (int i = 0; i < m.n_; ++i) {
    m.support_.lower[i] = components[i].lower();
    m.support_.upper[i] = components[i].upper();
  }
  if (m.support_.lower.array().isInf().all() && m.support_.upper.array().isInf().all()) {
    m.support_.shape = Support::Shape::Whole;
  }
  m.components_ = std::move(components);
  return m;
}

MeasureModel MeasureModel::custom1d(Custom1D component) {
  MeasureModel m = product({std::move(component)});
  m.kind_ = MeasureKind::Custom1D;
  m.caps_.exact_depth = true;
  m.caps_.exact_tail = true;
  return m;
}

const Custom1D& MeasureModel::ball_marginal() const {
  if (!marginal_) throw DomainError("ball_marginal: model is not a ball");
  return *marginal_;
}

bool MeasureModel::is_body() const {
  return kind_ == MeasureKind::UniformCube || kind_ == MeasureKind::UniformBallVol1 ||
         kind_ == MeasureKind::UniformBallUnit;
}

bool MeasureModel::centrally_symmetric() const {
  if (kind_ == MeasureKind::Product || kind_ == MeasureKind::Custom1D) {
    return std::all_of(components_.begin(), components_.end(),
                       [](const Custom1D& c) { return c.symmetric(); });
  }
  return true;
}

double MeasureModel::log_sup_density() const {
  switch (kind_) {
    case MeasureKind::UniformCube: return -n_ * std::log(side_);
    case MeasureKind::UniformBallVol1:
    case MeasureKind::UniformBallUnit: return -log_ball_volume(n_, radius_);
    case MeasureKind::StandardGaussian: return -0.5 * n_ * std::log(2.0 * std::numbers::pi);
    default: {
      double total = 0.0;
      for (const auto& c : components_) total += c.log_sup_density();
      return total;
    }
  }
}

Eigen::VectorXd MeasureModel::marginal_variances() const {
  switch (kind_) {
    case MeasureKind::UniformCube: return Eigen::VectorXd::Constant(n_, side_ * side_ / 12.0);
    case MeasureKind::UniformBallVol1:
    case MeasureKind::UniformBallUnit:
      return Eigen::VectorXd::Constant(n_, radius_ * radius_ / (n_ + 2.0));
    case MeasureKind::StandardGaussian: return Eigen::VectorXd::Ones(n_);
    default: {
      Eigen::VectorXd v(n_);
      for (int i = 0; i < n_; ++i) v[i] = components_[i].variance();
      return v;
    }
  }
}

double MeasureModel::largest_marginal_variance() const { return marginal_variances().maxCoeff(); }

bool MeasureModel::in_interior(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw DomainError("point has the wrong dimension");
  switch (support_.shape) {
    case Support::Shape::Whole: return x.allFinite();
    case Support::Shape::Ball: return x.norm() < support_.radius;
    case Support::Shape::Box:
      return (x.array() > support_.lower.array()).all() && (x.array() < support_.upper.array()).all();
  }
  return false;
}

double MeasureModel::body_norm(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw DomainError("point has the wrong dimension");
  switch (kind_) {
    case MeasureKind::UniformCube: return x.cwiseAbs().maxCoeff() / (0.5 * side_);
    case MeasureKind::UniformBallVol1:
    case MeasureKind::UniformBallUnit: return x.norm() / radius_;
    default: throw DomainError("body_norm: model is not a convex body");
  }
}

std::string MeasureModel::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(n=" << n_;
  if (kind_ == MeasureKind::UniformCube) os << ", side=" << side_;
  if (marginal_) os << ", radius=" << radius_;
  if (kind_ == MeasureKind::Product || kind_ == MeasureKind::Custom1D) {
    os << ", [";
    for (std::size_t i = 0; i < components_.size(); ++i) os << (i ? "," : "") << components_[i].name();
    os << "]";
  }
  os << ")";
  return os.str();
}

std::uint64_t MeasureModel::draws_per_sample() const {
  switch (kind_) {
    case MeasureKind::StandardGaussian: return RngEngine::normal_draws(n_);
    case MeasureKind::UniformBallVol1:
    case MeasureKind::UniformBallUnit: return RngEngine::normal_draws(n_) + 1;
    default: return static_cast<std::uint64_t>(n_);
  }
}

void MeasureModel::sample_into(Eigen::Ref<PointMatrix> out, RngStream stream,
                               std::uint64_t first_index) const {
  if (out.cols() != n_) throw DomainError("sample_into: wrong column count");
  const std::uint64_t k = draws_per_sample();
  std::vector<double> buffer(static_cast<std::size_t>(n_));
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    RngEngine eng(stream, (first_index + static_cast<std::uint64_t>(i)) * k);
    auto row = out.row(i);
    switch (kind_) {
      case MeasureKind::UniformCube:
        for (int j = 0; j < n_; ++j) row[j] = (eng.uniform() - 0.5) * side_;
        break;
      case MeasureKind::StandardGaussian:
        eng.fill_normal(buffer);
        for (int j = 0; j < n_; ++j) row[j] = buffer[j];
        break;
      case MeasureKind::UniformBallVol1:
      case MeasureKind::UniformBallUnit: {
        eng.fill_normal(buffer);
        double norm2 = 0.0;
        for (double v : buffer) norm2 += v * v;
        const double r = radius_ * std::pow(eng.uniform(), 1.0 / n_) / std::sqrt(norm2);
        for (int j = 0; j < n_; ++j) row[j] = buffer[j] * r;
        break;
      }
      default:
        for (int j = 0; j < n_; ++j) row[j] = components_[j].quantile(eng.uniform());
        break;
    }
  }
}

PointMatrix sample(const MeasureModel& model, std::size_t count, RngStream stream, int workers) {
  if (count < 1) throw DomainError("sample: count must be at least 1");
  PointMatrix out(static_cast<Eigen::Index>(count), model.dimension());
  constexpr std::size_t kChunk = 4096;
  parallel_chunks(count, kChunk, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    model.sample_into(out.middleRows(static_cast<Eigen::Index>(begin),
                                     static_cast<Eigen::Index>(end - begin)),
                      stream, begin);
  });
  return out;
}

double log_density(const MeasureModel& model, const Eigen::VectorXd& x) {
  const int n = model.dimension();
  if (x.size() != n) throw DomainError("log_density: point has the wrong dimension");
  switch (model.kind()) {
    case MeasureKind::UniformCube:
      return model.in_interior(x) || (x.cwiseAbs().maxCoeff() <= 0.5 * model.side())
                 ? -n * std::log(model.side())
                 : -kInf;
    case MeasureKind::UniformBallVol1:
    case MeasureKind::UniformBallUnit:
      return x.norm() <= model.radius() ? -log_ball_volume(n, model.radius()) : -kInf;
    case MeasureKind::StandardGaussian:
      return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * x.squaredNorm();
    default: {
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += model.components()[i].log_pdf(x[i]);
      return total;
    }
  }
}

// ---------------------------------------------------------------------------
// Directional tails

void require_unit(const Eigen::VectorXd& theta) {
  const double norm = theta.norm();
  if (!(norm > 0.0)) throw DomainError("direction has zero norm");
  if (std::abs(norm - 1.0) > 1e-12) throw DomainError("direction is not a unit vector");
}

namespace {

Estimate exact_estimate(double p) { return {std::clamp(p, 0.0, 1.0), 0.0, 0.0, true}; }

// Index of the only nonzero coordinate of an axis direction, or -1.
int axis_of(const Eigen::VectorXd& theta) {
  int axis = -1;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (std::abs(theta[i]) > 1e-12) {
      if (axis >= 0) return -1;
      axis = static_cast<int>(i);
    }
  }
  return axis;
}

}  // namespace

DirectionalTail::DirectionalTail(const MeasureModel& model, const TailBudget& budget)
    : model_(model), budget_(budget) {
  if (budget.samples < 1) throw DomainError("DirectionalTail: need at least one sample");
  const auto kind = model.kind();
  if (kind == MeasureKind::UniformCube) {
    // Raw uniforms; the tilted importance sampler transforms them per direction.
    draws_.resize(static_cast<Eigen::Index>(budget.samples), model.dimension());
    const int n = model.dimension();
    parallel_chunks(budget.samples, 4096, budget.workers,
                    [&](std::size_t, std::size_t begin, std::size_t end) {
                      for (std::size_t i = begin; i < end; ++i) {
                        RngEngine eng(budget.stream, i * static_cast<std::uint64_t>(n));
                        for (int j = 0; j < n; ++j) draws_(static_cast<Eigen::Index>(i), j) = eng.uniform();
                      }
                    });
  } else if (kind == MeasureKind::Product) {
    draws_ = sample(model, budget.samples, budget.stream, budget.workers);
  }
}

bool DirectionalTail::exact_for(const Eigen::VectorXd& theta) const {
  if (model_.capabilities().exact_tail) return true;
  return model_.separable() && axis_of(theta) >= 0;
}

Estimate DirectionalTail::operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& theta) const {
  const int n = model_.dimension();
  if (x.size() != n || theta.size() != n) throw DomainError("directional_tail: dimension mismatch");
  require_unit(theta);
  const double c = x.dot(theta);
  switch (model_.kind()) {
    case MeasureKind::StandardGaussian: return exact_estimate(closedform::normal_sf(c));
    case MeasureKind::UniformBallVol1:
    case MeasureKind::UniformBallUnit: {
      const double u = c / model_.radius();
      if (u >= 1.0) return exact_estimate(0.0);
      if (u <= -1.0) return exact_estimate(1.0);
      const closedform::BallTail tail(n);
      return exact_estimate(u >= 0.0 ? tail.F(u) : 1.0 - tail.F(-u));
    }
    default: break;
  }
  const int axis = axis_of(theta);
  if (axis >= 0) {
    const auto& comp = model_.components()[axis];
    return exact_estimate(theta[axis] > 0.0 ? comp.sf(x[axis]) : comp.cdf(x[axis]));
  }
  if (model_.kind() == MeasureKind::UniformCube) {
    const double reach = 0.5 * model_.side() * theta.lpNorm<1>();
    if (c >= reach) return exact_estimate(0.0);
    if (c <= -reach) return exact_estimate(1.0);
    if (c == 0.0) return exact_estimate(0.5);
    if (c > 0.0) return cube_tilted(c, theta);
    // Central symmetry: P(<theta,Z> >= c) = 1 - P(<theta,Z> > -c).
    Estimate e = cube_tilted(-c, theta);
    e.value = 1.0 - e.value;
    return e;
  }
  return plain(c, theta);
}

Estimate DirectionalTail::plain(double c, const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd proj = draws_ * theta;
  const double m = static_cast<double>(proj.size());
  const double hits = static_cast<double>((proj.array() >= c).count());
  const double p = hits / m;
  const double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / m) / m);
  return {p, se, kZ95 * se, false};
}

Estimate DirectionalTail::cube_tilted(double c, const Eigen::VectorXd& theta) const {
  // Exponential tilting along theta with tilt lambda chosen so the tilted mean of
  // <theta, Z> is c; then every accepted draw has weight <= exp(-(lambda c - Lambda)).
  const double side = model_.side();
  const double a = 0.5 * side;
  const int n = model_.dimension();
  auto mean_at = [&](double lambda) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += theta[i] * closedform::uniform_log_laplace_d1(lambda * theta[i], side);
    return s;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (mean_at(hi) < c && hi < 1e15) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_at(mid) < c ? lo : hi) = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  Eigen::VectorXd t = lambda * theta;
  double log_laplace = 0.0;
  for (int i = 0; i < n; ++i) log_laplace += closedform::uniform_log_laplace(t[i], side);

  // Tilted coordinates by inverse CDF of density proportional to exp(t z) on [-a, a].
  std::vector<double> e2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) e2[i] = std::exp(-2.0 * a * std::abs(t[i]));
  const Eigen::Index m = draws_.rows();
  double sum = 0.0;
  double sum2 = 0.0;
  for (Eigen::Index r = 0; r < m; ++r) {
    double proj = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = draws_(r, i);
      const double ti = t[i];
      double z;
      if (std::abs(ti) * a < 1e-9) {
        z = (u - 0.5) * side;
      } else if (ti > 0.0) {
        z = a + std::log(u + (1.0 - u) * e2[i]) / ti;
      } else {
        z = -a + std::log(1.0 - u + u * e2[i]) / ti;
      }
      proj += theta[i] * z;
    }
    if (proj >= c) {
      const double w = std::exp(log_laplace - lambda * proj);
      sum += w;
      sum2 += w * w;
    }
  }
  const double dm = static_cast<double>(m);
  const double p = sum / dm;
  const double var = std::max(0.0, sum2 / dm - p * p);
  const double se = std::sqrt(var / dm);
  return {std::min(p, 1.0), se, kZ95 * se, false};
}

Estimate directional_tail(const MeasureModel& model, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& theta, const TailBudget& budget) {
  require_unit(theta);
  TailBudget lean = budget;
  // The exact kinds never touch the draws.
  if (model.capabilities().exact_tail) lean.samples = 1;
  return DirectionalTail(model, lean)(x, theta);
}

}  // namespace cramerlab
