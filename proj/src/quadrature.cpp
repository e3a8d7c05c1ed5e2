#include "cramerlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cramerlab/errors.hpp"

namespace cramerlab::quad {

Result gauss_kronrod(const Integrand& f, double a, double b, double rel_tol, unsigned max_depth) {
  if (a == b) return {};
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, max_depth, rel_tol, &error);
  return {value, error};
}

Result tanh_sinh(const Integrand& f, double a, double b, double rel_tol) {
  if (a == b) return {};
  // integrate() is not const-qualified in this Boost release; one rule per thread.
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double error = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate(f, a, b, rel_tol, &error, &l1);
  return {value, error};
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

// Finds the boundary where g crosses `level` between `inside` (g >= level) and `outside`.
double bisect_level(const Integrand& g, double inside, double outside, double level) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (g(mid) >= level) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return outside;
}

double finite_value(const Integrand& g, double z) {
  const double v = g(z);
  return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

}  // namespace

ConcaveWindow concave_window(const Integrand& g_raw, double lo, double hi, double drop) {
  auto g = [&](double z) { return finite_value(g_raw, z); };
  // Bracket the maximizer when an end is infinite: march outward while g increases.
  double a = lo;
  double b = hi;
  if (!std::isfinite(a) || !std::isfinite(b)) {
    double center = std::isfinite(a) ? a + 1.0 : (std::isfinite(b) ? b - 1.0 : 0.0);
    double step = 1.0;
    if (!std::isfinite(a)) {
      double left = center - step;
      while (g(left) >= g(center) && step < 1e300) {
        center = left;
        step *= 2.0;
        left = center - step;
      }
      a = left;
    }
    step = 1.0;
    if (!std::isfinite(b)) {
      double right = center + step;
      double base = center;
      while (g(right) >= g(base) && step < 1e300) {
        base = right;
        step *= 2.0;
        right = base + step;
      }
      b = right;
    }
  }
  // Golden-section search for the maximum of a concave function on [a, b].
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double g1 = g(x1);
  double g2 = g(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + kInvPhi * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - kInvPhi * (b - a);
      g1 = g(x1);
    }
  }
  ConcaveWindow w;
  w.argmax = g1 >= g2 ? x1 : x2;
  w.peak = std::max(g1, g2);
  // The ends themselves may carry the maximum (e.g. a linear tilt of a flat density).
  for (double end : {lo, hi}) {
    if (std::isfinite(end)) {
      const double ge = g(end);
      if (ge > w.peak) {
        w.peak = ge;
        w.argmax = end;
      }
    }
  }
  if (!std::isfinite(w.peak)) throw PrecisionError("concave_window: integrand has no finite value");
  const double level = w.peak - drop;

  auto trim = [&](double end, double direction) {
    if (std::isfinite(end) && g(end) >= level) return end;
    double step = 1.0;
    double probe = w.argmax + direction * step;
    while (true) {
      if (std::isfinite(end) && (direction > 0 ? probe >= end : probe <= end)) {
        probe = end;
        break;
      }
      if (g(probe) < level) break;
      step *= 2.0;
      probe = w.argmax + direction * step;
    }
    return bisect_level(g, w.argmax, probe, level);
  };
  w.lo = trim(lo, -1.0);
  w.hi = trim(hi, +1.0);
  return w;
}

Result integrate_on_window(const Integrand& weighted, const ConcaveWindow& window, double rel_tol) {
  if (window.lo >= window.hi) return {};
  // Split at the mode so the peak is never hidden inside one wide panel.
  // A sliver panel next to an end cannot meet a relative tolerance and would recurse to
  // full depth, so the split is skipped when either side is that thin.
  constexpr unsigned kDepth = 10;
  const double sliver = 1e-6 * (window.hi - window.lo);
  if (window.argmax - window.lo < sliver || window.hi - window.argmax < sliver) {
    return gauss_kronrod(weighted, window.lo, window.hi, rel_tol, kDepth);
  }
  const Result left = gauss_kronrod(weighted, window.lo, window.argmax, rel_tol, kDepth);
  const Result right = gauss_kronrod(weighted, window.argmax, window.hi, rel_tol, kDepth);
  return {left.value + right.value, left.error + right.error};
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw DomainError("MonotoneCubic: need at least two knots");
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dx = x_[i + 1] - x_[i];
    if (!(dx > 0.0)) throw DomainError("MonotoneCubic: knots must be strictly increasing");
    secant[i] = (y_[i + 1] - y_[i]) / dx;
  }
  slope_.assign(n, 0.0);
  slope_[0] = secant[0];
  slope_[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] * secant[i] <= 0.0) {
      slope_[i] = 0.0;
    } else {
      // Harmonic mean keeps the interpolant monotone.
      slope_[i] = 2.0 / (1.0 / secant[i - 1] + 1.0 / secant[i]);
    }
  }
}

double MonotoneCubic::operator()(double t) const {
  if (t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * slope_[i] +
         (-2 * s3 + 3 * s2) * y_[i + 1] + (s3 - s2) * h * slope_[i + 1];
}

}  // namespace cramerlab::quad
