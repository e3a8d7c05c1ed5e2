#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace cramerlab::quad {

using Integrand = std::function<double(double)>;

struct Result {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
};

/// Adaptive Gauss-Kronrod (31-point) on [a, b]; either end may be infinite.
Result gauss_kronrod(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                     unsigned max_depth = 15);

/// Double-exponential rule; tolerates integrable endpoint singularities.
Result tanh_sinh(const Integrand& f, double a, double b, double rel_tol = 1e-13);

/// Location and extent of the numerically relevant part of exp(g) for a concave g.
struct ConcaveWindow {
  double argmax = 0.0;
  double peak = -std::numeric_limits<double>::infinity();  // g(argmax)
  double lo = 0.0;  // g(lo) >= peak - drop, or lo is the support end
  double hi = 0.0;
};

/// Locates max g on (lo, hi) by golden-section search (ends may be infinite)
/// and trims the window to where g >= peak - drop.
ConcaveWindow concave_window(const Integrand& g, double lo, double hi, double drop = 40.0);

/// Integral of weight(z) * exp(g(z) - window.peak) over the window.
Result integrate_on_window(const Integrand& weighted, const ConcaveWindow& window,
                           double rel_tol = 1e-12);

/// Monotone (Fritsch-Carlson) cubic interpolant through strictly increasing knots.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, y_, slope_;
};

}  // namespace cramerlab::quad
