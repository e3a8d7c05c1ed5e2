#include "cramerlab/closedform.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "cramerlab/errors.hpp"
#include "cramerlab/quadrature.hpp"

namespace cramerlab::closedform {

namespace {
constexpr std::int64_t kExactHarmonicLimit = 1'000'000;
}

double harmonic(std::int64_t m) {
  if (m < 1) throw DomainError("harmonic: m must be positive");
  if (m > kExactHarmonicLimit) {
    return boost::math::digamma(static_cast<double>(m) + 1.0) +
           boost::math::constants::euler<double>();
  }
  double sum = 0.0;
  for (std::int64_t k = m; k >= 1; --k) sum += 1.0 / static_cast<double>(k);
  return sum;
}

double harmonic2(std::int64_t m) {
  if (m < 1) throw DomainError("harmonic2: m must be positive");
  if (m > kExactHarmonicLimit) {
    return std::numbers::pi * std::numbers::pi / 6.0 -
           boost::math::trigamma(static_cast<double>(m) + 1.0);
  }
  double sum = 0.0;
  for (std::int64_t k = m; k >= 1; --k) {
    const double kk = static_cast<double>(k);
    sum += 1.0 / (kk * kk);
  }
  return sum;
}

LogIntegrals log_integral_moments(int n) {
  if (n < 1) throw DomainError("log_integral_moments: n must be positive");
  const double hn = harmonic(n);
  const double dn = static_cast<double>(n);
  return {-hn / dn, (hn * hn + harmonic2(n)) / dn};
}

LogIntegrals log_integral_moments_quadrature(int n) {
  if (n < 1) throw DomainError("log_integral_moments_quadrature: n must be positive");
  // Substitute s = 1 - r so the log singularity sits at the origin.
  auto first = [n](double s) { return std::pow(1.0 - s, n - 1) * std::log(s); };
  auto second = [n](double s) {
    const double l = std::log(s);
    return std::pow(1.0 - s, n - 1) * l * l;
  };
  return {quad::tanh_sinh(first, 0.0, 1.0, 1e-15).value,
          quad::tanh_sinh(second, 0.0, 1.0, 1e-15).value};
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double log_normal_sf(double z) {
  if (z < 5.0) return std::log(normal_sf(z));
  // Continued-fraction asymptotics of the Mills ratio; relative error < 1e-15 for z >= 5.
  double frac = z;
  for (int k = 60; k >= 1; --k) frac = z + k / frac;
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(frac);
}

BallTail::BallTail(int n) : n_(n) {
  if (n < 1) throw DomainError("BallTail: dimension must be positive");
  const double dn = static_cast<double>(n);
  log_c_n_ = std::lgamma(dn / 2.0 + 1.0) - std::lgamma((dn + 1.0) / 2.0) -
             0.5 * std::log(std::numbers::pi);
  c_n_ = std::exp(log_c_n_);
}

double BallTail::F_quadrature(double r) const {
  if (r < 0.0 || r > 1.0) throw DomainError("BallTail::F_quadrature: r must lie in [0, 1]");
  const double a = 0.5 * (n_ - 1);
  auto integrand = [a](double t) { return std::pow(1.0 - t * t, a); };
  return c_n_ * quad::tanh_sinh(integrand, r, 1.0, 1e-14).value;
}

double BallTail::F(double r) const {
  if (r < 0.0 || r > 1.0) throw DomainError("BallTail::F: r must lie in [0, 1]");
  if (r == 1.0) return 0.0;
  const double q = (1.0 - r) * (1.0 + r);
  return 0.5 * boost::math::ibeta(0.5 * (n_ + 1), 0.5, q);
}

double BallTail::log_F(double r) const {
  if (r < 0.0 || r > 1.0) throw DomainError("BallTail::log_F: r must lie in [0, 1]");
  if (r == 1.0) return -std::numeric_limits<double>::infinity();
  const double f = F(r);
  if (f > 1e-280) return std::log(f);
  return 0.5 * (n_ + 1) * std::log1p(-r * r) + log_h(r);
}

double BallTail::h(double r) const {
  if (r < 0.0 || r > 1.0) throw DomainError("BallTail::h: r must lie in [0, 1]");
  return std::exp(log_h(r));
}

double BallTail::log_h(double r) const {
  if (r < 0.0 || r > 1.0) throw DomainError("BallTail::log_h: r must lie in [0, 1]");
  const double q = (1.0 - r) * (1.0 + r);
  const double f = r < 1.0 ? F(r) : 0.0;
  if (f > 1e-280) return std::log(f) - 0.5 * (n_ + 1) * std::log(q);
  // h(r, n) = (c_n/2) int_0^1 u^{(n-1)/2} (1 - u q)^{-1/2} du  (u = (1-t^2)/(1-r^2)).
  const double a = 0.5 * (n_ - 1);
  auto integrand = [a, q](double u) { return std::pow(u, a) / std::sqrt(1.0 - u * q); };
  // u^a has an algebraic singularity at 0 for even n; the double-exponential rule absorbs it.
  const double integral = quad::tanh_sinh(integrand, 0.0, 1.0, 1e-14).value;
  return log_c_n_ - std::log(2.0) + std::log(integral);
}

double BallTail::half_mass() const {
  const double a = 0.5 * (n_ - 1);
  auto integrand = [a](double t) { return std::pow(1.0 - t * t, a); };
  return c_n_ * quad::tanh_sinh(integrand, 0.0, 1.0, 1e-15).value;
}

double ball_mean_omega_leading(int n) {
  if (n % 2 != 0) return std::numeric_limits<double>::quiet_NaN();
  return 0.5 * (n + 1) * harmonic(n / 2);
}

double ball_second_omega_leading(int n) {
  if (n % 2 != 0) return std::numeric_limits<double>::quiet_NaN();
  const double hh = harmonic(n / 2);
  return 0.25 * (n + 1.0) * (n + 1.0) * hh * hh;
}

namespace {

double radial_omega_moment(int n, int power) {
  const BallTail tail(n);
  auto integrand = [&](double r) {
    if (r >= 1.0) return 0.0;
    const double omega = -tail.log_F(r);
    return std::pow(r, n - 1) * std::pow(omega, power);
  };
  // The log singularity at r = 1 is integrable; split so the smooth bulk uses Gauss-Kronrod.
  const double bulk = quad::gauss_kronrod(integrand, 0.0, 0.9, 1e-13).value;
  const double edge = quad::tanh_sinh(integrand, 0.9, 1.0, 1e-13).value;
  return n * (bulk + edge);
}

}  // namespace

BallOmegaMoment ball_mean_omega(int n) {
  if (n < 1) throw DomainError("ball_mean_omega: n must be positive");
  return {radial_omega_moment(n, 1), ball_mean_omega_leading(n)};
}

BallOmegaMoment ball_second_omega(int n) {
  if (n < 1) throw DomainError("ball_second_omega: n must be positive");
  return {radial_omega_moment(n, 2), ball_second_omega_leading(n)};
}

double ball_log_term_quadrature(int n) {
  if (n < 1) throw DomainError("ball_log_term_quadrature: n must be positive");
  auto integrand = [n](double r) { return std::pow(r, n - 1) * std::log1p(-r * r); };
  const double integral = quad::tanh_sinh(integrand, 0.0, 1.0, 1e-15).value;
  return -0.5 * n * (n + 1.0) * integral;
}

double n_beta_half(int n) {
  if (n < 1) throw DomainError("n_beta_half: n must be positive");
  const double dn = static_cast<double>(n);
  return dn * std::exp(std::lgamma(dn) + std::lgamma(0.5) - std::lgamma(dn + 0.5));
}

namespace {

// sinh(x) - x, accurate for small |x|.
double sinh_minus_x(double x) {
  if (std::abs(x) >= 1.0) return std::sinh(x) - x;
  const double x2 = x * x;
  double term = x * x2 / 6.0;
  double sum = term;
  for (int k = 2; k < 12; ++k) {
    term *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
    sum += term;
  }
  return sum;
}

// x cosh(x) - sinh(x), accurate for small |x|.
double xcosh_minus_sinh(double x) {
  if (std::abs(x) >= 1.0) return x * std::cosh(x) - std::sinh(x);
  const double x2 = x * x;
  // sum_k x^{2k+1} 2k / (2k+1)!
  double power = x;  // x^{2k+1}/(2k+1)!
  double sum = 0.0;
  for (int k = 1; k < 12; ++k) {
    power *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
    sum += 2.0 * k * power;
  }
  return sum;
}

}  // namespace

double uniform_log_laplace(double t, double side) {
  const double x = std::abs(0.5 * t * side);
  if (x == 0.0) return 0.0;
  if (x < 1.0) return std::log1p(sinh_minus_x(x) / x);
  if (x > 20.0) return x - std::log(2.0 * x) + std::log1p(-std::exp(-2.0 * x));
  return std::log(std::sinh(x) / x);
}

double uniform_log_laplace_d1(double t, double side) {
  const double half = 0.5 * side;
  const double x = half * t;
  if (x == 0.0) return 0.0;
  const double ax = std::abs(x);
  double langevin;
  if (ax < 1e-6) {
    langevin = ax / 3.0;
  } else if (ax < 1.0) {
    langevin = xcosh_minus_sinh(ax) / (ax * std::sinh(ax));
  } else {
    langevin = 1.0 / std::tanh(ax) - 1.0 / ax;
  }
  return std::copysign(half * langevin, x);
}

double uniform_log_laplace_d2(double t, double side) {
  const double half = 0.5 * side;
  const double ax = std::abs(half * t);
  double value;
  if (ax < 1e-6) {
    value = 1.0 / 3.0 - ax * ax / 15.0;
  } else if (ax < 1.0) {
    const double s = std::sinh(ax);
    value = sinh_minus_x(ax) * (s + ax) / (ax * ax * s * s);
  } else if (ax > 20.0) {
    const double e = std::exp(-ax);
    value = 1.0 / (ax * ax) - 4.0 * e * e / ((1.0 - e * e) * (1.0 - e * e));
  } else {
    const double s = std::sinh(ax);
    value = 1.0 / (ax * ax) - 1.0 / (s * s);
  }
  return half * half * value;
}

}  // namespace cramerlab::closedform
