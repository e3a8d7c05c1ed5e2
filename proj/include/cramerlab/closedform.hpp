#pragma once

#include <cstdint>

namespace cramerlab::closedform {

/// H_m = 1 + 1/2 + ... + 1/m, summed smallest term first (exact up to rounding for m <= 1e6).
double harmonic(std::int64_t m);

/// 1 + 1/4 + ... + 1/m^2.
double harmonic2(std::int64_t m);

/// The two Beta-derivative integrals
///   first  = int_0^1 r^{n-1} ln(1-r) dr   = -H_n / n
///   second = int_0^1 r^{n-1} ln^2(1-r) dr = (H_n^2 + sum_{k<=n} 1/k^2) / n
struct LogIntegrals {
  double first = 0.0;
  double second = 0.0;
};
LogIntegrals log_integral_moments(int n);

/// The same integrals by adaptive quadrature (independent of the harmonic sums).
LogIntegrals log_integral_moments_quadrature(int n);

/// Upper tail of the standard normal, P(g >= z), and its logarithm (stable for large z).
double normal_sf(double z);
double log_normal_sf(double z);

/// Radial half-space tail of the uniform measure on the unit ball B_2^n:
///   F(r) = c_n * int_r^1 (1 - t^2)^{(n-1)/2} dt,  c_n = Gamma(n/2+1) / (sqrt(pi) Gamma((n+1)/2)),
/// i.e. the mass of {z : z_1 >= r}.  Since z_1^2 ~ Beta(1/2, (n+1)/2), F(r) = I_{1-r^2}((n+1)/2, 1/2)/2.
/// F = (1-r^2)^{(n+1)/2} h(r, n) with h bounded above and below polynomially in n, which is
/// what the log version uses once F underflows.
class BallTail {
 public:
  explicit BallTail(int n);

  int dimension() const { return n_; }
  double c_n() const { return c_n_; }

  double F(double r) const;
  double log_F(double r) const;
  /// h(r, n) = F(r) / (1 - r^2)^{(n+1)/2}.
  double h(double r) const;
  double log_h(double r) const;

  /// c_n * int_0^1 (1-t^2)^{(n-1)/2} dt, which must equal 1/2.
  double half_mass() const;
  /// F by direct adaptive quadrature of the defining integral (slow; cross-check only).
  double F_quadrature(double r) const;

 private:
  int n_;
  double c_n_;
  double log_c_n_;
};

/// Leading harmonic terms of the mean and second moment of the log-depth
/// omega = ln(1/F(|x|)) for the uniform ball.
double ball_mean_omega_leading(int n);    // (n+1)/2 * H_{n/2}      (n even)
double ball_second_omega_leading(int n);  // (n+1)^2/4 * H_{n/2}^2  (n even)

struct BallOmegaMoment {
  double quadrature = 0.0;  // radial quadrature truth (any n)
  double leading = 0.0;     // harmonic leading term (NaN for odd n)
};
/// -n int_0^1 r^{n-1} ln F(r) dr  and the leading term.
BallOmegaMoment ball_mean_omega(int n);
/// +n int_0^1 r^{n-1} ln^2 F(r) dr  and the leading term.
BallOmegaMoment ball_second_omega(int n);

/// -n(n+1)/2 * int_0^1 r^{n-1} ln(1 - r^2) dr by quadrature; equals (n+1)/2 * H_{n/2} for even n.
double ball_log_term_quadrature(int n);

/// Lambda of the uniform law on [-side/2, side/2] and its first two derivatives:
/// ln(sinh(x)/x), (side/2)(coth x - 1/x), (side/2)^2 (1/x^2 - 1/sinh^2 x) with x = t*side/2.
/// Series forms near 0 keep full relative accuracy.
double uniform_log_laplace(double t, double side = 1.0);
double uniform_log_laplace_d1(double t, double side = 1.0);
double uniform_log_laplace_d2(double t, double side = 1.0);

/// F(r) and ln F(r) for a ball tail; thin wrappers kept for call sites that read better as functions.
inline double radial_tail(const BallTail& bt, double r) { return bt.F(r); }
inline double log_radial_tail(const BallTail& bt, double r) { return bt.log_F(r); }

/// n * B(n, 1/2), the cone-measure constant bounding E exp(Lambda*/(2n)) for bodies.
double n_beta_half(int n);

}  // namespace cramerlab::closedform
