#include <doctest.h>

#include <cmath>
#include <functional>
#include <initializer_list>
#include <numbers>

#include "cramerlab/closedform.hpp"

using namespace cramerlab::closedform;

namespace {

// Composite Simpson on [a, b]; deliberately unrelated to the library's rules.
template <class F>
double simpson(F f, double a, double b, int panels = 200000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// int_0^1 r^{n-1} ln^p(1-r) dr with r = 1 - e^{-u}: int_0^inf (-u)^p e^{-u} (1-e^{-u})^{n-1} du.
double log_moment_oracle(int n, int p) {
  return simpson([&](double u) { return std::pow(-u, p) * std::exp(-u) * std::pow(-std::expm1(-u), n - 1); },
                 0.0, 80.0, 400000);
}

}  // namespace

TEST_CASE("harmonic numbers") {
  CHECK(harmonic(1) == 1.0);
  CHECK(harmonic(2) == 1.5);
  CHECK(harmonic(4) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
  CHECK(harmonic2(2) == 1.25);
}

TEST_CASE("log integrals against an exponential-substitution oracle") {
  // Frozen from the oracle: the second integral at n = 1 is 2.
  CHECK(log_moment_oracle(1, 2) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(log_integral_moments(1).second == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(log_integral_moments(2).first == doctest::Approx(-0.75).epsilon(1e-15));
  for (int n : {1, 2, 3, 7, 10, 25, 50}) {
    const auto formula = log_integral_moments(n);
    CHECK(formula.first == doctest::Approx(log_moment_oracle(n, 1)).epsilon(1e-9));
    CHECK(formula.second == doctest::Approx(log_moment_oracle(n, 2)).epsilon(1e-9));
  }
  for (int n = 2; n <= 50; ++n) {
    const auto f = log_integral_moments(n);
    const auto q = log_integral_moments_quadrature(n);
    CHECK(std::abs(f.first - q.first) <= 1e-10 * std::abs(f.first));
    CHECK(std::abs(f.second - q.second) <= 1e-10 * std::abs(f.second));
  }
}

TEST_CASE("normal tail") {
  CHECK(normal_sf(0.0) == 0.5);
  CHECK(normal_sf(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
  for (double z : {4.9, 5.0, 8.0, 20.0}) {
    const double direct = std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
    CHECK(log_normal_sf(z) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("ball tail") {
  for (int n : {1, 2, 3, 5, 10, 40}) {
    const BallTail bt(n);
    CHECK(std::abs(bt.F(0.0) - 0.5) <= 1e-12);
    CHECK(std::abs(bt.half_mass() - 0.5) <= 1e-12);
    CHECK(bt.F(1.0) == 0.0);
    double prev = bt.F(0.0);
    for (int i = 1; i <= 100; ++i) {
      const double r = i / 100.0;
      const double f = bt.F(r);
      CHECK(f < prev);
      prev = f;
      if (r < 1.0) {
        const double h = bt.h(r);
        CHECK(h >= 1.0 / std::sqrt(2.0 * std::numbers::pi * (n + 2)) * (1.0 - 1e-12));
        CHECK(h <= 1.0 / (r * std::sqrt(2.0 * std::numbers::pi * n)) * (1.0 + 1e-12));
        CHECK(bt.log_F(r) == doctest::Approx(std::log(f)).epsilon(1e-12));
      }
    }
  }
  const BallTail one(1);
  for (double r : {0.1, 0.29, 0.31, 0.7, 0.999}) CHECK(one.F(r) == doctest::Approx((1.0 - r) / 2.0).epsilon(1e-12));
  for (int n : {2, 3, 10, 41}) {
    const BallTail bt(n);
    for (double r : {0.05, 0.3, 0.6, 0.95, 0.9999}) CHECK(bt.F(r) == doctest::Approx(bt.F_quadrature(r)).epsilon(1e-11));
  }
  // Where F underflows, log F continues through h and stays decreasing.
  const BallTail forty(40);
  CHECK(forty.log_F(1.0 - 1e-15) < forty.log_F(1.0 - 1e-14));
  CHECK(forty.log_F(1.0 - 1e-15) > -1000.0);
  const BallTail five(5);
  const double oracle = simpson([&](double t) { return std::pow(1.0 - t * t, 2.0); }, 0.3, 1.0) * five.c_n();
  CHECK(five.F(0.3) == doctest::Approx(oracle).epsilon(1e-11));
  // Deep tail stays finite in log space.
  CHECK(std::isfinite(BallTail(10).log_F(1.0 - 1e-12)));
}

TEST_CASE("ball omega moments") {
  CHECK(ball_mean_omega_leading(10) == doctest::Approx(5.5 * (1 + 0.5 + 1.0 / 3 + 0.25 + 0.2)).epsilon(1e-15));
  CHECK(ball_mean_omega_leading(10) == doctest::Approx(12.558333333333334).epsilon(1e-14));
  CHECK(std::isnan(ball_mean_omega_leading(5)));
  for (int n = 2; n <= 40; n += 2) {
    CHECK(std::abs(ball_log_term_quadrature(n) - 0.5 * (n + 1) * harmonic(n / 2)) <=
          1e-10 * 0.5 * (n + 1) * harmonic(n / 2));
  }
  for (int n = 4; n <= 40; n += 4) {
    const auto mean = ball_mean_omega(n);
    CHECK(std::abs(mean.quadrature - mean.leading) <= 5.0 * std::log(n));
    const auto second = ball_second_omega(n);
    CHECK(std::abs(second.quadrature - second.leading) <= 10.0 * n * std::log(n) * std::log(n));
    CHECK(second.quadrature >= mean.quadrature * mean.quadrature);
  }
  // n = 1: omega = ln(2/(1-r)), E omega = ln 2 + 1.
  CHECK(ball_mean_omega(1).quadrature == doctest::Approx(std::log(2.0) + 1.0).epsilon(1e-10));
}

TEST_CASE("uniform log-Laplace closed forms") {
  const double oracle = std::log(simpson([](double z) { return std::exp(2.0 * z); }, -0.5, 0.5));
  CHECK(uniform_log_laplace(2.0) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(uniform_log_laplace(2.0) == doctest::Approx(0.16143936157119563).epsilon(1e-14));
  // Tilted mean of the uniform on [-1/2, 1/2] at tilt 2, by the Simpson oracle and frozen.
  const double tilted_mean = simpson([](double z) { return z * std::exp(2.0 * z); }, -0.5, 0.5) /
                             simpson([](double z) { return std::exp(2.0 * z); }, -0.5, 0.5);
  CHECK(uniform_log_laplace_d1(2.0) == doctest::Approx(tilted_mean).epsilon(1e-12));
  CHECK(uniform_log_laplace_d1(2.0) == doctest::Approx(0.15651764274966565).epsilon(1e-14));
  for (double t : {-80.0, -3.0, -1e-3, 1e-7, 0.5, 1.999, 2.001, 7.0, 39.0, 41.0, 500.0}) {
    const double h = 1e-4 * std::max(1.0, std::abs(t));
    const double fd1 = (uniform_log_laplace(t + h) - uniform_log_laplace(t - h)) / (2 * h);
    const double fd2 = (uniform_log_laplace_d1(t + h) - uniform_log_laplace_d1(t - h)) / (2 * h);
    CHECK(uniform_log_laplace_d1(t) == doctest::Approx(fd1).epsilon(1e-7));
    CHECK(uniform_log_laplace_d2(t) == doctest::Approx(fd2).epsilon(1e-6));
  }
  CHECK(uniform_log_laplace_d2(0.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK(uniform_log_laplace(1e-5) == doctest::Approx(1e-10 / 24.0).epsilon(1e-9));
  CHECK(n_beta_half(1) == doctest::Approx(2.0).epsilon(1e-14));
  for (int n = 2; n < 50; ++n) CHECK(n_beta_half(n) <= 2.0 * std::sqrt(n));
}
