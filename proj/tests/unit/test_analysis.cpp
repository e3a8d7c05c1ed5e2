#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cramerlab/analysis.hpp"
#include "cramerlab/closedform.hpp"
#include "cramerlab/errors.hpp"

using namespace cramerlab;

namespace {

// Lambda*(x) of the uniform law on [-1/2, 1/2] by golden-section search over s.
double uniform_cramer_brute(double x) {
  auto objective = [x](double s) {
    const double h = 0.5 * s;
    const double a = std::abs(h);
    const double log_l = a < 1e-8 ? h * h / 6 : a + std::log1p(-std::exp(-2 * a)) - std::log(2 * a);
    return s * x - log_l;
  };
  double lo = -1e5, hi = 1e5;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 300; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (objective(a) < objective(b)) {
      lo = a;
    } else {
      hi = b;
    }
  }
  return objective(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("gaussian moments are exact and match sampling") {
  for (int n : {1, 4, 9}) {
    MomentBudget b;
    b.exp_half = true;
    const auto exact = cramer_moments(MeasureModel::standard_gaussian(n), b);
    CHECK(exact.exact);
    CHECK(exact.mean == doctest::Approx(n / 2.0));
    CHECK(exact.second_moment == doctest::Approx((n * n + 2.0 * n) / 4));
    CHECK(exact.variance == doctest::Approx(n / 2.0));
    CHECK(exact.exp_half_moment == doctest::Approx(std::pow(2.0, n / 2.0)));

    b.path = MomentPath::MonteCarlo;
    b.exp_half = false;
    const auto mc = cramer_moments(MeasureModel::standard_gaussian(n), b);
    CHECK(std::abs(mc.mean - exact.mean) <= 4 * mc.ci.mean);
    CHECK(std::abs(mc.second_moment - exact.second_moment) <= 4 * mc.ci.second_moment);
    CHECK(std::abs(mc.variance - exact.variance) <= 4 * mc.ci.variance);
    CHECK(mc.censored == 0);
  }
}

TEST_CASE("cube moments against a brute-force Legendre transform") {
  // Midpoint rule over one coordinate with Lambda* found by direct maximization.  By
  // symmetry only x = 1/2 - w^2 on (0, 1/sqrt 2) is needed; the weight 4w tames the
  // logarithmic growth at the face.
  const int grid = 4000;
  const double wmax = std::sqrt(0.5);
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double w = wmax * (i + 0.5) / grid;
    const double v = uniform_cramer_brute(0.5 - w * w);
    m1 += 4 * w * v * wmax / grid;
    m2 += 4 * w * v * v * wmax / grid;
  }
  for (int n : {1, 3, 8}) {
    const auto r = cramer_moments(MeasureModel::uniform_cube(n));
    CHECK(r.exact);
    CHECK(r.mean == doctest::Approx(n * m1).epsilon(2e-4));
    CHECK(r.variance == doctest::Approx(n * (m2 - m1 * m1)).epsilon(2e-3));
  }
  CHECK(m1 == doctest::Approx(0.7607).epsilon(1e-3));

  MomentBudget b;
  b.path = MomentPath::MonteCarlo;
  b.samples = 40000;
  const auto exact = cramer_moments(MeasureModel::uniform_cube(4));
  const auto mc = cramer_moments(MeasureModel::uniform_cube(4), b);
  CHECK(std::abs(mc.mean - exact.mean) <= 4 * mc.ci.mean);
  CHECK(std::abs(mc.variance - exact.variance) <= 4 * mc.ci.variance);
}

TEST_CASE("product moments add over coordinates") {
  const std::vector<Custom1D> laws{Custom1D::laplace(1.0), Custom1D::uniform(0.7), Custom1D::logistic(0.5)};
  double mean = 0.0, var = 0.0;
  for (const auto& c : laws) {
    const auto r = cramer_moments(MeasureModel::custom1d(c));
    mean += r.mean;
    var += r.variance;
  }
  const auto joint = cramer_moments(MeasureModel::product(laws));
  CHECK(joint.mean == doctest::Approx(mean).epsilon(1e-10));
  CHECK(joint.variance == doctest::Approx(var).epsilon(1e-10));

  MomentBudget b;
  b.path = MomentPath::MonteCarlo;
  b.samples = 20000;
  const auto mc = cramer_moments(MeasureModel::product(laws), b);
  CHECK(std::abs(mc.mean - mean) <= 4 * mc.ci.mean);
}

TEST_CASE("ball moments by radial quadrature") {
  const auto ball = MeasureModel::uniform_ball_unit(5);
  const auto r = cramer_moments(ball);
  CHECK(r.exact);
  MomentBudget b;
  b.path = MomentPath::MonteCarlo;
  b.samples = 10000;
  const auto mc = cramer_moments(ball, b);
  CHECK(std::abs(mc.mean - r.mean) <= 4 * mc.ci.mean);
  CHECK(std::abs(mc.second_moment - r.second_moment) <= 4 * mc.ci.second_moment);

  MomentBudget eh;
  eh.exp_half = true;
  CHECK(std::isinf(cramer_moments(ball, eh).exp_half_moment));
}

TEST_CASE("beta of the gaussian and the moment ratio inequality") {
  MomentBudget b;
  b.path = MomentPath::MonteCarlo;
  for (int n : {4, 10}) {
    const auto beta = beta_parameter(MeasureModel::standard_gaussian(n), b);
    CHECK(std::abs(beta.value - 2.0 / n) <= 4 * beta.ci);
    CHECK(beta.ci > 0.0);
  }
  const auto exact = beta_parameter(MeasureModel::standard_gaussian(6));
  CHECK(exact.value == doctest::Approx(1.0 / 3));
  CHECK(exact.exact);

  for (const auto& m : {MeasureModel::uniform_cube(3), MeasureModel::uniform_ball_unit(3),
                        MeasureModel::uniform_cube(10)}) {
    const auto c = moment_ratio_check(m);
    CHECK(c.holds);
    CHECK(c.variance_margin >= -1e-9);
  }
  CHECK_THROWS_AS(moment_ratio_check(MeasureModel::standard_gaussian(3)), DomainError);
}

TEST_CASE("tau of the ball and beta-tau closeness") {
  for (int n : {4, 8}) {
    const auto ball = MeasureModel::uniform_ball_vol1(n);
    const auto tau = tau_parameter(ball);
    CHECK(tau.exact);
    const double omega_mean = closedform::ball_mean_omega(n).quadrature;
    CHECK(tau.moments.mean == doctest::Approx(omega_mean));
    const auto beta = beta_parameter(ball);
    IsotropicBudget ib;
    ib.samples = 100000;
    const double L = isotropic_constant(ball, ib);
    CHECK(std::abs(beta.value - tau.value) <= 10 * L * L / std::sqrt(n));
  }
  OmegaBudget ob;
  ob.moments.samples = 200;
  ob.depth.tail.samples = 20000;
  ob.depth.starts = 8;
  ob.depth.refine = 1;
  ob.depth.max_steps = 6;
  const auto cube_tau = tau_parameter(MeasureModel::uniform_cube(3), ob);
  CHECK(cube_tau.value > 0.0);
  CHECK(cube_tau.moments.sample_count == 200);
}

TEST_CASE("isotropic constants") {
  IsotropicBudget b;
  b.samples = 200000;
  CHECK(isotropic_constant(MeasureModel::standard_gaussian(5), b) ==
        doctest::Approx(1 / std::sqrt(2 * std::numbers::pi)).epsilon(0.01));
  CHECK(isotropic_constant(MeasureModel::uniform_cube(6), b) == doctest::Approx(1 / std::sqrt(12.0)).epsilon(0.01));
  const double ball = isotropic_constant(MeasureModel::uniform_ball_unit(6), b);
  CHECK(ball > 0.2);
  CHECK(ball < 0.5);
  b.samples = 3;
  CHECK_THROWS_AS(isotropic_constant(MeasureModel::uniform_cube(6), b), SampleSizeError);
}

TEST_CASE("rho bounds") {
  const double delta = 0.5;
  auto r = rho_bounds(delta / 32, delta, 1.0, 100, 0.3);
  CHECK(r.regime == BetaRegime::SmallBeta);
  CHECK(r.rho1_bound == doctest::Approx(0.5));
  CHECK(r.rho2_bound == doctest::Approx(1.5));
  CHECK(r.conditions_met.lower);

  r = rho_bounds(0.0, delta, 0.8, 10, 0.3);
  CHECK(r.rho1_bound == doctest::Approx(0.8));
  CHECK(r.rho2_bound == doctest::Approx(0.8));

  r = rho_bounds(0.2, delta, 1.0, 10, 0.3);
  CHECK(r.regime == BetaRegime::LargeBeta);
  CHECK(r.rho1_bound == doctest::Approx(1 - std::pow(0.4 / 0.7, 0.25)));
  CHECK(r.rho2_bound == doctest::Approx(1 + std::sqrt(3.2)));

  r = rho_bounds(0.3, delta, 1.0, 10, 0.3);
  CHECK(std::isnan(r.rho2_bound));

  r = rho_bounds(0.6, delta, 1.0, 10, 0.3);
  CHECK(std::isnan(r.rho1_bound));
  CHECK_FALSE(r.conditions_met.lower);
  CHECK_THROWS_AS(rho_bounds(0.1, 1.5, 1.0, 10, 0.3), DomainError);
}

TEST_CASE("exp-half moment in one dimension") {
  // Gaussian: E exp(X^2 / 4) = sqrt 2.
  CHECK(exp_half_moment_1d(Custom1D::gaussian(1.0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  for (const auto& law : {Custom1D::uniform(0.5), Custom1D::laplace(1.0), Custom1D::centered_exponential(1.0),
                          Custom1D::logistic(1.0)}) {
    const double v = exp_half_moment_1d(law);
    CHECK(v >= 1.0);
    CHECK(v <= 2.0 + 1e-6);
  }
  // Uniform: agrees with the brute-force Lambda*.
  double ref = 0.0;
  const int grid = 4000;
  const double wmax = std::sqrt(0.5);
  for (int i = 0; i < grid; ++i) {
    const double w = wmax * (i + 0.5) / grid;
    ref += 4 * w * std::exp(0.5 * uniform_cramer_brute(0.5 - w * w)) * wmax / grid;
  }
  CHECK(exp_half_moment_1d(Custom1D::uniform(0.5)) == doctest::Approx(ref).epsilon(2e-3));
}

TEST_CASE("kappa exponential moment") {
  for (int n : {2, 6}) {
    MomentBudget b;
    b.samples = 20000;
    const auto e = kappa_exp_moment(MeasureModel::uniform_cube(n), b);
    CHECK(e.value >= 1.0);
    CHECK(e.value <= kappa_exp_bound(n));
  }
  CHECK(kappa_exp_bound(1, 1.0) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("chebyshev bound on sublevel sets") {
  const auto cube = MeasureModel::uniform_cube(6);
  const auto m = cramer_moments(cube);
  const double beta = m.variance / (m.mean * m.mean);
  std::vector<double> ts;
  for (double eps : {0.25, 0.5}) ts.push_back((1 - eps) * m.mean);
  SublevelBudget sb;
  sb.samples = 20000;
  const auto prof = sublevel_profile(cube, ts, sb);
  CHECK(prof[0].measure.value <= beta / (0.25 * 0.25) + 4 * prof[0].measure.ci);
  CHECK(prof[1].measure.value <= beta / (0.5 * 0.5) + 4 * prof[1].measure.ci);
  CHECK(prof[0].depth_floor == doctest::Approx(0.1 * std::exp(-ts[0] - 2 * std::sqrt(6.0))));
}

TEST_CASE("sublevel profiles") {
  const std::vector<double> ts{0.5, 2.0, 4.0};
  SUBCASE("gaussian closed form against sampling") {
    const auto g = MeasureModel::standard_gaussian(4);
    const auto prof = sublevel_profile(g, ts);
    const auto values = cramer_sample(g, 20000, {77, 0});
    for (const auto& p : prof) {
      CHECK(p.measure.exact);
      const double frac =
          static_cast<double>(std::count_if(values.begin(), values.end(), [&](double v) { return v <= p.t; })) /
          values.size();
      CHECK(std::abs(frac - p.measure.value) <= 4 * std::sqrt(p.measure.value * (1 - p.measure.value) / 20000));
      CHECK(p.depth_floor == doctest::Approx(closedform::normal_sf(std::sqrt(2 * p.t))));
    }
    // Chi-square with 4 degrees: P(|X|^2 <= 2t) = 1 - (1 + t) e^{-t}.
    CHECK(prof[1].measure.value == doctest::Approx(1 - 3 * std::exp(-2.0)));
  }
  SUBCASE("ball radius and measure") {
    const auto ball = MeasureModel::uniform_ball_unit(3);
    const auto prof = sublevel_profile(ball, ts);
    const auto values = cramer_sample(ball, 5000, {78, 0});
    for (const auto& p : prof) {
      const double r = ball_sublevel_radius(ball, p.t);
      CHECK(cramer_1d(ball.ball_marginal(), r).value == doctest::Approx(p.t).epsilon(1e-8));
      CHECK(p.measure.value == doctest::Approx(r * r * r));
      const double frac =
          static_cast<double>(std::count_if(values.begin(), values.end(), [&](double v) { return v <= p.t; })) /
          values.size();
      CHECK(std::abs(frac - p.measure.value) <= 4 * std::sqrt(p.measure.value * (1 - p.measure.value) / 5000) + 1e-3);
      CHECK(p.depth_floor == doctest::Approx(closedform::BallTail(3).F(r)));
    }
  }
  SUBCASE("other kinds have no floor") {
    SublevelBudget sb;
    sb.samples = 5000;
    const auto prof = sublevel_profile(MeasureModel::custom1d(Custom1D::laplace(1.0)), ts, sb);
    CHECK(std::isnan(prof[0].depth_floor));
    CHECK(prof[0].measure.value <= prof[2].measure.value);
  }
}
