#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <numbers>

#include "cramerlab/closedform.hpp"
#include "cramerlab/depth.hpp"
#include "cramerlab/errors.hpp"
#include "cramerlab/transform.hpp"

using namespace cramerlab;

namespace {

DepthOptions lean_options() {
  DepthOptions o;
  o.tail.samples = 20000;
  o.starts = 16;
  o.refine = 2;
  o.max_steps = 8;
  return o;
}

// Uniform point of the body scaled by `shrink` (cube: coordinates; ball: radius).
Eigen::VectorXd interior_point(const MeasureModel& m, RngEngine& eng, double shrink) {
  const int n = m.dimension();
  Eigen::VectorXd x(n);
  if (m.kind() == MeasureKind::UniformCube) {
    for (int i = 0; i < n; ++i) x[i] = shrink * (eng.uniform() - 0.5) * m.side();
    return x;
  }
  eng.fill_normal({x.data(), static_cast<std::size_t>(n)});
  return x.normalized() * (shrink * m.radius() * std::pow(eng.uniform(), 1.0 / n));
}

}  // namespace

TEST_CASE("exact depth") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(5);
  x[1] = 0.6;
  x[3] = -0.8;
  const auto g = depth(MeasureModel::standard_gaussian(5), x);
  CHECK(g.method == DepthMethod::Exact);
  CHECK(g.phi == doctest::Approx(0.15865525393145705).epsilon(1e-14));
  CHECK(g.log_depth_omega == -std::log(g.phi));
  CHECK((g.direction - x).norm() <= 1e-15);

  const auto ball = MeasureModel::uniform_ball_unit(4);
  const closedform::BallTail tail(4);
  const Eigen::Vector4d y(0.1, -0.2, 0.3, 0.4);
  CHECK(depth(ball, y).phi == doctest::Approx(tail.F(y.norm())).epsilon(1e-14));

  // Forcing the search with exact tails finds the same half-space.
  DepthOptions forced = lean_options();
  forced.force_search = true;
  CHECK(depth(ball, y, forced).phi == doctest::Approx(tail.F(y.norm())).epsilon(1e-6));
  const auto gs = depth(MeasureModel::standard_gaussian(5), x, forced);
  CHECK(gs.method == DepthMethod::DirectionSearch);
  CHECK(gs.phi == doctest::Approx(g.phi).epsilon(1e-6));

  const auto out = depth(MeasureModel::uniform_cube(3), Eigen::Vector3d(0.2, 0.5, 0.0));
  CHECK(out.phi == 0.0);
  CHECK(std::isinf(out.log_depth_omega));
  CHECK(out.method == DepthMethod::Exact);
  CHECK(depth(ball, Eigen::Vector4d(0.0, 2.0, 0.0, 0.0)).phi == 0.0);

  const auto expo = MeasureModel::custom1d(Custom1D::centered_exponential(1.0));
  const auto e1 = depth(expo, Eigen::VectorXd::Constant(1, 0.5));
  CHECK(e1.phi == doctest::Approx(std::exp(-1.5)).epsilon(1e-9));
  CHECK(e1.direction[0] == 1.0);
}

TEST_CASE("direction search against closed forms") {
  // A product of standard normals is the standard Gaussian, but its tails are Monte Carlo.
  const auto normal = Custom1D::gaussian(1.0);
  const auto prod = MeasureModel::product({normal, normal, normal});
  RngEngine eng({201, 0});
  DepthOptions opt = lean_options();
  opt.tail.samples = 100000;
  for (int k = 0; k < 5; ++k) {
    Eigen::Vector3d x;
    eng.fill_normal({x.data(), 3});
    x *= 0.5;
    const auto r = depth(prod, x, opt);
    CHECK(r.method == DepthMethod::DirectionSearch);
    CHECK(std::abs(r.phi - closedform::normal_sf(x.norm())) <= 4 * r.ci);
    CHECK(r.ci > 0.0);
  }
  // Centered points: Grunbaum.
  for (const auto& m : {MeasureModel::uniform_cube(3), MeasureModel::uniform_ball_vol1(3),
                        MeasureModel::standard_gaussian(3), prod}) {
    const auto r = depth(m, Eigen::Vector3d::Zero(), lean_options());
    CHECK(r.phi >= 1.0 / std::numbers::e - r.ci);
  }
  // On a cube axis the axis half-space is a start and is exact.
  const auto cube = MeasureModel::uniform_cube(4);
  const Eigen::Vector4d axis_point(0.3, 0.0, 0.0, 0.0);
  CHECK(depth(cube, axis_point, lean_options()).phi <= 0.2 + 1e-12);
}

TEST_CASE("depth and the Cramer transform") {
  RngEngine eng({202, 0});
  for (int n : {2, 3, 5}) {
    for (const auto& m : {MeasureModel::uniform_cube(n), MeasureModel::uniform_ball_vol1(n)}) {
      CAPTURE(m.describe());
      const CramerTransform transform(m);
      TailBudget budget = lean_options().tail;
      const DirectionalTail tail(m, budget);
      for (int k = 0; k < 10; ++k) {
        const Eigen::VectorXd x = interior_point(m, eng, 0.95);
        const auto d = m.kind() == MeasureKind::UniformCube ? depth(tail, x, lean_options()) : depth(m, x);
        const auto c = transform(x);
        REQUIRE(c.status == LegendreStatus::Converged);
        CHECK(d.phi - d.ci <= std::exp(-c.value) + 1e-12);
        const double omega_ci = d.ci / d.phi;
        CHECK(d.log_depth_omega - 5 * std::sqrt(n) - omega_ci <= c.value);
        CHECK(c.value <= d.log_depth_omega + omega_ci);
        CHECK(d.phi + d.ci >= 0.1 * std::exp(-c.value - 2 * std::sqrt(n)));
        const double gauge = m.body_norm(x);
        CHECK(d.phi + d.ci >= std::exp(-2.0) / n * std::pow(1 - gauge, n));
      }
    }
  }
}

TEST_CASE("depth does not depend on the worker count") {
  const auto cube = MeasureModel::uniform_cube(4);
  const Eigen::Vector4d x(0.1, -0.3, 0.25, 0.05);
  DepthOptions one = lean_options();
  DepthOptions three = one;
  three.workers = 3;
  const auto a = depth(cube, x, one);
  const auto b = depth(cube, x, three);
  CHECK(a.phi == b.phi);
  CHECK(a.ci == b.ci);
  CHECK(a.direction == b.direction);
}

TEST_CASE("one-sided centroid supports") {
  const auto gauss = MeasureModel::standard_gaussian(3);
  const Eigen::Vector3d y = Eigen::Vector3d(1, 2, 2) / 3.0;
  CHECK(centroid_support(gauss, y, 2.0).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(centroid_support(gauss, y, 4.0).value == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-14));
  // Product of normals goes through Monte Carlo for a non-axis direction.
  const auto normal = Custom1D::gaussian(1.0);
  const auto prod = MeasureModel::product({normal, normal, normal});
  const auto mc = centroid_support(prod, y, 4.0);
  CHECK_FALSE(mc.exact);
  CHECK(std::abs(mc.value - std::pow(3.0, 0.25)) <= 4 * mc.ci);
  const auto mc_neg = centroid_support(prod, -y, 4.0);
  CHECK(std::abs(mc.value - mc_neg.value) <= 4 * std::hypot(mc.ci, mc_neg.ci));
  // Uniform coordinate: 2 E Z_+^t = 2^{-t} / (t + 1).
  const auto cube = MeasureModel::uniform_cube(3);
  for (double t : {1.0, 2.0, 5.5}) {
    const Eigen::Vector3d e(0, -1, 0);
    CHECK(centroid_support(cube, e, t).value == doctest::Approx(0.5 / std::pow(t + 1, 1 / t)).epsilon(1e-10));
  }
  // Shifted exponential, negative side: E (1 - E)_+^2 = 1 - 2/e.
  const auto expo = MeasureModel::custom1d(Custom1D::centered_exponential(1.0));
  CHECK(centroid_support(expo, Eigen::VectorXd::Constant(1, -1.0), 2.0).value ==
        doctest::Approx(std::sqrt(2 * (1 - 2 / std::numbers::e))).epsilon(1e-10));
  CHECK_THROWS_AS(centroid_support(gauss, y, 0.5), DomainError);
  CHECK_THROWS_AS(centroid_support(gauss, 2 * y, 2.0), DomainError);

  CHECK(centroid_growth_ratio(gauss, 2.0).value == doctest::Approx(1.0).epsilon(1e-14));
  double previous = 1.0;
  for (double t : {4.0, 8.0, 16.0}) {
    const double r = centroid_growth_ratio(gauss, t).value;
    CHECK(r > previous);
    previous = r;
  }
  for (const auto& m : {MeasureModel::uniform_cube(4), MeasureModel::uniform_ball_vol1(4), prod}) {
    for (double t : {3.0, 6.0}) {
      const auto r = centroid_growth_ratio(m, t);
      CHECK(r.value >= std::pow(2 / std::numbers::e, 0.5 - 1 / t) - r.ci);
    }
  }
}
