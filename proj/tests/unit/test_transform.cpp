#include <doctest.h>

#include <cmath>
#include <functional>
#include <initializer_list>

#include "cramerlab/closedform.hpp"
#include "cramerlab/errors.hpp"
#include "cramerlab/transform.hpp"

using namespace cramerlab;

namespace {

template <class F>
double simpson(F f, double a, double b, int panels = 100000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

Eigen::VectorXd random_vector(int n, RngEngine& eng, double scale) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * (2.0 * eng.uniform() - 1.0);
  return v;
}

std::vector<MeasureModel> smooth_models(int n) {
  std::vector<Custom1D> comps;
  for (int i = 0; i < n; ++i) {
    comps.push_back(i % 3 == 0 ? Custom1D::logistic(0.5) : (i % 3 == 1 ? Custom1D::centered_exponential(2.0)
                                                                          : Custom1D::uniform(0.7)));
  }
  return {MeasureModel::uniform_cube(n), MeasureModel::uniform_ball_vol1(n), MeasureModel::product(comps)};
}

LaplaceSettings method(LaplaceMethod m) {
  LaplaceSettings s;
  s.method = m;
  return s;
}

}  // namespace

TEST_CASE("log-Laplace examples") {
  RngEngine eng({101, 0});
  const auto gauss = MeasureModel::standard_gaussian(3);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd xi = random_vector(3, eng, 3.0);
    CHECK(log_laplace(gauss, xi) == doctest::Approx(0.5 * xi.squaredNorm()).epsilon(1e-15));
    CHECK((grad_log_laplace(gauss, xi) - xi).norm() == 0.0);
    CHECK((hess_log_laplace(gauss, xi) - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
  }
  CHECK_THROWS_AS(log_laplace(gauss, Eigen::VectorXd::Ones(3), method(LaplaceMethod::Quadrature1DTensor)),
                  DomainError);
  CHECK_THROWS_AS(log_laplace(MeasureModel::uniform_ball_unit(2), Eigen::VectorXd::Ones(2),
                              method(LaplaceMethod::ClosedForm)),
                  DomainError);

  // Uniform on [-1/2, 1/2] at xi = 2 against Simpson quadrature.
  const auto cube1 = MeasureModel::uniform_cube(1);
  const double oracle = std::log(simpson([](double z) { return std::exp(2.0 * z); }, -0.5, 0.5));
  const double mean_oracle = simpson([](double z) { return z * std::exp(2.0 * z); }, -0.5, 0.5) /
                             simpson([](double z) { return std::exp(2.0 * z); }, -0.5, 0.5);
  const Eigen::VectorXd two = Eigen::VectorXd::Constant(1, 2.0);
  for (auto m : {LaplaceMethod::ClosedForm, LaplaceMethod::Quadrature1DTensor}) {
    CHECK(log_laplace(cube1, two, method(m)) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(grad_log_laplace(cube1, two, method(m))[0] == doctest::Approx(mean_oracle).epsilon(1e-11));
  }
  CHECK(log_laplace(cube1, two) == doctest::Approx(0.16143936157119563).epsilon(1e-13));
  CHECK(grad_log_laplace(cube1, two)[0] == doctest::Approx(0.15651764274966565).epsilon(1e-13));

  for (int n : {1, 3}) {
    for (const auto& m : smooth_models(n)) {
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
      CHECK(log_laplace(m, zero) == 0.0);
      CHECK(grad_log_laplace(m, zero).norm() <= 1e-12);
      LaplaceSettings mc = method(LaplaceMethod::MonteCarlo);
      mc.mc_samples = 4096;
      CHECK(std::abs(log_laplace(m, zero, mc)) <= 1e-15);
      CHECK(grad_log_laplace(m, zero, mc).norm() <= 1e-12);
    }
  }
}

TEST_CASE("Monte Carlo log-Laplace") {
  LaplaceSettings mc = method(LaplaceMethod::MonteCarlo);
  mc.mc_samples = 1 << 16;
  const auto gauss = MeasureModel::standard_gaussian(2);
  const Eigen::Vector2d xi(0.3, -0.2);
  CHECK(log_laplace(gauss, xi, mc) == doctest::Approx(0.5 * xi.squaredNorm()).epsilon(2e-3));
  CHECK_THROWS_AS(log_laplace(gauss, Eigen::Vector2d(400.0, 0.0), mc), PrecisionError);
  LaplaceSettings small = mc;
  small.mc_samples = 2000;
  CHECK_THROWS_AS(grad_log_laplace(MeasureModel::standard_gaussian(1), Eigen::VectorXd::Constant(1, 8.0), small),
                  EstimatorDegenerate);
  // Same stream, same answer.
  CHECK(log_laplace(gauss, xi, mc) == log_laplace(gauss, xi, mc));
}

TEST_CASE("log-Laplace invariants") {
  RngEngine eng({102, 0});
  for (const auto& m : smooth_models(3)) {
    CAPTURE(m.describe());
    const auto ev = make_laplace_evaluator(m);
    for (int k = 0; k < 1000; ++k) {
      const Eigen::VectorXd a = random_vector(3, eng, 20.0);
      const Eigen::VectorXd b = random_vector(3, eng, 20.0);
      const double lam = eng.uniform();
      const double la = ev->evaluate(a, LaplaceOrder::Value).value;
      const double lb = ev->evaluate(b, LaplaceOrder::Value).value;
      const double mid = ev->evaluate(lam * a + (1 - lam) * b, LaplaceOrder::Value).value;
      CHECK(mid <= lam * la + (1 - lam) * lb + 1e-9);
      CHECK(la >= -1e-10);
    }
    // Central finite differences of the value match the gradient.
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd xi = random_vector(3, eng, 1.5);
      const auto v = ev->evaluate(xi, LaplaceOrder::Hessian);
      for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
        e[i] = 1e-5;
        const double fd = (ev->evaluate(xi + e, LaplaceOrder::Value).value -
                           ev->evaluate(xi - e, LaplaceOrder::Value).value) / 2e-5;
        CHECK(std::abs(fd - v.gradient[i]) <= 1e-6 * std::max(1e-3, std::abs(v.gradient[i])));
        const Eigen::VectorXd fdh = (ev->evaluate(xi + e, LaplaceOrder::Gradient).gradient -
                                     ev->evaluate(xi - e, LaplaceOrder::Gradient).gradient) / 2e-5;
        CHECK((fdh - v.hessian.col(i)).norm() <= 1e-5 * std::max(1e-2, v.hessian.norm()));
      }
    }
  }
}

TEST_CASE("Cramer transform examples") {
  RngEngine eng({103, 0});
  const auto gauss = MeasureModel::standard_gaussian(4);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd x = random_vector(4, eng, 2.0);
    const auto r = cramer(gauss, x);
    CHECK(r.status == LegendreStatus::Converged);
    CHECK(r.value == doctest::Approx(0.5 * x.squaredNorm()).epsilon(1e-15));
    CHECK((r.argmax_xi - x).norm() == 0.0);
  }
  for (int n : {1, 2, 5}) {
    for (const auto& m : smooth_models(n)) {
      CHECK(cramer(m, Eigen::VectorXd::Zero(n)).value == 0.0);
    }
  }
  // Product of two uniform laws: joint Newton equals the sum of 1-D solves.
  const auto u = Custom1D::uniform(0.5);
  const auto prod = MeasureModel::product({u, u});
  CramerOptions joint;
  joint.strategy = CramerStrategy::Joint;
  for (int k = 0; k < 20; ++k) {
    const Eigen::Vector2d x = random_vector(2, eng, 0.49);
    const auto r = cramer(prod, x, joint);
    CHECK(r.status == LegendreStatus::Converged);
    const double sum = cramer_1d(u, x[0]).value + cramer_1d(u, x[1]).value;
    CHECK(r.value == doctest::Approx(sum).epsilon(1e-9));
  }
  // Shifted exponential with rate 1: Lambda*(x) = x - ln(1 + x).
  const auto expo = Custom1D::centered_exponential(1.0);
  for (double x : {-0.99, -0.5, 0.1, 2.0, 30.0}) {
    const auto r = cramer_1d(expo, x);
    CHECK(r.status == LegendreStatus::Converged);
    CHECK(r.value == doctest::Approx(x - std::log1p(x)).epsilon(1e-9));
  }
  CHECK(cramer_1d(expo, -1.0).status == LegendreStatus::AtInfinity);
  // Outside or on the support boundary.
  CHECK(cramer(MeasureModel::uniform_cube(2), Eigen::Vector2d(0.5, 0.0)).status == LegendreStatus::AtInfinity);
  CHECK(std::isinf(cramer(MeasureModel::uniform_ball_unit(3), Eigen::Vector3d(0.0, 1.0, 0.1)).value));
  // Near the boundary the value grows like the log of the distance.
  const auto near = cramer(MeasureModel::uniform_cube(1), Eigen::VectorXd::Constant(1, 0.5 - 1e-6));
  CHECK(near.status == LegendreStatus::Converged);
  CHECK(near.value > 10.0);
}

TEST_CASE("Cramer duality and convergence") {
  RngEngine eng({104, 0});
  for (const auto& m : {MeasureModel::standard_gaussian(3), MeasureModel::uniform_cube(3),
                        MeasureModel::uniform_ball_vol1(3)}) {
    CAPTURE(m.describe());
    const CramerTransform transform(m);
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd xi = random_vector(3, eng, 6.0);
      const auto v = transform.evaluator().evaluate(xi, LaplaceOrder::Gradient);
      const auto r = transform(v.gradient);
      CHECK(r.status == LegendreStatus::Converged);
      CHECK(r.grad_norm <= 1e-9 * (1 + v.gradient.norm()));
      CHECK(std::abs(r.value + v.value - v.gradient.dot(xi)) <= 1e-7);
    }
  }
}

TEST_CASE("sublevel sets") {
  const auto gauss = MeasureModel::standard_gaussian(3);
  const Eigen::Vector3d dir = Eigen::Vector3d(1, 2, 2) / 3.0;
  for (double t : {0.1, 1.0, 7.0}) {
    CHECK(in_sublevel(gauss, std::sqrt(2 * t) * dir, t) == SublevelVerdict::Boundary);
    CHECK(in_sublevel(gauss, Eigen::Vector3d::Zero(), t) == SublevelVerdict::Inside);
  }
  // 1-D uniform: Lambda* on a xi-grid already exceeds 0.1 by far at x = 0.49.
  double grid_sup = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double xi = i * 0.05;
    const double lam = std::log(simpson([xi](double z) { return std::exp(xi * z); }, -0.5, 0.5, 2000));
    grid_sup = std::max(grid_sup, 0.49 * xi - lam);
  }
  CHECK(grid_sup > 2.0);
  const auto cube1 = MeasureModel::uniform_cube(1);
  CHECK(in_sublevel(cube1, Eigen::VectorXd::Constant(1, 0.49), 0.1) == SublevelVerdict::Outside);
  const auto exact = cramer(cube1, Eigen::VectorXd::Constant(1, 0.49));
  CHECK(exact.value >= grid_sup - 1e-9);
  CHECK(exact.value <= grid_sup + 0.01);

  RngEngine eng({105, 0});
  const CramerTransform ball(MeasureModel::uniform_ball_vol1(4));
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd x = random_vector(4, eng, 0.3);
    const double t1 = 5 * eng.uniform();
    const double t2 = t1 + 5 * eng.uniform();
    if (in_sublevel(ball, x, t1) == SublevelVerdict::Inside) CHECK(in_sublevel(ball, x, t2) == SublevelVerdict::Inside);
  }
}

TEST_CASE("tilted measures") {
  RngEngine eng({106, 0});
  for (int n : {3, 6, 10}) {
    for (const auto& m : {MeasureModel::uniform_cube(n), MeasureModel::uniform_ball_vol1(n)}) {
      for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd xi = random_vector(n, eng, 1.0);
        xi *= 5.0 * eng.uniform() / xi.norm();
        const TiltedMeasure tilted(m, xi);
        const auto var = tilted.projected_variance(xi);
        CHECK(var.value <= n + 4 * var.ci);
      }
    }
  }
  const auto prod = MeasureModel::product({Custom1D::laplace(1.0), Custom1D::centered_exponential(1.0)});
  const TiltedMeasure tilted(prod, Eigen::Vector2d(0.3, -0.4));
  const auto mass = tilted.total_mass(200000, {107, 0});
  CHECK(std::abs(mass.value - 1.0) <= 4 * mass.ci);
  // Barycenter against a self-normalized Monte Carlo estimate.
  const PointMatrix z = sample(prod, 200000, {108, 0});
  const Eigen::ArrayXd w = (z * tilted.xi()).array().exp();
  for (int i = 0; i < 2; ++i) {
    const Eigen::ArrayXd zi = z.col(i).array();
    const double est = (w * zi).sum() / w.sum();
    const double se = std::sqrt((w.square() * (zi - est).square()).sum()) / w.sum();
    CHECK(std::abs(est - tilted.barycenter()[i]) <= 4 * se);
  }
  LaplaceSettings mc = method(LaplaceMethod::MonteCarlo);
  mc.mc_samples = 1 << 16;
  const TiltedMeasure cube_mc(MeasureModel::uniform_cube(3), Eigen::Vector3d(2, -1, 1), mc);
  const TiltedMeasure cube_cf(MeasureModel::uniform_cube(3), Eigen::Vector3d(2, -1, 1));
  const auto v = cube_mc.projected_variance(Eigen::Vector3d(2, -1, 1));
  CHECK(std::abs(v.value - cube_cf.projected_variance(Eigen::Vector3d(2, -1, 1)).value) <= 4 * v.ci);
}
