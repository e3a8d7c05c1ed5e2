#include <doctest.h>

#include <cmath>
#include <vector>

#include "cramerlab/errors.hpp"
#include "cramerlab/polytope.hpp"

using namespace cramerlab;

namespace {

// Caratheodory: x is in the hull iff it is in some (n+1)-point simplex.  Returns the
// best smallest barycentric coordinate over all simplices (> 0 inside, < 0 outside).
double caratheodory_margin(const PointMatrix& pts, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(pts.cols());
  const int N = static_cast<int>(pts.rows());
  std::vector<int> idx(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) idx[k] = k;
  double best = -1e300;
  while (true) {
    Eigen::MatrixXd a(n + 1, n + 1);
    Eigen::VectorXd b(n + 1);
    for (int k = 0; k <= n; ++k) {
      a.block(0, k, n, 1) = pts.row(idx[k]).transpose();
      a(n, k) = 1.0;
    }
    b.head(n) = x;
    b[n] = 1.0;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible()) best = std::max(best, lu.solve(b).minCoeff());
    int k = n;
    while (k >= 0 && idx[k] == N - (n + 1) + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j <= n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

void check_certificate(const PointMatrix& pts, const Eigen::VectorXd& x, const MembershipResult& r) {
  if (r.verdict == Membership::Inside) {
    CHECK(r.weights.minCoeff() >= -1e-12);
    CHECK(std::abs(r.weights.sum() - 1.0) <= 1e-10);
    CHECK((pts.transpose() * r.weights - x).norm() <= 1e-8 * (1 + x.norm()));
  } else {
    CHECK(r.margin > 0.0);
    CHECK(std::abs(r.direction.norm() - 1.0) <= 1e-12);
    CHECK(((pts * r.direction).array() - x.dot(r.direction)).maxCoeff() <= -r.margin);
  }
}

}  // namespace

TEST_CASE("polytope sampling") {
  const auto cube = MeasureModel::uniform_cube(2);
  CHECK_THROWS_AS(sample_polytope(cube, 2, {1, 0}), DomainError);
  const auto poly = sample_polytope(cube, 100, {1, 0});
  CHECK(poly.size() == 100);
  CHECK(poly.points.cwiseAbs().maxCoeff() < 0.5);
  CHECK(sample_polytope(cube, 100, {1, 0}).points == poly.points);
  CHECK(poly.generator == RngStream{1, 0});
}

TEST_CASE("membership examples") {
  const auto gauss = MeasureModel::standard_gaussian(4);
  const auto poly = sample_polytope(gauss, 30, {2, 0});
  int vertices = 0;
  for (int i = 0; i < 30; ++i) {
    const Eigen::VectorXd v = poly.points.row(i).transpose();
    const auto r = contains(poly, v);
    REQUIRE(r.verdict == Membership::Inside);
    check_certificate(poly.points, v, r);
    // A vertex of K_N (outside the hull of the other rows) has only the unit certificate.
    PointMatrix others(29, 4);
    others << poly.points.topRows(i), poly.points.bottomRows(29 - i);
    if (contains_lp(others, v).verdict == Membership::Outside) {
      ++vertices;
      CHECK(r.weights[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(vertices >= 5);
  const Eigen::VectorXd centroid = poly.points.colwise().mean().transpose();
  const auto rc = contains(poly, centroid);
  CHECK(rc.verdict == Membership::Inside);
  check_certificate(poly.points, centroid, rc);
  const Eigen::VectorXd far = Eigen::VectorXd::Constant(4, 10.0);
  const auto rf = contains(poly, far);
  CHECK(rf.verdict == Membership::Outside);
  check_certificate(poly.points, far, rf);
  CHECK_THROWS_AS(contains(poly, Eigen::VectorXd::Zero(3)), DomainError);
}

TEST_CASE("membership against a Caratheodory oracle") {
  const auto gauss = MeasureModel::standard_gaussian(3);
  int compared = 0;
  int inside = 0;
  for (std::uint64_t trial = 0; trial < 300; ++trial) {
    const auto poly = sample_polytope(gauss, 20, {3, trial});
    const Eigen::VectorXd x = 1.2 * sample(gauss, 1, {4, trial}).row(0).transpose();
    const double margin = caratheodory_margin(poly.points, x);
    if (std::abs(margin) < 1e-7) continue;
    ++compared;
    const bool truth = margin > 0.0;
    inside += truth;
    const auto r = contains(poly, x);
    CHECK((r.verdict == Membership::Inside) == truth);
    check_certificate(poly.points, x, r);
    const auto lp = contains_lp(poly.points, x);
    CHECK((lp.verdict == Membership::Inside) == truth);
    check_certificate(poly.points, x, lp);
  }
  CHECK(compared >= 299);
  CHECK(inside > 50);
  CHECK(compared - inside > 50);
}

TEST_CASE("membership is affinely invariant and nested-monotone") {
  const auto gauss = MeasureModel::standard_gaussian(5);
  const PointMatrix pts = sample(gauss, 200, {5, 0});
  const PointMatrix tests = sample(gauss, 300, {6, 0});
  Eigen::MatrixXd a(5, 5);
  RngEngine eng({7, 0});
  for (int i = 0; i < 25; ++i) a(i / 5, i % 5) = eng.uniform() - 0.5;
  a += 2 * Eigen::MatrixXd::Identity(5, 5);
  const Eigen::VectorXd shift = Eigen::VectorXd::LinSpaced(5, -1.0, 3.0);
  const PointMatrix mapped = (pts * a.transpose()).rowwise() + shift.transpose();
  HullOracle small(pts.topRows(40));
  HullOracle large(pts);
  HullOracle image(mapped);
  int monotone_checks = 0;
  for (Eigen::Index i = 0; i < tests.rows(); ++i) {
    const Eigen::VectorXd x = tests.row(i).transpose();
    const auto rs = small.contains(x);
    const auto rl = large.contains(x);
    const auto ri = image.contains(a * x + shift);
    if (rs.verdict == Membership::Inside) {
      ++monotone_checks;
      CHECK(rl.verdict == Membership::Inside);
    }
    CHECK(ri.verdict == rl.verdict);
    check_certificate(pts, x, rl);
    check_certificate(pts.topRows(40), x, rs);
  }
  CHECK(monotone_checks > 10);
  CHECK(large.pool_size() < 200);
}

TEST_CASE("measure estimates") {
  // Triangle in the unit square: E area = 11/144.
  const auto square = MeasureModel::uniform_cube(2);
  const auto tri = estimate_measure(square, 3, 400, 2000, {8, 0});
  CHECK(tri.value < 0.1);
  CHECK(std::abs(tri.value - 11.0 / 144.0) <= 4 * tri.std_error);
  // Shoelace oracle on the same triangles.
  double area = 0.0;
  for (std::size_t r = 0; r < 400; ++r) {
    const PointMatrix p = sample(square, 3, polytope_stream({8, 0}, r));
    area += 0.5 * std::abs((p(1, 0) - p(0, 0)) * (p(2, 1) - p(0, 1)) - (p(2, 0) - p(0, 0)) * (p(1, 1) - p(0, 1)));
  }
  area /= 400;
  CHECK(std::abs(tri.value - area) <= 4 * std::sqrt(area * (1 - area) / (400.0 * 2000.0)) + 1e-3);

  const auto gauss = MeasureModel::standard_gaussian(10);
  const std::size_t sizes[] = {11, 30, 148};
  const auto nested = estimate_measure_nested(gauss, sizes, 16, 256, {9, 0});
  CHECK(nested[2].value > nested[0].value);
  for (std::size_t r = 0; r < 16; ++r) {
    CHECK(nested[0].per_trial[r] <= nested[1].per_trial[r]);
    CHECK(nested[1].per_trial[r] <= nested[2].per_trial[r]);
  }
  const auto single = estimate_measure(gauss, 30, 16, 256, {9, 0});
  CHECK(single.value == nested[1].value);
  const auto threaded = estimate_measure_nested(gauss, sizes, 16, 256, {9, 0}, 3);
  for (int k = 0; k < 3; ++k) CHECK(threaded[k].per_trial == nested[k].per_trial);
  CHECK_THROWS_AS(estimate_measure(gauss, 10, 4, 4, {9, 0}), DomainError);
}
