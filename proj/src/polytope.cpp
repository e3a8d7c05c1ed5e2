#include "cramerlab/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cramerlab/errors.hpp"
#include "cramerlab/parallel.hpp"

namespace cramerlab {

namespace {

constexpr double kZ95 = 1.959963984540054;
// Weights at or below this are dropped from the corral.
constexpr double kWeightFloor = 1e-12;
// Relative slack in the Wolfe optimality test.
constexpr double kWolfeSlack = 1e-12;

MembershipResult inside_result(Eigen::Index total, const std::vector<Eigen::Index>& support,
                               const std::vector<double>& lambda, double distance) {
  MembershipResult r;
  r.verdict = Membership::Inside;
  r.weights = Eigen::VectorXd::Zero(total);
  for (std::size_t k = 0; k < support.size(); ++k) r.weights[support[k]] = lambda[k];
  r.distance_bound = distance;
  return r;
}

MembershipResult outside_result(Eigen::Ref<const PointMatrix> points, const Eigen::VectorXd& x, Eigen::VectorXd dir) {
  MembershipResult r;
  r.verdict = Membership::Outside;
  dir.normalize();
  r.margin = std::max(0.0, -((points * dir).array() - x.dot(dir)).maxCoeff());
  r.distance_bound = r.margin;
  r.direction = std::move(dir);
  return r;
}

// Minimizer of |sum mu_k Y_k| over the affine hull of the corral (sum mu = 1).
std::vector<double> affine_minimizer(const std::vector<Eigen::VectorXd>& y) {
  const std::size_t k = y.size();
  if (k == 1) return {1.0};
  const Eigen::Index n = y[0].size();
  Eigen::MatrixXd d(n, static_cast<Eigen::Index>(k - 1));
  for (std::size_t i = 1; i < k; ++i) d.col(static_cast<Eigen::Index>(i - 1)) = y[i] - y[0];
  const Eigen::VectorXd c = d.completeOrthogonalDecomposition().solve(-y[0]);
  std::vector<double> mu(k);
  mu[0] = 1.0 - c.sum();
  for (std::size_t i = 1; i < k; ++i) mu[i] = c[static_cast<Eigen::Index>(i - 1)];
  return mu;
}

}  // namespace

const char* to_string(Membership verdict) { return verdict == Membership::Inside ? "Inside" : "Outside"; }

PolytopeSample sample_polytope(const MeasureModel& model, std::size_t N, RngStream stream, int workers) {
  if (N <= static_cast<std::size_t>(model.dimension())) {
    throw DomainError("sample_polytope: need N > n points");
  }
  return {sample(model, N, stream, workers), stream};
}

HullOracle::HullOracle(Eigen::Ref<const PointMatrix> points)
    : points_(points), in_pool_(static_cast<std::size_t>(points.rows()), 0) {
  if (points.rows() < 1) throw DomainError("HullOracle: empty point set");
  // Seed the pool with the extreme points along each axis.
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    Eigen::Index lo = 0;
    Eigen::Index hi = 0;
    points.col(j).minCoeff(&lo);
    points.col(j).maxCoeff(&hi);
    add_to_pool(lo);
    add_to_pool(hi);
  }
}

void HullOracle::add_to_pool(Eigen::Index i) {
  if (in_pool_[static_cast<std::size_t>(i)]) return;
  in_pool_[static_cast<std::size_t>(i)] = 1;
  pool_.push_back(i);
}

MembershipResult HullOracle::contains(const Eigen::VectorXd& x, double tol) {
  const Eigen::Index n = points_.cols();
  const Eigen::Index total = points_.rows();
  if (x.size() != n) throw DomainError("contains: point has the wrong dimension");
  if (!(tol > 0.0)) throw DomainError("contains: tolerance must be positive");
  const double inside_tol = 0.1 * tol;
  auto shifted = [&](Eigen::Index i) -> Eigen::VectorXd { return points_.row(i).transpose() - x; };

  // Wolfe's min-norm point on {sum lambda_i (X_i - x)}: corral S with weights lambda.
  std::vector<Eigen::Index> corral;
  std::vector<Eigen::VectorXd> corral_y;
  std::vector<double> lambda;
  {
    Eigen::Index start = pool_.front();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i : pool_) {
      const double d2 = shifted(i).squaredNorm();
      if (d2 < best) {
        best = d2;
        start = i;
      }
    }
    corral = {start};
    corral_y = {shifted(start)};
    lambda = {1.0};
  }
  Eigen::VectorXd p = corral_y[0];
  const int max_major = 50 * static_cast<int>(n + 1);

  for (int major = 0;; ++major) {
    const double pn2 = p.squaredNorm();
    if (pn2 <= inside_tol * inside_tol) return inside_result(total, corral, lambda, std::sqrt(pn2));
    if (major >= max_major) break;

    double scale = pn2;
    for (const auto& y : corral_y) scale = std::max(scale, y.squaredNorm());
    const double slack = kWolfeSlack * scale;

    // Linear oracle over the pool first; only a stalled pool triggers a full scan.
    Eigen::Index j = -1;
    double best = std::numeric_limits<double>::infinity();
    const double xp = x.dot(p);
    for (Eigen::Index i : pool_) {
      const double v = points_.row(i).dot(p) - xp;
      if (v < best) {
        best = v;
        j = i;
      }
    }
    const bool in_corral = std::find(corral.begin(), corral.end(), j) != corral.end();
    if (best >= pn2 - slack || in_corral) {
      Eigen::Index jg = 0;
      const double vg = ((points_ * p).array() - xp).minCoeff(&jg);
      const double pn = std::sqrt(pn2);
      const double margin = vg / pn;
      if (margin >= tol) return outside_result(points_, x, -p);
      const bool global_stall = vg >= pn2 - slack || std::find(corral.begin(), corral.end(), jg) != corral.end();
      if (global_stall) {
        // p is the min-norm point at working precision; the distance lies in the
        // band (tol/10, tol), which counts as Outside.
        if (margin > 0.0) return outside_result(points_, x, -p);
        break;
      }
      add_to_pool(jg);
      j = jg;
    }
    corral.push_back(j);
    corral_y.push_back(shifted(j));
    lambda.push_back(0.0);

    // Minor cycle: move toward the affine minimizer until it lies in the relative interior.
    for (;;) {
      const std::vector<double> mu = affine_minimizer(corral_y);
      bool interior = true;
      for (double m : mu) interior = interior && m > kWeightFloor;
      if (interior) {
        lambda = mu;
        break;
      }
      double theta = 1.0;
      for (std::size_t k = 0; k < mu.size(); ++k) {
        if (mu[k] <= kWeightFloor) theta = std::min(theta, lambda[k] / (lambda[k] - mu[k]));
      }
      std::size_t drop = mu.size();
      double smallest = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < mu.size(); ++k) {
        lambda[k] = theta * mu[k] + (1.0 - theta) * lambda[k];
        if (lambda[k] < smallest) {
          smallest = lambda[k];
          drop = k;
        }
      }
      // Remove every vanished weight, at least the smallest one.
      std::vector<Eigen::Index> keep_idx;
      std::vector<Eigen::VectorXd> keep_y;
      std::vector<double> keep_l;
      for (std::size_t k = 0; k < mu.size(); ++k) {
        if (k == drop || lambda[k] <= kWeightFloor) continue;
        keep_idx.push_back(corral[k]);
        keep_y.push_back(corral_y[k]);
        keep_l.push_back(lambda[k]);
      }
      const double sum = std::accumulate(keep_l.begin(), keep_l.end(), 0.0);
      for (double& l : keep_l) l /= sum;
      corral = std::move(keep_idx);
      corral_y = std::move(keep_y);
      lambda = std::move(keep_l);
      if (corral.size() == 1) break;
    }
    p.setZero();
    for (std::size_t k = 0; k < corral.size(); ++k) p += lambda[k] * corral_y[k];
  }
  return contains_lp(points_, x, tol);
}

MembershipResult contains(const PolytopeSample& poly, const Eigen::VectorXd& x, double tol) {
  HullOracle oracle(poly.points);
  return oracle.contains(x, tol);
}

MembershipResult contains_lp(Eigen::Ref<const PointMatrix> points, const Eigen::VectorXd& x, double tol) {
  const Eigen::Index n = points.cols();
  const Eigen::Index total = points.rows();
  if (x.size() != n) throw DomainError("contains_lp: point has the wrong dimension");
  const Eigen::Index m = n + 1;
  const Eigen::Index cols = total + m;
  constexpr double kPivot = 1e-12;

  // Dense tableau [A | I | b] with rows flipped so b >= 0.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, cols + 1);
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(m);
  t.block(0, 0, n, total) = points.transpose();
  t.block(n, 0, 1, total).setOnes();
  t.block(0, total, m, m).setIdentity();
  t.col(cols).head(n) = x;
  t(n, cols) = 1.0;
  for (Eigen::Index r = 0; r < m; ++r) {
    if (t(r, cols) < 0.0) {
      t.row(r) *= -1.0;
      t(r, total + r) = 1.0;
      sign[r] = -1.0;
    }
  }
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = total + r;

  // Phase I: minimize the sum of artificials; Bland's rule prevents cycling.
  const long max_pivots = 50L * static_cast<long>(cols);
  for (long pivots = 0; pivots < max_pivots; ++pivots) {
    Eigen::Index enter = -1;
    for (Eigen::Index c = 0; c < total; ++c) {
      double reduced = 0.0;
      for (Eigen::Index r = 0; r < m; ++r) {
        if (basis[static_cast<std::size_t>(r)] >= total) reduced -= t(r, c);
      }
      if (reduced < -kPivot) {
        enter = c;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < m; ++r) {
      if (t(r, enter) > kPivot) {
        const double q = t(r, cols) / t(r, enter);
        if (q < ratio ||
            (q == ratio && basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
          ratio = q;
          leave = r;
        }
      }
    }
    if (leave < 0) break;  // unbounded direction cannot occur in phase I
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index r = 0; r < m; ++r) {
      if (r != leave && t(r, enter) != 0.0) t.row(r) -= t(r, enter) * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  double infeasibility = 0.0;
  for (Eigen::Index r = 0; r < m; ++r) {
    if (basis[static_cast<std::size_t>(r)] >= total) infeasibility += t(r, cols);
  }
  if (infeasibility <= tol) {
    MembershipResult r;
    r.verdict = Membership::Inside;
    r.used_lp = true;
    r.weights = Eigen::VectorXd::Zero(total);
    for (Eigen::Index k = 0; k < m; ++k) {
      const Eigen::Index b = basis[static_cast<std::size_t>(k)];
      if (b < total) r.weights[b] = std::max(0.0, t(k, cols));
    }
    r.weights /= r.weights.sum();
    r.distance_bound = (points.transpose() * r.weights - x).norm();
    return r;
  }
  // Farkas: y = c_B^T B^{-1}, with B^{-1} sitting in the artificial columns.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    if (basis[static_cast<std::size_t>(r)] >= total) y += t.block(r, total, 1, m).transpose();
  }
  y = y.cwiseProduct(sign);
  MembershipResult r = outside_result(points, x, y.head(n));
  r.used_lp = true;
  return r;
}

RngStream polytope_stream(RngStream stream, std::size_t trial) { return stream.child(2 * trial); }
RngStream test_point_stream(RngStream stream, std::size_t trial) { return stream.child(2 * trial + 1); }

std::vector<MeasureEstimate> estimate_measure_nested(const MeasureModel& model, std::span<const std::size_t> sizes,
                                                     std::size_t trials, std::size_t test_points, RngStream stream,
                                                     int workers) {
  if (trials < 1 || test_points < 1) throw DomainError("estimate_measure: need trials >= 1 and test_points >= 1");
  if (sizes.empty()) return {};
  const auto n = static_cast<std::size_t>(model.dimension());
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] <= n) throw DomainError("estimate_measure: need N > n points");
    if (k > 0 && sizes[k] <= sizes[k - 1]) throw DomainError("estimate_measure: sizes must increase");
  }
  const std::size_t levels = sizes.size();
  // hits[r * levels + k]: test points of trial r inside K_{N_k}.
  std::vector<std::size_t> hits(trials * levels, 0);
  parallel_for(trials, workers, [&](std::size_t r) {
    const PointMatrix points = sample(model, sizes.back(), polytope_stream(stream, r));
    const PointMatrix tests = sample(model, test_points, test_point_stream(stream, r));
    std::vector<HullOracle> oracles;
    oracles.reserve(levels);
    for (std::size_t k = 0; k < levels; ++k) oracles.emplace_back(points.topRows(static_cast<Eigen::Index>(sizes[k])));
    for (Eigen::Index i = 0; i < tests.rows(); ++i) {
      const Eigen::VectorXd x = tests.row(i).transpose();
      // Coupling: inside a smaller polytope means inside every larger one, so the
      // smallest containing level is found by bisection.
      std::size_t lo = 0;
      std::size_t hi = levels;  // levels means "in none"
      while (lo < hi) {
        const std::size_t mid = hi == levels && lo + 1 < levels ? levels - 1 : lo + (hi - lo) / 2;
        if (oracles[mid].contains(x).verdict == Membership::Inside) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      for (std::size_t l = lo; l < levels; ++l) ++hits[r * levels + l];
    }
  });
  std::vector<MeasureEstimate> out(levels);
  const double tp = static_cast<double>(test_points);
  for (std::size_t k = 0; k < levels; ++k) {
    MeasureEstimate& e = out[k];
    e.N = sizes[k];
    e.trials = trials;
    e.test_points = test_points;
    e.per_trial.resize(trials);
    double sum = 0.0;
    for (std::size_t r = 0; r < trials; ++r) {
      e.per_trial[r] = static_cast<double>(hits[r * levels + k]) / tp;
      sum += e.per_trial[r];
    }
    e.value = sum / static_cast<double>(trials);
    double var = 0.0;
    if (trials > 1) {
      for (double f : e.per_trial) var += (f - e.value) * (f - e.value);
      var /= static_cast<double>(trials - 1);
      e.std_error = std::sqrt(var / static_cast<double>(trials));
    } else {
      e.std_error = std::sqrt(std::max(e.value * (1.0 - e.value), 1.0 / tp) / tp);
    }
    e.ci = kZ95 * e.std_error;
  }
  return out;
}

MeasureEstimate estimate_measure(const MeasureModel& model, std::size_t N, std::size_t trials, std::size_t test_points,
                                 RngStream stream, int workers) {
  const std::size_t sizes[] = {N};
  return estimate_measure_nested(model, sizes, trials, test_points, stream, workers).front();
}

}  // namespace cramerlab
