#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cramerlab/measures.hpp"

namespace cramerlab {

/// N points spanning K_N = conv{X_1, ..., X_N}.
struct PolytopeSample {
  PointMatrix points;
  RngStream generator;

  int dimension() const { return static_cast<int>(points.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
};

/// Throws DomainError unless N > n.
PolytopeSample sample_polytope(const MeasureModel& model, std::size_t N, RngStream stream, int workers = 1);

enum class Membership { Inside, Outside };

const char* to_string(Membership verdict);

struct MembershipResult {
  Membership verdict = Membership::Outside;
  /// Inside: convex weights over all points (sparse in practice).
  Eigen::VectorXd weights;
  /// Outside: unit d with <X_i - x, d> <= -margin for every i.
  Eigen::VectorXd direction;
  double margin = 0.0;
  /// Inside: |sum w_i X_i - x|.  Outside: margin, a lower bound on the distance to K_N.
  double distance_bound = 0.0;
  bool used_lp = false;
};

/// Membership queries against one point set.  Remembers the points that were
/// extreme in earlier queries, so a batch of queries scans all N points rarely.
/// Not thread-safe; use one oracle per thread.
class HullOracle {
 public:
  explicit HullOracle(Eigen::Ref<const PointMatrix> points);
  MembershipResult contains(const Eigen::VectorXd& x, double tol = 1e-9);
  std::size_t pool_size() const { return pool_.size(); }

 private:
  void add_to_pool(Eigen::Index i);

  Eigen::Ref<const PointMatrix> points_;
  std::vector<Eigen::Index> pool_;
  std::vector<char> in_pool_;
};

MembershipResult contains(const PolytopeSample& poly, const Eigen::VectorXd& x, double tol = 1e-9);

/// Phase-I simplex on {lambda >= 0, sum lambda = 1, sum lambda_i X_i = x}.  The
/// Outside direction comes from the Farkas dual.
MembershipResult contains_lp(Eigen::Ref<const PointMatrix> points, const Eigen::VectorXd& x, double tol = 1e-9);

struct MeasureEstimate {
  std::size_t N = 0;
  double value = 0.0;
  double std_error = 0.0;
  double ci = 0.0;
  std::size_t trials = 0;
  std::size_t test_points = 0;
  std::vector<double> per_trial;  // inside fraction of each trial
};

/// Two-level Monte Carlo estimate of E mu(K_N): `trials` polytopes, each scored on
/// `test_points` fresh points.
MeasureEstimate estimate_measure(const MeasureModel& model, std::size_t N, std::size_t trials,
                                 std::size_t test_points, RngStream stream, int workers = 1);

/// Same for several N at once.  Trial r uses the first N rows of one shared sample
/// and the same test points for every N, so K_{N1} is inside K_{N2} for N1 < N2.
std::vector<MeasureEstimate> estimate_measure_nested(const MeasureModel& model, std::span<const std::size_t> sizes,
                                                     std::size_t trials, std::size_t test_points, RngStream stream,
                                                     int workers = 1);

/// Streams used by trial r (shared by both estimators).
RngStream polytope_stream(RngStream stream, std::size_t trial);
RngStream test_point_stream(RngStream stream, std::size_t trial);

}  // namespace cramerlab
