#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "cramerlab/measures.hpp"

namespace cramerlab {

enum class DepthMethod { Exact, DirectionSearch };

const char* to_string(DepthMethod method);

struct DepthResult {
  double phi = 0.0;
  double log_depth_omega = 0.0;  // -ln(phi); +inf when phi = 0
  Eigen::VectorXd direction;     // unit normal of the (approximately) minimizing half-space
  DepthMethod method = DepthMethod::Exact;
  double ci = 0.0;
};

struct DepthOptions {
  int starts = 32;
  /// Starts that get the local descent after screening.
  int refine = 4;
  int max_steps = 20;
  /// Rotation angle for the finite differences.
  double fd_angle = 0.02;
  TailBudget tail;
  std::uint64_t seed = 0xde9;
  int workers = 1;
  /// Add the direction of the Legendre maximizer at x as a start.
  bool cramer_start = true;
  std::optional<Eigen::VectorXd> extra_start;
  /// Search even when a closed form is available (for cross-checks).
  bool force_search = false;
};

/// Tukey half-space depth of x under `model`.
DepthResult depth(const MeasureModel& model, const Eigen::VectorXd& x, const DepthOptions& options = {});

/// Same search with a prebuilt tail oracle; the draws are shared by all calls.
DepthResult depth(const DirectionalTail& tail, const Eigen::VectorXd& x, const DepthOptions& options = {});

struct CentroidBudget {
  std::size_t samples = 200'000;
  RngStream stream{0xce7, 0};
  int workers = 1;
};

/// (2 E <X, y>_+^t)^{1/t}.
Estimate centroid_support(const MeasureModel& model, const Eigen::VectorXd& y, double t,
                          const CentroidBudget& budget = {});

/// min over 64 sampled unit y of centroid_support(y, t) / centroid_support(y, 2).
Estimate centroid_growth_ratio(const MeasureModel& model, double t, const CentroidBudget& budget = {});

}  // namespace cramerlab
