#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cramerlab/rng.hpp"

namespace cramerlab {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Log-Laplace value with first and second derivative of a 1-D law at one tilt.
struct Tilt1D {
  double log_laplace = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

/// A centered log-concave law on an interval (lower, upper), possibly unbounded,
/// given by an unnormalized concave log-density.  Normalization, moments, CDF
/// tables and tilts are all computed by 1-D quadrature.
class Custom1D {
 public:
  using LogDensity = std::function<double(double)>;

  /// Throws DomainError when the log-density fails the concavity spot check,
  /// does not integrate, or the law is not centered.
  Custom1D(std::string name, LogDensity log_density, double lower, double upper);

  static Custom1D uniform(double half_width);
  static Custom1D laplace(double scale);
  /// Exponential(rate) shifted to mean zero; support (-1/rate, inf).
  static Custom1D centered_exponential(double rate);
  static Custom1D gaussian(double sigma);
  static Custom1D logistic(double scale);
  /// First coordinate of the uniform law on the n-ball of the given radius.
  static Custom1D ball_marginal(int n, double radius);

  const std::string& name() const;
  double lower() const;
  double upper() const;
  /// Window outside which the density is below 1e-16 of its maximum.
  double effective_lower() const;
  double effective_upper() const;

  double log_pdf(double x) const;
  double pdf(double x) const;
  double cdf(double x) const;
  double sf(double x) const;
  double quantile(double u) const;
  double mean() const;
  double variance() const;
  double log_sup_density() const;
  /// Integral of the normalized density recomputed by an independent rule.
  double normalization_check() const;
  bool symmetric() const;

  /// Lambda(s), Lambda'(s), Lambda''(s).
  Tilt1D tilt(double s) const;
  /// E |Z|^p restricted to Z > 0 (p > 0), i.e. E Z_+^p.
  double positive_moment(double p) const;
  /// E (-Z)_+^p.
  double negative_moment(double p) const;

 private:
  /// Closed forms of the named laws; tilt(), cdf() and sf() then skip the quadrature.
  struct Exact {
    std::function<Tilt1D(double)> tilt;
    std::function<double(double)> cdf;
    std::function<double(double)> sf;
  };
  Custom1D(std::string name, LogDensity log_density, double lower, double upper, Exact exact);

  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

enum class MeasureKind { UniformCube, UniformBallVol1, UniformBallUnit, StandardGaussian, Product, Custom1D };

const char* to_string(MeasureKind kind);

struct Support {
  enum class Shape { Box, Ball, Whole };
  Shape shape = Shape::Whole;
  Eigen::VectorXd lower;  // Box bounds (may be infinite per axis)
  Eigen::VectorXd upper;
  double radius = 0.0;    // Ball
};

struct Capabilities {
  bool closed_form_laplace = false;
  bool closed_form_cramer = false;
  bool exact_depth = false;
  bool exact_tail = false;
};

/// Immutable description of one supported measure.  Copies share state.
class MeasureModel {
 public:
  static MeasureModel uniform_cube(int n, double side = 1.0);
  static MeasureModel uniform_ball_vol1(int n);
  static MeasureModel uniform_ball_unit(int n);
  static MeasureModel uniform_ball(int n, double radius);
  static MeasureModel standard_gaussian(int n);
  static MeasureModel product(std::vector<Custom1D> components);
  static MeasureModel custom1d(Custom1D component);

  MeasureKind kind() const { return kind_; }
  int dimension() const { return n_; }
  const Support& support() const { return support_; }
  const Capabilities& capabilities() const { return caps_; }

  double side() const { return side_; }
  double radius() const { return radius_; }
  /// Per-coordinate laws for cube, Product and Custom1D kinds; empty otherwise.
  std::span<const Custom1D> components() const { return components_; }
  bool separable() const { return !components_.empty(); }
  /// First-coordinate law of a ball.
  const Custom1D& ball_marginal() const;

  bool is_body() const;
  bool centrally_symmetric() const;
  /// sup of the density (for the isotropic constant).
  double log_sup_density() const;
  /// Diagonal of Cov(mu); every supported kind has diagonal covariance.
  Eigen::VectorXd marginal_variances() const;
  double largest_marginal_variance() const;
  /// x strictly inside the support.
  bool in_interior(const Eigen::VectorXd& x) const;
  /// Gauge of x for body kinds (infinite support gives 0).
  double body_norm(const Eigen::VectorXd& x) const;

  std::string describe() const;

  /// Draws consumed per sample; sample i reads draws [i*k, (i+1)*k) of its stream.
  std::uint64_t draws_per_sample() const;
  /// Writes samples first_index .. first_index+out.rows()-1 of `stream`.
  void sample_into(Eigen::Ref<PointMatrix> out, RngStream stream, std::uint64_t first_index = 0) const;

 private:
  MeasureModel() = default;

  MeasureKind kind_ = MeasureKind::StandardGaussian;
  int n_ = 0;
  double side_ = 0.0;
  double radius_ = 0.0;
  Support support_;
  Capabilities caps_;
  std::vector<Custom1D> components_;
  std::shared_ptr<const Custom1D> marginal_;
};

/// count i.i.d. points from `model`; row i depends only on (stream, i).
PointMatrix sample(const MeasureModel& model, std::size_t count, RngStream stream, int workers = 1);

double log_density(const MeasureModel& model, const Eigen::VectorXd& x);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;  // standard error (0 when exact)
  double ci = 0.0;       // 95% half-width
  bool exact = false;
};

struct TailBudget {
  std::size_t samples = 100'000;
  RngStream stream{0x7a11, 0};
  int workers = 1;
};

/// mu({z : <z - x, theta> >= 0}).  Reusable: Monte Carlo draws are generated once
/// and shared by every query (common random numbers across directions).
class DirectionalTail {
 public:
  DirectionalTail(const MeasureModel& model, const TailBudget& budget);
  Estimate operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& theta) const;
  bool exact_for(const Eigen::VectorXd& theta) const;
  const MeasureModel& model() const { return model_; }

 private:
  Estimate cube_tilted(double c, const Eigen::VectorXd& theta) const;
  Estimate plain(double c, const Eigen::VectorXd& theta) const;

  MeasureModel model_;
  TailBudget budget_;
  // Uniforms in (0,1) for the cube, points for other Monte Carlo kinds; empty when every
  // direction is exact.
  PointMatrix draws_;
};

Estimate directional_tail(const MeasureModel& model, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& theta, const TailBudget& budget = {});

/// Throws DomainError unless |theta| = 1 within 1e-12.
void require_unit(const Eigen::VectorXd& theta);

}  // namespace cramerlab
