#pragma once

#include <cstddef>
#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "cramerlab/measures.hpp"

namespace cramerlab {

enum class LaplaceMethod { Auto, ClosedForm, Quadrature1DTensor, MonteCarlo };

const char* to_string(LaplaceMethod method);

struct LaplaceSettings {
  LaplaceMethod method = LaplaceMethod::Auto;
  std::size_t mc_samples = std::size_t{1} << 18;
  RngStream stream{0x1a91ace, 0};
  /// Pair every draw with its reflection when the model is centrally symmetric.
  bool antithetic = true;
  /// Rescale the draws so their mean and covariance match the model exactly.
  bool moment_match = true;
  int workers = 1;
};

struct LaplaceValue {
  double value = 0.0;
  Eigen::VectorXd gradient;  // barycenter of the tilted measure
  Eigen::MatrixXd hessian;   // covariance of the tilted measure
  double ess = 0.0;          // effective sample size (infinite for deterministic rules)
};

enum class LaplaceOrder { Value = 0, Gradient = 1, Hessian = 2 };

/// Lambda(xi) = ln E exp(<xi, Z>) and its derivatives for one model and one method.
/// Construction does all expensive setup (draws for Monte Carlo); evaluation is const
/// and thread-safe.
class LaplaceEvaluator {
 public:
  virtual ~LaplaceEvaluator() = default;
  virtual int dimension() const = 0;
  virtual LaplaceMethod method() const = 0;
  virtual LaplaceValue evaluate(const Eigen::VectorXd& xi, LaplaceOrder order) const = 0;
};

/// Resolves Auto to the most accurate rule the model supports.  Throws DomainError for
/// combinations that are not available (e.g. ClosedForm on a Product).
LaplaceMethod resolve_method(const MeasureModel& model, LaplaceMethod requested);

std::unique_ptr<LaplaceEvaluator> make_laplace_evaluator(const MeasureModel& model,
                                                         const LaplaceSettings& settings = {});

double log_laplace(const MeasureModel& model, const Eigen::VectorXd& xi, const LaplaceSettings& settings = {});
Eigen::VectorXd grad_log_laplace(const MeasureModel& model, const Eigen::VectorXd& xi,
                                 const LaplaceSettings& settings = {});
Eigen::MatrixXd hess_log_laplace(const MeasureModel& model, const Eigen::VectorXd& xi,
                                 const LaplaceSettings& settings = {});

/// The exponentially tilted measure mu_xi with density exp(<xi,z> - Lambda(xi)) f(z).
class TiltedMeasure {
 public:
  TiltedMeasure(MeasureModel base, Eigen::VectorXd xi, const LaplaceSettings& settings = {});

  const MeasureModel& base() const { return base_; }
  const Eigen::VectorXd& xi() const { return xi_; }
  double log_laplace_at_xi() const { return value_.value; }

  double log_density(const Eigen::VectorXd& z) const;
  const Eigen::VectorXd& barycenter() const { return value_.gradient; }
  const Eigen::MatrixXd& covariance() const { return value_.hessian; }
  /// Var of <p, Z> under mu_xi with a confidence half-width (0 for deterministic rules;
  /// batch means over 16 batches for Monte Carlo).
  Estimate projected_variance(const Eigen::VectorXd& p) const;
  /// Integral of the tilted density by an independent rule (Monte Carlo over the base).
  Estimate total_mass(std::size_t samples, RngStream stream) const;

 private:
  MeasureModel base_;
  Eigen::VectorXd xi_;
  LaplaceSettings settings_;
  LaplaceValue value_;
};

enum class LegendreStatus { Converged, AtInfinity, MaxIter };

const char* to_string(LegendreStatus status);

struct LegendreResult {
  double value = 0.0;  // Lambda*(x); +inf when AtInfinity; a lower bound when MaxIter
  Eigen::VectorXd argmax_xi;
  double grad_norm = 0.0;
  int iterations = 0;
  LegendreStatus status = LegendreStatus::Converged;
  /// The solve stopped as soon as the value exceeded CramerOptions::stop_above.
  bool stopped_early = false;
};

enum class CramerStrategy {
  Auto,  // closed form, separable 1-D solves or radial reduction when available
  Joint  // always the n-dimensional Newton iteration on the chosen evaluator
};

struct CramerOptions {
  LaplaceSettings laplace;
  CramerStrategy strategy = CramerStrategy::Auto;
  double tol_grad_rel = 1e-9;  // tol = tol_grad_rel * (1 + |x|)
  int max_iter = 200;
  double armijo = 1e-4;
  double backtrack = 0.5;
  double xi_infinity = 1e8;
  double value_infinity = 1e6;
  double max_condition = 1e12;
  std::optional<double> stop_above;
};

/// Reusable Cramer transform of one model.  Holds the evaluator (and its Monte Carlo
/// draws) so repeated calls are cheap.  Thread-safe.
class CramerTransform {
 public:
  explicit CramerTransform(const MeasureModel& model, const CramerOptions& options = {});
  ~CramerTransform();
  CramerTransform(CramerTransform&&) noexcept;
  CramerTransform& operator=(CramerTransform&&) noexcept;

  LegendreResult operator()(const Eigen::VectorXd& x) const;
  LegendreResult evaluate(const Eigen::VectorXd& x, std::optional<double> stop_above) const;
  const MeasureModel& model() const { return model_; }
  const CramerOptions& options() const { return options_; }
  const LaplaceEvaluator& evaluator() const { return *evaluator_; }
  /// Method actually used for Lambda.
  LaplaceMethod method() const { return evaluator_->method(); }

 private:
  MeasureModel model_;
  CramerOptions options_;
  std::unique_ptr<LaplaceEvaluator> evaluator_;
  bool separable_ = false;
  bool radial_ = false;
  bool gaussian_closed_ = false;
};

LegendreResult cramer(const MeasureModel& model, const Eigen::VectorXd& x, const CramerOptions& options = {});

/// Lambda* of a 1-D law by the scalar Newton iteration.
LegendreResult cramer_1d(const Custom1D& law, double x, const CramerOptions& options = {});

enum class SublevelVerdict { Inside, Outside, Boundary };

const char* to_string(SublevelVerdict verdict);

struct SublevelOptions {
  CramerOptions cramer;
  double boundary_tol = 1e-9;  // relative to max(1, t)
};

SublevelVerdict in_sublevel(const CramerTransform& transform, const Eigen::VectorXd& x, double t,
                            double boundary_tol = 1e-9);
SublevelVerdict in_sublevel(const MeasureModel& model, const Eigen::VectorXd& x, double t,
                            const SublevelOptions& options = {});

}  // namespace cramerlab
