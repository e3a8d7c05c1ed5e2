#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cramerlab/depth.hpp"
#include "cramerlab/measures.hpp"
#include "cramerlab/transform.hpp"

namespace cramerlab {

enum class MomentPath {
  Auto,       // closed form or 1-D quadrature when the model allows it
  MonteCarlo  // always sample
};

struct MomentBudget {
  std::size_t samples = 100'000;
  RngStream stream{0xa11a, 0};
  int workers = 1;
  MomentPath path = MomentPath::Auto;
  bool exp_half = false;  // also estimate E exp(Lambda*/2)
};

struct MomentCI {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  double exp_half_moment = 0.0;
};

struct MomentReport {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  double exp_half_moment = 0.0;  // NaN unless requested
  std::size_t sample_count = 0;  // 0 for closed form and quadrature
  MomentCI ci;
  bool exact = false;
  /// Draws where the Legendre solve reported AtInfinity; excluded from the moments.
  std::size_t censored = 0;
  /// More than 0.1% of the draws were censored.
  bool right_censored = false;
  /// Standard error of beta = variance / mean^2 (delta method).
  double beta_std_error = 0.0;
  /// Depth noise exceeds 10% of the variance (omega moments only).
  bool low_confidence = false;
  std::string path;
};

/// Moments of Lambda*(X), X ~ mu.
MomentReport cramer_moments(const MeasureModel& model, const MomentBudget& budget = {});

/// Moments of omega(X) = -ln phi(X) for body kinds.
struct OmegaBudget {
  MomentBudget moments;
  DepthOptions depth;
};
MomentReport omega_moments(const MeasureModel& model, const OmegaBudget& budget = {});

/// Lambda*(X_i) for `count` draws of `stream` (AtInfinity gives +inf).
std::vector<double> cramer_sample(const MeasureModel& model, std::size_t count, RngStream stream, int workers = 1);

struct RatioEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double ci = 0.0;
  bool exact = false;
  bool low_confidence = false;
  MomentReport moments;
};

/// beta(mu) = Var(Lambda*) / (E Lambda*)^2.
RatioEstimate beta_parameter(const MeasureModel& model, const MomentBudget& budget = {});

/// tau(mu_K) = Var(omega) / (E omega)^2; body kinds only.
RatioEstimate tau_parameter(const MeasureModel& model, const OmegaBudget& budget = {});

struct IsotropicBudget {
  std::size_t samples = 1'000'000;
  RngStream stream{0x150, 0};
  int workers = 1;
};

/// L_mu = (sup f)^{1/n} det(Cov)^{1/(2n)} with the covariance estimated from samples.
double isotropic_constant(const MeasureModel& model, const IsotropicBudget& budget = {});

enum class BetaRegime { SmallBeta, LargeBeta };

const char* to_string(BetaRegime regime);

struct ThresholdConditions {
  bool lower = false;  // n / L^2 hypothesis for the rho_1 bound
  bool upper = false;  // n / L^2 hypothesis for the rho_2 bound
};

struct ThresholdReport {
  double beta = 0.0;
  double delta = 0.0;
  double mean_over_n = 0.0;
  double rho1_bound = 0.0;  // NaN when the beta/delta range has no bound
  double rho2_bound = 0.0;
  BetaRegime regime = BetaRegime::SmallBeta;
  ThresholdConditions conditions_met;
};

ThresholdReport rho_bounds(double beta, double delta, double mean_over_n, int n, double isotropic, double c2 = 1.0);

struct MomentRatioCheck {
  bool holds = false;
  double lhs = 0.0;  // (n+1)^2 (E Lambda*)^2
  double rhs = 0.0;  // n(n+2) E (Lambda*)^2
  double ci = 0.0;   // half-width of lhs - rhs
  /// Var - mean^2 / (n(n+2)), the variance floor implied by the inequality.
  double variance_margin = 0.0;
};

MomentRatioCheck moment_ratio_check(const MeasureModel& model, const MomentBudget& budget = {});

/// Integral of exp(Lambda*(x)/2) d mu(x) for a 1-D law.
double exp_half_moment_1d(const Custom1D& law);

/// E exp(kappa Lambda*(X) / 2) for a uniform body with kappa = 1/n.
Estimate kappa_exp_moment(const MeasureModel& model, const MomentBudget& budget = {});

/// (e^2 n)^{1/(2n)} c sqrt(n).
double kappa_exp_bound(int n, double c = 2.0);

/// mu(B_t) with B_t = {Lambda* <= t} and a lower bound for inf of the depth over B_t.
struct SublevelPoint {
  double t = 0.0;
  Estimate measure;
  double depth_floor = 0.0;  // NaN when no bound is available
  bool depth_floor_exact = false;
};

struct SublevelBudget {
  std::size_t samples = 100'000;
  RngStream stream{0x5b1, 0};
  int workers = 1;
};

std::vector<SublevelPoint> sublevel_profile(const MeasureModel& model, std::span<const double> t_grid,
                                            const SublevelBudget& budget = {});

/// Radius of B_t for a ball (Lambda*_1(rho) = t along a diameter).
double ball_sublevel_radius(const MeasureModel& ball, double t);

}  // namespace cramerlab
