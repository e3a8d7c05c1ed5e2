#include "cramerlab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "cramerlab/closedform.hpp"
#include "cramerlab/errors.hpp"

namespace cramerlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;
constexpr double kMinEss = 100.0;

void require_length(const Eigen::VectorXd& v, int n, const char* what) {
  if (v.size() != n) throw DomainError(std::string(what) + ": vector has the wrong dimension");
}

// ---------------------------------------------------------------------------
// Evaluators

class GaussianClosedForm final : public LaplaceEvaluator {
 public:
  explicit GaussianClosedForm(int n) : n_(n) {}
  int dimension() const override { return n_; }
  LaplaceMethod method() const override { return LaplaceMethod::ClosedForm; }
  LaplaceValue evaluate(const Eigen::VectorXd& xi, LaplaceOrder order) const override {
    LaplaceValue v;
    v.value = 0.5 * xi.squaredNorm();
    v.ess = kInf;
    if (order >= LaplaceOrder::Gradient) v.gradient = xi;
    if (order >= LaplaceOrder::Hessian) v.hessian = Eigen::MatrixXd::Identity(n_, n_);
    return v;
  }

 private:
  int n_;
};

// Coordinate-wise sums; `tilt(i, s)` gives Lambda_i and its derivatives.
class SeparableEvaluator final : public LaplaceEvaluator {
 public:
  using Tilt = std::function<Tilt1D(int, double)>;
  SeparableEvaluator(int n, LaplaceMethod method, Tilt tilt) : n_(n), method_(method), tilt_(std::move(tilt)) {}
  int dimension() const override { return n_; }
  LaplaceMethod method() const override { return method_; }
  LaplaceValue evaluate(const Eigen::VectorXd& xi, LaplaceOrder order) const override {
    LaplaceValue v;
    v.ess = kInf;
    if (order >= LaplaceOrder::Gradient) v.gradient.resize(n_);
    if (order >= LaplaceOrder::Hessian) v.hessian = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) {
      const Tilt1D t = tilt_(i, xi[i]);
      v.value += t.log_laplace;
      if (order >= LaplaceOrder::Gradient) v.gradient[i] = t.mean;
      if (order >= LaplaceOrder::Hessian) v.hessian(i, i) = t.variance;
    }
    return v;
  }
  Tilt1D coordinate(int i, double s) const { return tilt_(i, s); }

 private:
  int n_;
  LaplaceMethod method_;
  Tilt tilt_;
};

// Rotation-invariant laws: Lambda(xi) = Lambda_1(|xi|) with Lambda_1 the first-coordinate law.
class RadialEvaluator final : public LaplaceEvaluator {
 public:
  RadialEvaluator(int n, Custom1D marginal) : n_(n), marginal_(std::move(marginal)) {}
  int dimension() const override { return n_; }
  LaplaceMethod method() const override { return LaplaceMethod::Quadrature1DTensor; }
  LaplaceValue evaluate(const Eigen::VectorXd& xi, LaplaceOrder order) const override {
    const double s = xi.norm();
    const Tilt1D t = marginal_.tilt(s);
    LaplaceValue v;
    v.value = t.log_laplace;
    v.ess = kInf;
    if (order >= LaplaceOrder::Gradient) {
      v.gradient = s > 0.0 ? Eigen::VectorXd(xi * (t.mean / s)) : Eigen::VectorXd::Zero(n_);
    }
    if (order >= LaplaceOrder::Hessian) {
      // Along xi the variance of the marginal; across, Lambda_1'(s)/s (-> Lambda_1''(0) at 0).
      const double across = s > 1e-6 ? t.mean / s : marginal_.variance();
      v.hessian = across * Eigen::MatrixXd::Identity(n_, n_);
      if (s > 0.0) {
        const Eigen::VectorXd u = xi / s;
        v.hessian += (t.variance - across) * u * u.transpose();
      }
    }
    return v;
  }
  const Custom1D& marginal() const { return marginal_; }

 private:
  int n_;
  Custom1D marginal_;
};

class MonteCarloEvaluator final : public LaplaceEvaluator {
 public:
  MonteCarloEvaluator(const MeasureModel& model, const LaplaceSettings& settings) : n_(model.dimension()) {
    if (settings.mc_samples < 2) throw DomainError("MonteCarlo Laplace: need at least two samples");
    const bool mirror = settings.antithetic && model.centrally_symmetric();
    const std::size_t base = mirror ? (settings.mc_samples + 1) / 2 : settings.mc_samples;
    PointMatrix drawn = sample(model, base, settings.stream, settings.workers);
    if (mirror) {
      z_.resize(static_cast<Eigen::Index>(2 * base), n_);
      z_.topRows(static_cast<Eigen::Index>(base)) = drawn;
      z_.bottomRows(static_cast<Eigen::Index>(base)) = -drawn;
    } else {
      z_ = std::move(drawn);
    }
    if (settings.moment_match) {
      if (!mirror) z_.rowwise() -= z_.colwise().mean();
      const Eigen::MatrixXd cov = (z_.transpose() * z_) / static_cast<double>(z_.rows());
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      if (llt.info() != Eigen::Success) throw SampleSizeError("MonteCarlo Laplace: empirical covariance is singular");
      const Eigen::MatrixXd l_inv =
          llt.matrixL().solve(Eigen::MatrixXd::Identity(n_, n_));
      const Eigen::VectorXd sd = model.marginal_variances().cwiseSqrt();
      const Eigen::MatrixXd a = l_inv.transpose() * sd.asDiagonal();
      z_ = z_ * a;
    }
  }

  int dimension() const override { return n_; }
  LaplaceMethod method() const override { return LaplaceMethod::MonteCarlo; }

  LaplaceValue evaluate(const Eigen::VectorXd& xi, LaplaceOrder order) const override {
    const Eigen::VectorXd proj = z_ * xi;
    const double top = proj.maxCoeff();
    if (top > 700.0) {
      throw PrecisionError("MonteCarlo Laplace: max <xi, Z> exceeds 700; exp would overflow");
    }
    const Eigen::ArrayXd w = (proj.array() - top).exp();
    const double sum = w.sum();
    LaplaceValue v;
    v.value = top + std::log(sum / static_cast<double>(z_.rows()));
    v.ess = sum * sum / w.square().sum();
    if (order >= LaplaceOrder::Gradient) {
      if (v.ess < kMinEss) throw EstimatorDegenerate("MonteCarlo Laplace: effective sample size below 100");
      v.gradient = z_.transpose() * w.matrix() / sum;
    }
    if (order >= LaplaceOrder::Hessian) {
      const PointMatrix weighted = z_.array().colwise() * w;
      v.hessian = weighted.transpose() * z_ / sum - v.gradient * v.gradient.transpose();
    }
    return v;
  }

  // Self-normalized variance of <p, Z> under the tilt, with a 16-batch CI.
  Estimate projected_variance(const Eigen::VectorXd& xi, const Eigen::VectorXd& p) const {
    const Eigen::VectorXd proj = z_ * xi;
    const double top = proj.maxCoeff();
    const Eigen::ArrayXd w = (proj.array() - top).exp();
    const Eigen::ArrayXd q = (z_ * p).array();
    auto weighted_var = [&](Eigen::Index begin, Eigen::Index count) {
      const auto ws = w.segment(begin, count);
      const auto qs = q.segment(begin, count);
      const double s = ws.sum();
      const double m = (ws * qs).sum() / s;
      return (ws * (qs - m).square()).sum() / s;
    };
    const Eigen::Index total = z_.rows();
    constexpr int kBatches = 16;
    const Eigen::Index per = total / kBatches;
    std::vector<double> batch(kBatches);
    for (int b = 0; b < kBatches; ++b) batch[b] = weighted_var(b * per, per);
    double mean = 0.0;
    for (double v : batch) mean += v;
    mean /= kBatches;
    double ss = 0.0;
    for (double v : batch) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (kBatches - 1) / kBatches);
    return {weighted_var(0, total), se, kZ95 * se, false};
  }

 private:
  int n_;
  PointMatrix z_;
};

}  // namespace

const char* to_string(LaplaceMethod method) {
  switch (method) {
    case LaplaceMethod::Auto: return "Auto";
    case LaplaceMethod::ClosedForm: return "ClosedForm";
    case LaplaceMethod::Quadrature1DTensor: return "Quadrature1DTensor";
    case LaplaceMethod::MonteCarlo: return "MonteCarlo";
  }
  return "?";
}

const char* to_string(LegendreStatus status) {
  switch (status) {
    case LegendreStatus::Converged: return "Converged";
    case LegendreStatus::AtInfinity: return "AtInfinity";
    case LegendreStatus::MaxIter: return "MaxIter";
  }
  return "?";
}

const char* to_string(SublevelVerdict verdict) {
  switch (verdict) {
    case SublevelVerdict::Inside: return "Inside";
    case SublevelVerdict::Outside: return "Outside";
    case SublevelVerdict::Boundary: return "Boundary";
  }
  return "?";
}

LaplaceMethod resolve_method(const MeasureModel& model, LaplaceMethod requested) {
  const auto kind = model.kind();
  const bool gaussian = kind == MeasureKind::StandardGaussian;
  const bool cube = kind == MeasureKind::UniformCube;
  switch (requested) {
    case LaplaceMethod::Auto:
      return gaussian || cube ? LaplaceMethod::ClosedForm : LaplaceMethod::Quadrature1DTensor;
    case LaplaceMethod::ClosedForm:
      if (!model.capabilities().closed_form_laplace) {
        throw DomainError(std::string("ClosedForm Laplace transform unavailable for ") + to_string(kind));
      }
      return requested;
    case LaplaceMethod::Quadrature1DTensor:
      if (gaussian) throw DomainError("StandardGaussian supports ClosedForm or MonteCarlo only");
      return requested;
    case LaplaceMethod::MonteCarlo: return requested;
  }
  return requested;
}

std::unique_ptr<LaplaceEvaluator> make_laplace_evaluator(const MeasureModel& model, const LaplaceSettings& settings) {
  const LaplaceMethod method = resolve_method(model, settings.method);
  const int n = model.dimension();
  if (method == LaplaceMethod::MonteCarlo) return std::make_unique<MonteCarloEvaluator>(model, settings);
  if (model.kind() == MeasureKind::StandardGaussian) return std::make_unique<GaussianClosedForm>(n);
  if (model.kind() == MeasureKind::UniformCube && method == LaplaceMethod::ClosedForm) {
    const double side = model.side();
    return std::make_unique<SeparableEvaluator>(n, method, [side](int, double s) {
      return Tilt1D{closedform::uniform_log_laplace(s, side), closedform::uniform_log_laplace_d1(s, side),
                    closedform::uniform_log_laplace_d2(s, side)};
    });
  }
  if (model.separable()) {
    std::vector<Custom1D> comps(model.components().begin(), model.components().end());
    return std::make_unique<SeparableEvaluator>(
        n, method, [comps = std::move(comps)](int i, double s) { return comps[i].tilt(s); });
  }
  return std::make_unique<RadialEvaluator>(n, model.ball_marginal());
}

double log_laplace(const MeasureModel& model, const Eigen::VectorXd& xi, const LaplaceSettings& settings) {
  require_length(xi, model.dimension(), "log_laplace");
  return make_laplace_evaluator(model, settings)->evaluate(xi, LaplaceOrder::Value).value;
}

Eigen::VectorXd grad_log_laplace(const MeasureModel& model, const Eigen::VectorXd& xi,
                                 const LaplaceSettings& settings) {
  require_length(xi, model.dimension(), "grad_log_laplace");
  return make_laplace_evaluator(model, settings)->evaluate(xi, LaplaceOrder::Gradient).gradient;
}

Eigen::MatrixXd hess_log_laplace(const MeasureModel& model, const Eigen::VectorXd& xi,
                                 const LaplaceSettings& settings) {
  require_length(xi, model.dimension(), "hess_log_laplace");
  return make_laplace_evaluator(model, settings)->evaluate(xi, LaplaceOrder::Hessian).hessian;
}

// ---------------------------------------------------------------------------
// Tilted measures

TiltedMeasure::TiltedMeasure(MeasureModel base, Eigen::VectorXd xi, const LaplaceSettings& settings)
    : base_(std::move(base)), xi_(std::move(xi)), settings_(settings) {
  require_length(xi_, base_.dimension(), "TiltedMeasure");
  value_ = make_laplace_evaluator(base_, settings_)->evaluate(xi_, LaplaceOrder::Hessian);
}

double TiltedMeasure::log_density(const Eigen::VectorXd& z) const {
  return xi_.dot(z) - value_.value + cramerlab::log_density(base_, z);
}

Estimate TiltedMeasure::projected_variance(const Eigen::VectorXd& p) const {
  require_length(p, base_.dimension(), "projected_variance");
  if (resolve_method(base_, settings_.method) == LaplaceMethod::MonteCarlo) {
    const MonteCarloEvaluator mc(base_, settings_);
    return mc.projected_variance(xi_, p);
  }
  return {p.dot(value_.hessian * p), 0.0, 0.0, true};
}

Estimate TiltedMeasure::total_mass(std::size_t samples, RngStream stream) const {
  const PointMatrix z = sample(base_, samples, stream);
  const Eigen::ArrayXd w = ((z * xi_).array() - value_.value).exp();
  const double m = w.mean();
  const double se = std::sqrt((w - m).square().sum() / (w.size() - 1) / w.size());
  return {m, se, kZ95 * se, false};
}

// ---------------------------------------------------------------------------
// Legendre transform

namespace {

LegendreResult at_infinity(int n) {
  LegendreResult r;
  r.value = kInf;
  r.argmax_xi = Eigen::VectorXd::Zero(n);
  r.grad_norm = kInf;
  r.status = LegendreStatus::AtInfinity;
  return r;
}

struct ScalarSolve {
  double value = 0.0;
  double xi = 0.0;
  double grad = 0.0;
  int iterations = 0;
  LegendreStatus status = LegendreStatus::Converged;
  bool stopped_early = false;
};

// Maximizes x*s - Lambda(s) for a 1-D law by damped Newton with Armijo backtracking.
ScalarSolve newton_scalar(const std::function<Tilt1D(double)>& tilt, double x, double start, double tol,
                          const CramerOptions& opt, std::optional<double> stop_above) {
  ScalarSolve out;
  double s = start;
  Tilt1D t = tilt(s);
  if (!std::isfinite(t.log_laplace)) {
    // The moment guess left the domain of Lambda; zero is always inside it.
    s = 0.0;
    t = tilt(s);
  }
  double psi = x * s - t.log_laplace;
  int gradient_steps = 0;
  for (int k = 0;; ++k) {
    out.iterations = k;
    const double g = x - t.mean;
    out.xi = s;
    out.grad = std::abs(g);
    out.value = psi;
    if (stop_above && psi > *stop_above) {
      out.stopped_early = true;
      out.status = LegendreStatus::MaxIter;
      return out;
    }
    if (std::abs(g) <= tol) {
      out.status = LegendreStatus::Converged;
      return out;
    }
    if (std::abs(s) > opt.xi_infinity || psi > opt.value_infinity) {
      out.status = LegendreStatus::AtInfinity;
      return out;
    }
    if (k >= opt.max_iter) {
      out.status = LegendreStatus::MaxIter;
      return out;
    }
    double d;
    if (t.variance > 0.0 && std::isfinite(1.0 / t.variance)) {
      d = g / t.variance;
    } else {
      ++gradient_steps;
      d = g / gradient_steps;
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      const double trial = s + alpha * d;
      const Tilt1D tt = tilt(trial);
      const double trial_psi = x * trial - tt.log_laplace;
      // Near the optimum psi changes by less than its rounding error; a smaller
      // gradient then decides.
      const double noise = 8 * std::numeric_limits<double>::epsilon() * (std::abs(psi) + std::abs(x * trial));
      if (trial_psi >= psi + opt.armijo * alpha * g * d ||
          (trial_psi >= psi - noise && std::abs(x - tt.mean) < std::abs(g))) {
        s = trial;
        t = tt;
        psi = trial_psi;
        accepted = true;
        break;
      }
      alpha *= opt.backtrack;
    }
    if (!accepted) {
      // No ascent possible at double precision: the iterate is as good as it gets.
      out.status = std::abs(g) <= 1e3 * tol ? LegendreStatus::Converged : LegendreStatus::MaxIter;
      return out;
    }
  }
}

LegendreResult newton_joint(const LaplaceEvaluator& ev, const Eigen::VectorXd& x, const Eigen::VectorXd& start,
                            double tol, const CramerOptions& opt, std::optional<double> stop_above) {
  const int n = static_cast<int>(x.size());
  LegendreResult out;
  Eigen::VectorXd xi = start;
  LaplaceValue v = ev.evaluate(xi, LaplaceOrder::Hessian);
  if (!std::isfinite(v.value)) {
    xi.setZero();
    v = ev.evaluate(xi, LaplaceOrder::Hessian);
  }
  double psi = x.dot(xi) - v.value;
  int gradient_steps = 0;
  for (int k = 0;; ++k) {
    const Eigen::VectorXd g = x - v.gradient;
    out.iterations = k;
    out.argmax_xi = xi;
    out.grad_norm = g.norm();
    out.value = std::max(0.0, psi);
    if (stop_above && psi > *stop_above) {
      out.stopped_early = true;
      out.status = LegendreStatus::MaxIter;
      return out;
    }
    if (out.grad_norm <= tol) {
      out.status = LegendreStatus::Converged;
      return out;
    }
    if (xi.norm() > opt.xi_infinity || psi > opt.value_infinity) {
      LegendreResult inf = at_infinity(n);
      inf.iterations = k;
      inf.argmax_xi = xi;
      return inf;
    }
    if (k >= opt.max_iter) {
      out.status = LegendreStatus::MaxIter;
      return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v.hessian);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    const double lmin = lambda.minCoeff();
    const double lmax = lambda.maxCoeff();
    Eigen::VectorXd d;
    if (lmin > 0.0 && lmax / lmin <= opt.max_condition) {
      d = eig.eigenvectors() * ((eig.eigenvectors().transpose() * g).array() / lambda.array()).matrix();
    } else {
      ++gradient_steps;
      d = g / (std::max(lmax, 1e-300) * gradient_steps);
    }
    double alpha = 1.0;
    bool accepted = false;
    const double slope = g.dot(d);
    // Lambda is a log of a sum near 1 for small xi, so its rounding is absolute.
    const double noise =
        8 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(v.value) + std::abs(x.dot(xi)));
    if (slope <= noise) {
      // Near the optimum psi changes by less than its rounding error; a smaller gradient then decides.
      const Eigen::VectorXd trial = xi + d;
      LaplaceValue tv = ev.evaluate(trial, LaplaceOrder::Hessian);
      if ((x - tv.gradient).norm() < out.grad_norm) {
        xi = trial;
        v = std::move(tv);
        psi = x.dot(xi) - v.value;
        continue;
      }
      out.status = out.grad_norm <= 1e3 * tol ? LegendreStatus::Converged : LegendreStatus::MaxIter;
      return out;
    }
    for (int ls = 0; ls < 80; ++ls) {
      const Eigen::VectorXd trial = xi + alpha * d;
      const double trial_psi = x.dot(trial) - ev.evaluate(trial, LaplaceOrder::Value).value;
      if (trial_psi >= psi + opt.armijo * alpha * slope) {
        xi = trial;
        accepted = true;
        break;
      }
      alpha *= opt.backtrack;
    }
    if (!accepted) {
      out.status = out.grad_norm <= 1e3 * tol ? LegendreStatus::Converged : LegendreStatus::MaxIter;
      return out;
    }
    v = ev.evaluate(xi, LaplaceOrder::Hessian);
    psi = x.dot(xi) - v.value;
  }
}

LegendreResult from_scalar(const ScalarSolve& s, int n, const Eigen::VectorXd& direction) {
  if (s.status == LegendreStatus::AtInfinity) {
    LegendreResult r = at_infinity(n);
    r.iterations = s.iterations;
    return r;
  }
  LegendreResult r;
  r.value = std::max(0.0, s.value);
  r.argmax_xi = s.xi * direction;
  r.grad_norm = s.grad;
  r.iterations = s.iterations;
  r.status = s.status;
  r.stopped_early = s.stopped_early;
  return r;
}

}  // namespace

CramerTransform::CramerTransform(const MeasureModel& model, const CramerOptions& options)
    : model_(model), options_(options), evaluator_(make_laplace_evaluator(model, options.laplace)) {
  const bool deterministic = evaluator_->method() != LaplaceMethod::MonteCarlo;
  const bool automatic = options.strategy == CramerStrategy::Auto;
  gaussian_closed_ = automatic && deterministic && model.kind() == MeasureKind::StandardGaussian;
  separable_ = automatic && deterministic && model.separable();
  radial_ = automatic && deterministic && !model.separable() && model.kind() != MeasureKind::StandardGaussian;
}

CramerTransform::~CramerTransform() = default;
CramerTransform::CramerTransform(CramerTransform&&) noexcept = default;
CramerTransform& CramerTransform::operator=(CramerTransform&&) noexcept = default;

LegendreResult CramerTransform::operator()(const Eigen::VectorXd& x) const { return evaluate(x, options_.stop_above); }

LegendreResult CramerTransform::evaluate(const Eigen::VectorXd& x, std::optional<double> stop_above) const {
  const int n = model_.dimension();
  require_length(x, n, "cramer");
  if (!model_.in_interior(x)) return at_infinity(n);
  const double tol = options_.tol_grad_rel * (1.0 + x.norm());

  if (gaussian_closed_) {
    LegendreResult r;
    r.value = 0.5 * x.squaredNorm();
    r.argmax_xi = x;
    return r;
  }
  if (separable_) {
    const auto& sep = static_cast<const SeparableEvaluator&>(*evaluator_);
    const Eigen::VectorXd var = model_.marginal_variances();
    const double coord_tol = tol / std::sqrt(static_cast<double>(n));
    LegendreResult r;
    r.argmax_xi = Eigen::VectorXd::Zero(n);
    double grad2 = 0.0;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      std::optional<double> budget;
      if (stop_above) budget = *stop_above - total;
      const auto tilt = [&sep, i](double s) { return sep.coordinate(i, s); };
      const ScalarSolve s = newton_scalar(tilt, x[i], x[i] / var[i], coord_tol, options_, budget);
      if (s.status == LegendreStatus::AtInfinity) return at_infinity(n);
      r.iterations = std::max(r.iterations, s.iterations);
      r.argmax_xi[i] = s.xi;
      grad2 += s.grad * s.grad;
      total += std::max(0.0, s.value);
      if (s.status == LegendreStatus::MaxIter) r.status = LegendreStatus::MaxIter;
      if (s.stopped_early) {
        r.stopped_early = true;
        break;
      }
    }
    r.value = total;
    r.grad_norm = std::sqrt(grad2);
    return r;
  }
  if (radial_) {
    const auto& radial = static_cast<const RadialEvaluator&>(*evaluator_);
    const double norm = x.norm();
    const Eigen::VectorXd dir = norm > 0.0 ? Eigen::VectorXd(x / norm) : Eigen::VectorXd::Zero(n);
    const auto tilt = [&radial](double s) { return radial.marginal().tilt(s); };
    const ScalarSolve s = newton_scalar(tilt, norm, norm / radial.marginal().variance(), tol, options_, stop_above);
    return from_scalar(s, n, dir);
  }
  const Eigen::VectorXd start = x / model_.largest_marginal_variance();
  return newton_joint(*evaluator_, x, start, tol, options_, stop_above);
}

LegendreResult cramer(const MeasureModel& model, const Eigen::VectorXd& x, const CramerOptions& options) {
  return CramerTransform(model, options)(x);
}

LegendreResult cramer_1d(const Custom1D& law, double x, const CramerOptions& options) {
  if (!(x > law.lower() && x < law.upper())) return at_infinity(1);
  const double tol = options.tol_grad_rel * (1.0 + std::abs(x));
  const auto tilt = [&law](double s) { return law.tilt(s); };
  const ScalarSolve s = newton_scalar(tilt, x, x / law.variance(), tol, options, options.stop_above);
  return from_scalar(s, 1, Eigen::VectorXd::Ones(1));
}

SublevelVerdict in_sublevel(const CramerTransform& transform, const Eigen::VectorXd& x, double t,
                            double boundary_tol) {
  if (!(t > 0.0)) throw DomainError("in_sublevel: t must be positive");
  const double band = boundary_tol * std::max(1.0, t);
  const LegendreResult r = transform.evaluate(x, t + band);
  if (r.stopped_early || r.status == LegendreStatus::AtInfinity) return SublevelVerdict::Outside;
  if (std::abs(r.value - t) <= band) return SublevelVerdict::Boundary;
  return r.value < t ? SublevelVerdict::Inside : SublevelVerdict::Outside;
}

SublevelVerdict in_sublevel(const MeasureModel& model, const Eigen::VectorXd& x, double t,
                            const SublevelOptions& options) {
  return in_sublevel(CramerTransform(model, options.cramer), x, t, options.boundary_tol);
}

}  // namespace cramerlab
