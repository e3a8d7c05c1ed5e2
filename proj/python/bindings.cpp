#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "app.hpp"
#include "cramerlab/analysis.hpp"
#include "cramerlab/closedform.hpp"
#include "cramerlab/depth.hpp"
#include "cramerlab/errors.hpp"
#include "cramerlab/polytope.hpp"
#include "cramerlab/threshold.hpp"
#include "cramerlab/transform.hpp"

namespace py = pybind11;
using namespace cramerlab;

namespace {

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["std_error"] = e.std_error;
  d["ci"] = e.ci;
  d["exact"] = e.exact;
  return d;
}

py::dict moments_dict(const MomentReport& r) {
  py::dict d;
  d["mean"] = r.mean;
  d["second_moment"] = r.second_moment;
  d["variance"] = r.variance;
  d["exp_half_moment"] = r.exp_half_moment;
  d["mean_ci"] = r.ci.mean;
  d["variance_ci"] = r.ci.variance;
  d["sample_count"] = r.sample_count;
  d["exact"] = r.exact;
  d["censored"] = r.censored;
  d["path"] = r.path;
  return d;
}

MomentBudget budget(std::size_t samples, std::uint64_t seed, bool monte_carlo, int workers) {
  MomentBudget b;
  b.samples = samples;
  b.stream = {seed, 0};
  b.path = monte_carlo ? MomentPath::MonteCarlo : MomentPath::Auto;
  b.workers = workers;
  return b;
}

}  // namespace

PYBIND11_MODULE(_cramerlab, m) {
  m.doc() = "Cramer transform, half-space depth and random polytope estimators";
  m.attr("__version__") = CRAMERLAB_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PrecisionError>(m, "PrecisionError", PyExc_ArithmeticError);
  py::register_exception<EstimatorDegenerate>(m, "EstimatorDegenerate", PyExc_RuntimeError);
  py::register_exception<SampleSizeError>(m, "SampleSizeError", PyExc_RuntimeError);
  py::register_exception<OutOfRangeError>(m, "OutOfRangeError", PyExc_LookupError);

  py::class_<Custom1D>(m, "Law1D")
      .def_static("uniform", &Custom1D::uniform, py::arg("half_width") = 0.5)
      .def_static("laplace", &Custom1D::laplace, py::arg("scale") = 1.0)
      .def_static("centered_exponential", &Custom1D::centered_exponential, py::arg("rate") = 1.0)
      .def_static("gaussian", &Custom1D::gaussian, py::arg("sigma") = 1.0)
      .def_static("logistic", &Custom1D::logistic, py::arg("scale") = 1.0)
      .def_static("ball_marginal", &Custom1D::ball_marginal, py::arg("n"), py::arg("radius") = 1.0)
      .def_property_readonly("name", &Custom1D::name)
      .def_property_readonly("lower", &Custom1D::lower)
      .def_property_readonly("upper", &Custom1D::upper)
      .def("cdf", &Custom1D::cdf)
      .def("sf", &Custom1D::sf)
      .def("log_pdf", &Custom1D::log_pdf)
      .def("log_laplace", [](const Custom1D& law, double s) { return law.tilt(s).log_laplace; })
      .def("variance", &Custom1D::variance)
      .def("__repr__", [](const Custom1D& law) { return "<Law1D " + law.name() + ">"; });

  py::class_<MeasureModel>(m, "Model")
      .def_static("gaussian", &MeasureModel::standard_gaussian, py::arg("n"))
      .def_static("cube", &MeasureModel::uniform_cube, py::arg("n"), py::arg("side") = 1.0)
      .def_static("ball", &MeasureModel::uniform_ball, py::arg("n"), py::arg("radius") = 1.0)
      .def_static("ball_vol1", &MeasureModel::uniform_ball_vol1, py::arg("n"))
      .def_static("product", &MeasureModel::product, py::arg("laws"))
      .def_static("custom1d", &MeasureModel::custom1d, py::arg("law"))
      .def_property_readonly("dimension", &MeasureModel::dimension)
      .def_property_readonly("kind", [](const MeasureModel& mm) { return std::string(to_string(mm.kind())); })
      .def("describe", &MeasureModel::describe)
      .def("__repr__", [](const MeasureModel& mm) { return "<Model " + mm.describe() + ">"; });

  m.def(
      "sample",
      [](const MeasureModel& model, std::size_t count, std::uint64_t seed, int workers) {
        return sample(model, count, {seed, 0}, workers);
      },
      py::arg("model"), py::arg("count"), py::arg("seed") = 1, py::arg("workers") = 1);

  m.def(
      "log_laplace", [](const MeasureModel& model, const Eigen::VectorXd& xi) { return log_laplace(model, xi); },
      py::arg("model"), py::arg("xi"));

  m.def(
      "cramer",
      [](const MeasureModel& model, const Eigen::VectorXd& x) {
        const LegendreResult r = cramer(model, x);
        py::dict d;
        d["value"] = r.value;
        d["argmax_xi"] = r.argmax_xi;
        d["grad_norm"] = r.grad_norm;
        d["iterations"] = r.iterations;
        d["status"] = to_string(r.status);
        return d;
      },
      py::arg("model"), py::arg("x"), "Lambda*(x) with the maximizing xi and the solver status.");

  m.def(
      "depth",
      [](const MeasureModel& model, const Eigen::VectorXd& x, std::size_t tail_samples, std::uint64_t seed) {
        DepthOptions o;
        o.tail.samples = tail_samples;
        o.tail.stream = {seed, 1};
        o.seed = seed;
        const DepthResult r = depth(model, x, o);
        py::dict d;
        d["phi"] = r.phi;
        d["ci"] = r.ci;
        d["omega"] = r.log_depth_omega;
        d["direction"] = r.direction;
        d["method"] = to_string(r.method);
        return d;
      },
      py::arg("model"), py::arg("x"), py::arg("tail_samples") = 100000, py::arg("seed") = 1);

  m.def(
      "contains",
      [](const PointMatrix& points, const Eigen::VectorXd& x) {
        return contains_lp(points, x).verdict == Membership::Inside;
      },
      py::arg("points"), py::arg("x"), "True when x lies in the convex hull of the rows of points.");

  m.def(
      "cramer_moments",
      [](const MeasureModel& model, std::size_t samples, std::uint64_t seed, bool monte_carlo, int workers) {
        return moments_dict(cramer_moments(model, budget(samples, seed, monte_carlo, workers)));
      },
      py::arg("model"), py::arg("samples") = 100000, py::arg("seed") = 1, py::arg("monte_carlo") = false,
      py::arg("workers") = 1);

  m.def(
      "beta",
      [](const MeasureModel& model, std::size_t samples, std::uint64_t seed, bool monte_carlo, int workers) {
        const RatioEstimate r = beta_parameter(model, budget(samples, seed, monte_carlo, workers));
        py::dict d;
        d["value"] = r.value;
        d["std_error"] = r.std_error;
        d["ci"] = r.ci;
        d["exact"] = r.exact;
        d["moments"] = moments_dict(r.moments);
        return d;
      },
      py::arg("model"), py::arg("samples") = 100000, py::arg("seed") = 1, py::arg("monte_carlo") = false,
      py::arg("workers") = 1);

  m.def("exp_half_moment_1d", &exp_half_moment_1d, py::arg("law"));

  m.def(
      "estimate_measure",
      [](const MeasureModel& model, std::size_t N, std::size_t trials, std::size_t test_points, std::uint64_t seed,
         int workers) {
        const MeasureEstimate e = estimate_measure(model, N, trials, test_points, {seed, 0}, workers);
        py::dict d;
        d["N"] = e.N;
        d["value"] = e.value;
        d["std_error"] = e.std_error;
        d["ci"] = e.ci;
        d["per_trial"] = e.per_trial;
        return d;
      },
      py::arg("model"), py::arg("N"), py::arg("trials") = 64, py::arg("test_points") = 4096, py::arg("seed") = 1,
      py::arg("workers") = 1);

  m.def(
      "sweep",
      [](const MeasureModel& model, const std::vector<double>& rho_grid, std::size_t trials, std::size_t test_points,
         std::uint64_t seed, int workers) {
        SweepBudget b;
        b.trials = trials;
        b.test_points = test_points;
        b.workers = workers;
        const SweepResult r = sweep(model, rho_grid, b, {seed, 0});
        py::list rows;
        for (const auto& row : r.rows) {
          py::dict d;
          d["n"] = row.n;
          d["rho"] = row.rho;
          d["N"] = row.N;
          d["estimate"] = row.estimate;
          d["stderr"] = row.stderr_;
          d["lemma54_bound"] = row.lemma54_bound;
          d["lemma57_bound"] = row.lemma57_bound;
          rows.append(d);
        }
        return rows;
      },
      py::arg("model"), py::arg("rho_grid"), py::arg("trials") = 64, py::arg("test_points") = 4096,
      py::arg("seed") = 1, py::arg("workers") = 1, "One row per grid value with the estimate and both bounds.");

  m.def(
      "locate_threshold",
      [](const std::vector<std::pair<double, double>>& rho_estimate, double level) {
        std::vector<SweepRow> rows;
        for (const auto& [rho, est] : rho_estimate) {
          SweepRow r;
          r.rho = rho;
          r.estimate = est;
          rows.push_back(r);
        }
        return locate_threshold(rows, level);
      },
      py::arg("rho_estimate"), py::arg("level") = 0.5);

  m.def(
      "log_integral_moments",
      [](int n) {
        const auto r = closedform::log_integral_moments(n);
        return std::make_pair(r.first, r.second);
      },
      py::arg("n"));

  m.def(
      "run_command",
      [](const std::string& command, const std::string& config_json) {
        const app::Json raw = config_json.empty() ? app::Json::object() : app::Json::parse(config_json);
        const app::RunResult r = app::run(command, app::resolve_config(command, raw));
        py::dict artifacts;
        for (const auto& a : r.artifacts) artifacts[py::str(a.name)] = a.content;
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["artifacts"] = artifacts;
        d["summary"] = r.summary;
        return d;
      },
      py::arg("command"), py::arg("config_json") = "",
      "Runs a CLI subcommand in process and returns its artifacts as strings.");
}
