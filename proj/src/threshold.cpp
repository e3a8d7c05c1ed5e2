#include "cramerlab/threshold.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "cramerlab/errors.hpp"
#include "cramerlab/polytope.hpp"

namespace cramerlab {

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_number(std::string& out, std::size_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

double log_binomial(std::size_t N, std::size_t n) {
  if (n > N) return -std::numeric_limits<double>::infinity();
  const double a = static_cast<double>(N), b = static_cast<double>(n);
  return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1);
}

std::vector<double> bound_t_grid(double mean) {
  std::vector<double> t;
  for (int k = -5; k <= 5; ++k) t.push_back((1.0 + 0.1 * k) * mean);
  return t;
}

RowBounds row_bounds(std::span<const SublevelPoint> profile, std::size_t N, int n) {
  RowBounds b;
  b.lemma54 = std::numeric_limits<double>::infinity();
  b.lemma57 = 0.0;
  const double log_c = log_binomial(N, static_cast<std::size_t>(n));
  const double excess = static_cast<double>(N) - n;
  for (const auto& p : profile) {
    const double upper = p.measure.value + static_cast<double>(N) * std::exp(-p.t);
    if (upper < b.lemma54) {
      b.lemma54 = upper;
      b.lemma54_stderr = p.measure.std_error;
    }
    if (std::isnan(p.depth_floor) || !(p.depth_floor > 0.0)) continue;
    // 2 C(N, n) (1 - phi)^{N - n} in log space.
    const double log_miss = std::log(2.0) + log_c + excess * std::log1p(-std::min(p.depth_floor, 1.0));
    const double lower = std::clamp(p.measure.value * (1.0 - std::exp(log_miss)), 0.0, 1.0);
    if (lower > b.lemma57) {
      b.lemma57 = lower;
      b.lemma57_stderr = p.measure.std_error;
    }
  }
  b.lemma54 = std::min(b.lemma54, 1.0);
  return b;
}

SweepResult sweep(const MeasureModel& model, std::span<const double> rho_grid, const SweepBudget& budget,
                  RngStream stream) {
  const int n = model.dimension();
  SweepResult out;
  std::vector<double> rhos(rho_grid.begin(), rho_grid.end());
  std::sort(rhos.begin(), rhos.end());

  MomentBudget mb = budget.moments;
  mb.workers = budget.workers;
  out.cramer = cramer_moments(model, mb);
  const RatioEstimate beta = beta_parameter(model, mb);
  out.beta = beta.value;
  out.beta_ci = beta.ci;
  out.t_grid = bound_t_grid(out.cramer.mean);
  SublevelBudget sb = budget.sublevel;
  sb.workers = budget.workers;
  out.sublevel = sublevel_profile(model, out.t_grid, sb);

  // Distinct N in increasing order; several rho may round to the same N.
  std::vector<std::size_t> sizes;
  std::vector<std::pair<double, std::size_t>> kept;
  for (double rho : rhos) {
    const double logN = rho * n;
    const double Nd = std::round(std::exp(logN));
    if (!(rho > 0.0) || !std::isfinite(Nd)) {
      out.skipped.push_back({rho, 0, "rho must be positive and finite"});
      continue;
    }
    if (Nd > static_cast<double>(budget.n_max)) {
      std::ostringstream os;
      os << "N = " << Nd << " exceeds N_max = " << budget.n_max;
      out.skipped.push_back({rho, static_cast<std::size_t>(std::min(Nd, 1e18)), os.str()});
      continue;
    }
    const auto N = static_cast<std::size_t>(Nd);
    if (N < static_cast<std::size_t>(n) + 1) {
      out.skipped.push_back({rho, N, "N < n + 1: the hull has no interior"});
      continue;
    }
    kept.emplace_back(rho, N);
    if (sizes.empty() || sizes.back() != N) sizes.push_back(N);
  }
  if (sizes.empty()) return out;

  const auto estimates =
      estimate_measure_nested(model, sizes, budget.trials, budget.test_points, stream, budget.workers);
  for (const auto& [rho, N] : kept) {
    const auto it = std::lower_bound(sizes.begin(), sizes.end(), N);
    const MeasureEstimate& e = estimates[static_cast<std::size_t>(it - sizes.begin())];
    const RowBounds b = row_bounds(out.sublevel, N, n);
    out.rows.push_back({n, rho, N, e.value, e.std_error, b.lemma54, b.lemma57});
    out.lemma54_stderr.push_back(b.lemma54_stderr);
    out.lemma57_stderr.push_back(b.lemma57_stderr);
  }
  return out;
}

double locate_threshold(std::span<const SweepRow> rows, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("locate_threshold: level must lie in (0, 1)");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].rho < rows[i - 1].rho) throw DomainError("locate_threshold: rows must be sorted by rho");
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double a = rows[i].estimate - level;
    const double b = rows[i + 1].estimate - level;
    if (a == 0.0) return rows[i].rho;
    if ((a < 0.0) != (b < 0.0) || b == 0.0) {
      const double w = a / (a - b);
      return rows[i].rho + w * (rows[i + 1].rho - rows[i].rho);
    }
  }
  std::ostringstream os;
  os << "locate_threshold: no pair of rows straddles " << level;
  if (rows.empty()) {
    os << " (no rows)";
  } else if (rows.back().estimate < level) {
    os << "; every estimate is below it, extend the grid above rho = " << rows.back().rho;
  } else {
    os << "; every estimate is above it, extend the grid below rho = " << rows.front().rho;
  }
  throw OutOfRangeError(os.str());
}

std::vector<double> default_rho_grid(double mean_over_n, double beta, int n, std::size_t points, std::size_t n_max,
                                     double delta) {
  if (points < 2) throw DomainError("default_rho_grid: need at least two points");
  const double half = 3.0 * std::sqrt(8.0 * beta / delta) * mean_over_n;
  const double lo_limit = std::log(static_cast<double>(n + 1)) / n;
  const double hi_limit = std::log(static_cast<double>(n_max)) / n;
  const double lo = std::clamp(mean_over_n - half, lo_limit, hi_limit);
  const double hi = std::clamp(mean_over_n + half, lo_limit, hi_limit);
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "n,rho,N,estimate,stderr,lemma54_bound,lemma57_bound\n";
  for (const auto& r : rows) {
    append_number(out, static_cast<std::size_t>(r.n));
    out += ',';
    append_number(out, r.rho);
    out += ',';
    append_number(out, r.N);
    out += ',';
    append_number(out, r.estimate);
    out += ',';
    append_number(out, r.stderr_);
    out += ',';
    append_number(out, r.lemma54_bound);
    out += ',';
    append_number(out, r.lemma57_bound);
    out += '\n';
  }
  return out;
}

}  // namespace cramerlab
