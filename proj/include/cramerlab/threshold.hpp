#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cramerlab/analysis.hpp"
#include "cramerlab/measures.hpp"

namespace cramerlab {

/// One (n, N) cell of a sweep.
struct SweepRow {
  int n = 0;
  double rho = 0.0;  // ln N / n
  std::size_t N = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  /// min over the t-grid of mu(B_t) + N e^{-t}.
  double lemma54_bound = 0.0;
  /// max over the t-grid of mu(B_t) (1 - 2 C(N,n) (1 - phi_min)^{N-n}), clamped to [0, 1].
  double lemma57_bound = 0.0;
};

struct SkippedRow {
  double rho = 0.0;
  std::size_t N = 0;
  std::string reason;
};

struct SweepBudget {
  std::size_t n_max = 1'000'000;
  std::size_t trials = 64;
  std::size_t test_points = 4096;
  MomentBudget moments;
  SublevelBudget sublevel;
  int workers = 1;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by rho
  std::vector<SkippedRow> skipped;
  MomentReport cramer;         // E Lambda* and friends
  double beta = 0.0;
  double beta_ci = 0.0;
  std::vector<double> t_grid;
  std::vector<SublevelPoint> sublevel;
  /// Standard error of mu(B_t) at the t that attains each row's bound.
  std::vector<double> lemma54_stderr;
  std::vector<double> lemma57_stderr;
};

/// Sweeps rho over the grid; every row shares one nested polytope sample per trial.
SweepResult sweep(const MeasureModel& model, std::span<const double> rho_grid, const SweepBudget& budget,
                  RngStream stream);

/// {(1 + e) m : e in {-0.5, -0.4, ..., 0.5}}.
std::vector<double> bound_t_grid(double mean);

/// Lemma bounds for one N from a sublevel profile; also returns the stderr at the optimizing t.
struct RowBounds {
  double lemma54 = 0.0;
  double lemma54_stderr = 0.0;
  double lemma57 = 0.0;
  double lemma57_stderr = 0.0;
};
RowBounds row_bounds(std::span<const SublevelPoint> profile, std::size_t N, int n);

/// ln C(N, n).
double log_binomial(std::size_t N, std::size_t n);

/// rho where the estimates first cross `level` (linear interpolation).  Throws
/// OutOfRangeError with a bracketing hint when no pair of rows straddles it.
double locate_threshold(std::span<const SweepRow> rows, double level);

/// Grid of `points` values centred on mean_over_n with half-width 3 sqrt(8 beta / delta) mean_over_n,
/// clipped to rho > 0 and to N <= n_max.
std::vector<double> default_rho_grid(double mean_over_n, double beta, int n, std::size_t points,
                                     std::size_t n_max = 1'000'000, double delta = 0.5);

/// Header plus one line per row, fields in declaration order.
std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace cramerlab
