#pragma once

#include "scr/solver.hpp"

#include <span>
#include <vector>

namespace scr {

struct TuningOptions {
  int n_lambda = 50;
  double lambda_min_ratio = 1e-3;
  /// Initialize each grid point's lasso at the previous (larger) lambda's
  /// lasso. When off, grid points are independent and run in parallel.
  bool warm_start = true;
  SolverOptions solver;
};

struct TuningResult {
  /// Descending.
  std::vector<double> lambda_grid;
  /// BIC per grid point; NaN where the fit failed.
  std::vector<double> scores;
  std::vector<Index> df;
  std::vector<double> rss;
  double best_lambda = 0.0;
  FitResult best_fit;
  Index failures = 0;
};

/**
 * BIC(lambda) = log(rss) + log(log(K + 1)) * log(p^2) / p^2 * df.
 *
 * `n` is accepted for the repeated-observation case where rss is the
 * n-averaged residual; the penalty factor is left unscaled by n.
 */
double bic_score(double rss_value, Index p, Index K, Index df, Index n = 1);

/// Smallest lambda at which every penalized coefficient stays zero at the
/// first coordinate-descent step (after fitting the intercept when it is
/// unpenalized).
double lambda_max(const GramSystem& system, bool unpenalized_intercept = true);

/// `count` log-spaced values from hi down to hi * min_ratio.
std::vector<double> log_grid(double hi, double min_ratio, int count);

std::vector<double> default_lambda_grid(const GramSystem& system, const TuningOptions& options = {});

/**
 * For each lambda (largest first): lasso at lambda, then LLA with `family`
 * at the same lambda started from that lasso fit, scored by BIC with
 * df = |support|. Ties go to the larger lambda. Throws NumericalError when
 * every grid point fails.
 */
TuningResult select_lambda(const GramSystem& system, const PenaltySpec& family, std::span<const double> grid,
                           const TuningOptions& options = {});

}  // namespace scr
