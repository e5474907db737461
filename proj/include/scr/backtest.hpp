#pragma once

#include "scr/matrix.hpp"
#include "scr/portfolio.hpp"
#include "scr/tuning.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace scr {

/// Covariance estimator fitted on a window of returns (rows = periods).
/// `first_row` is the index of the window's first row in the full panel.
using CovarianceEstimator = std::function<DenseSymMatrix(const Matrix& window, Index first_row)>;

struct BacktestInputs {
  /// T x p
  Matrix returns;
  /// T x M observed factors; CAPM uses column 0, FF3 columns 0..2.
  std::optional<Matrix> factors;
  /// p x M known loadings (e.g. standardized firm characteristics) for CBF.
  std::optional<Matrix> characteristics;
  /// Similarity basis for the SCR-based methods.
  std::optional<SimilarityBasis> basis;
  /// Length p; value weights for the benchmark when present.
  std::optional<Vector> market_caps;
};

struct ScrSettings {
  PenaltySpec penalty = PenaltySpec::scad(1.0);
  TuningOptions tuning = [] {
    TuningOptions t;
    t.solver.scaling = PenaltyScaling::per_entry;
    return t;
  }();
  /// Standardize each window before fitting (requires >= 2 rows) and map
  /// the fit back with diag(sd).
  bool standardize = true;
};

/// Fit SCR on the rows of `window` with BIC-tuned lambda and return Sigma(beta).
DenseSymMatrix scr_covariance(const SimilarityBasis& basis, const Matrix& window, const ScrSettings& settings);

/// Same pipeline with the unpenalized least-squares coefficients.
DenseSymMatrix ols_covariance(const SimilarityBasis& basis, const Matrix& window, bool standardize);

/// Method names: identity, sample, lw, capm, ff3, cbf, ols, scr,
/// capm+scr, ff3+scr, cbf+scr, lw+scr. Throws std::invalid_argument for an
/// unknown name or missing inputs.
CovarianceEstimator make_estimator(const std::string& method, const BacktestInputs& inputs,
                                   const ScrSettings& settings);

const std::vector<std::string>& known_methods();

struct BacktestOptions {
  Index window = 60;
  double risk_free = 0.0;
  double repair_eps = kDefaultRepairEps;
};

struct MethodReport {
  std::string method;
  PerformanceReport report;
};

struct BacktestResult {
  /// Row index in the panel of each out-of-sample period.
  std::vector<Index> periods;
  std::vector<double> benchmark_returns;
  /// The benchmark itself first, under the name "market".
  std::vector<MethodReport> methods;
};

/// For t = window .. T-1: fit on rows [t - window, t), repair, form GMV
/// weights and realize w^T y_t. Estimator failures are rethrown with the
/// failing window index prefixed.
std::vector<double> rolling_returns(const Matrix& returns, const CovarianceEstimator& estimator,
                                    const BacktestOptions& options);

BacktestResult rolling_backtest(const BacktestInputs& inputs, const std::vector<std::string>& methods,
                                const ScrSettings& settings, const BacktestOptions& options);

}  // namespace scr
