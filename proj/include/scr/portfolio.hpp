#pragma once

#include "scr/matrix.hpp"

#include <optional>
#include <span>
#include <vector>

namespace scr {

inline constexpr double kDefaultRepairEps = 1e-6;

/// Eigenvalues <= 0 are replaced by eps, eigenvectors kept. A positive
/// definite input is returned unchanged.
DenseSymMatrix pd_repair(const DenseSymMatrix& sigma, double eps = kDefaultRepairEps);

/// Sigma^-1 1 / (1^T Sigma^-1 1). Throws NumericalError if sigma is not
/// numerically positive definite.
Vector gmv_weights(const DenseSymMatrix& sigma);

struct PerformanceReport {
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator).
  double sd = 0.0;
  /// Unset when sd == 0.
  std::optional<double> sharpe;
  /// Intercept and slope of (r - rf) on (r_m - rf); unset when the
  /// benchmark has no variation.
  std::optional<double> alpha;
  std::optional<double> beta;
  /// Geometric mean growth per period over the supplied returns.
  double cqgr = 0.0;
  std::vector<double> period_returns;
};

/// Returns are the evaluation periods t = 2..T (the first period only
/// anchors the compounding). Throws std::invalid_argument for fewer than two
/// periods, length mismatch, or any return <= -1.
PerformanceReport performance(std::span<const double> portfolio_returns, std::span<const double> benchmark_returns,
                              double risk_free = 0.0);

}  // namespace scr
