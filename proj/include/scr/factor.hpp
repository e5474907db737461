#pragma once

#include "scr/matrix.hpp"

namespace scr {

struct FactorDecomposition {
  /// p x M
  Matrix loadings;
  /// n x M, observed (time-series model) or estimated per period (CBF)
  Matrix factors;
  /// M x M, n^-1 F^T F
  Matrix factor_cov;
  /// n x p
  Matrix residuals;
};

/// Time-series OLS of every asset on the observed factors (n x M):
/// B = Y^T F (F^T F)^-1. Throws NumericalError for rank-deficient F.
FactorDecomposition factor_loadings(const Matrix& returns, const Matrix& factors);

/// Cross-sectional OLS per period with known loadings X (p x M):
/// f_i = (X^T X)^-1 X^T y_i. Throws NumericalError for rank-deficient X.
FactorDecomposition cbf_factors(const Matrix& returns, const Matrix& loadings);

/// B Sigma_f B^T + Sigma_u
DenseSymMatrix composite_covariance(const FactorDecomposition& decomp, const DenseSymMatrix& residual_cov);

/// diag(n^-1 sum_i u_ij^2), the strict factor model residual covariance.
DenseSymMatrix residual_variances(const FactorDecomposition& decomp);

/// n^-1 sum_i (y_i - ybar)(y_i - ybar)^T
DenseSymMatrix sample_covariance(const Matrix& returns);

/// n^-1 sum_i y_i y_i^T
DenseSymMatrix second_moment(const Matrix& observations);

struct Shrinkage {
  DenseSymMatrix sigma;
  double rho = 0.0;
};

/**
 * rho (tr(S)/p) I + (1 - rho) S with the Ledoit-Wolf intensity
 *
 *   m = tr(S)/p,  d2 = ||S - m I||_F^2 / p,
 *   b2 = min(d2, n^-2 sum_i ||y_i y_i^T - S||_F^2 / p),  rho = b2 / d2,
 *
 * and rho = 0 when d2 = 0. `returns` should be centered the same way S was.
 */
Shrinkage lw_shrink(const DenseSymMatrix& sample_cov, const Matrix& returns);

/// Shrinkage toward tr(S)/p with a fixed intensity in [0, 1].
DenseSymMatrix shrink_to_identity(const DenseSymMatrix& s, double rho);

}  // namespace scr
