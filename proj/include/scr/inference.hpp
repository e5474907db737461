#pragma once

#include "scr/matrix.hpp"

namespace scr {

/// Columns centered and divided by their 1/n-denominator standard deviation.
struct StandardizedPanel {
  Matrix data;
  Vector means;
  Vector sds;
};

/// Throws DataError for n < 2 or a zero-variance column.
StandardizedPanel standardize(const Matrix& panel);

/// Symmetric square root via eigendecomposition. Throws NumericalError unless
/// every eigenvalue is strictly positive.
Matrix pd_sqrt(const DenseSymMatrix& sigma);

/**
 * Asymptotic covariance of the oracle estimator on the restricted basis:
 *
 *   avar = (n p)^-1 G0^-1 {2 G1 + (mu4 - 3) H} G0^-1
 *
 * with A_k = S^(1/2) W_k S^(1/2) and
 *   G0 = p^-1 {tr(W_k W_l)},  G1 = p^-1 {tr(A_k A_l)},
 *   H  = p^-1 {sum_j (A_k)_jj (A_l)_jj}.
 */
struct AsymptoticCovariance {
  Matrix g0;
  Matrix g1;
  Matrix h;
  double mu4 = 3.0;
  Matrix avar;

  Vector standard_errors() const { return avar.diagonal().cwiseMax(0.0).cwiseSqrt(); }
};

AsymptoticCovariance sandwich_covariance(const SimilarityBasis& basis_s, const DenseSymMatrix& sigma0,
                                         double mu4 = 3.0, Index n = 1);

/// Mean of z^4 over the whitened observations z = sigma^(-1/2) y.
double estimate_mu4(const Matrix& observations, const DenseSymMatrix& sigma);

}  // namespace scr
