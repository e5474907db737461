#include "scr/factor.hpp"

#include "scr/error.hpp"

#include <Eigen/QR>
#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

namespace scr {

namespace {

// Least squares with a rank check; solves design * coef = rhs column by column.
Matrix full_rank_solve(const Matrix& design, const Matrix& rhs, const char* what) {
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < design.cols()) {
    throw NumericalError(fmt::format("{} is rank deficient (rank {} < {})", what, qr.rank(), design.cols()));
  }
  return qr.solve(rhs);
}

}  // namespace

FactorDecomposition factor_loadings(const Matrix& returns, const Matrix& factors) {
  if (returns.rows() != factors.rows()) {
    throw std::invalid_argument(
        fmt::format("returns have {} periods but factors have {}", returns.rows(), factors.rows()));
  }
  if (factors.cols() < 1 || returns.rows() <= factors.cols()) {
    throw std::invalid_argument("factor regression needs n > M >= 1");
  }
  FactorDecomposition out;
  out.factors = factors;
  out.loadings = full_rank_solve(factors, returns, "factor matrix").transpose();
  out.residuals = returns - factors * out.loadings.transpose();
  out.factor_cov = factors.transpose() * factors / static_cast<double>(factors.rows());
  return out;
}

FactorDecomposition cbf_factors(const Matrix& returns, const Matrix& loadings) {
  if (returns.cols() != loadings.rows()) {
    throw std::invalid_argument(
        fmt::format("returns have {} assets but loadings have {} rows", returns.cols(), loadings.rows()));
  }
  if (loadings.cols() < 1 || loadings.rows() < loadings.cols()) {
    throw std::invalid_argument("cross-sectional regression needs p >= M >= 1");
  }
  FactorDecomposition out;
  out.loadings = loadings;
  out.factors = full_rank_solve(loadings, returns.transpose(), "loading matrix").transpose();
  out.residuals = returns - out.factors * loadings.transpose();
  out.factor_cov = out.factors.transpose() * out.factors / static_cast<double>(returns.rows());
  return out;
}

DenseSymMatrix composite_covariance(const FactorDecomposition& decomp, const DenseSymMatrix& residual_cov) {
  const Matrix& b = decomp.loadings;
  if (b.cols() != decomp.factor_cov.rows() || residual_cov.dim() != b.rows()) {
    throw std::invalid_argument("composite covariance dimensions do not conform");
  }
  return DenseSymMatrix::symmetrized(b * decomp.factor_cov * b.transpose() + residual_cov.matrix());
}

DenseSymMatrix residual_variances(const FactorDecomposition& decomp) {
  const Vector var = decomp.residuals.colwise().squaredNorm().transpose() / static_cast<double>(decomp.residuals.rows());
  return DenseSymMatrix(Matrix(var.asDiagonal()));
}

DenseSymMatrix sample_covariance(const Matrix& returns) {
  if (returns.rows() < 1) throw std::invalid_argument("sample covariance needs at least one row");
  const Matrix centered = returns.rowwise() - returns.colwise().mean();
  return second_moment(centered);
}

DenseSymMatrix second_moment(const Matrix& observations) {
  if (observations.rows() < 1) throw std::invalid_argument("second moment needs at least one row");
  return DenseSymMatrix::symmetrized(observations.transpose() * observations / static_cast<double>(observations.rows()));
}

DenseSymMatrix shrink_to_identity(const DenseSymMatrix& s, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument(fmt::format("shrinkage intensity {} outside [0, 1]", rho));
  const Index p = s.dim();
  const double mu = s.matrix().trace() / static_cast<double>(p);
  Matrix out = (1.0 - rho) * s.matrix();
  out.diagonal().array() += rho * mu;
  return DenseSymMatrix::symmetrized(out);
}

Shrinkage lw_shrink(const DenseSymMatrix& sample_cov, const Matrix& returns) {
  const Index p = sample_cov.dim();
  const Index n = returns.rows();
  if (n < 2) throw std::invalid_argument("Ledoit-Wolf shrinkage needs n >= 2");
  if (returns.cols() != p) throw std::invalid_argument("returns width does not match the covariance dimension");
  const auto pd = static_cast<double>(p);
  const Matrix& s = sample_cov.matrix();
  const double mu = s.trace() / pd;
  Matrix diff = s;
  diff.diagonal().array() -= mu;
  const double d2 = diff.squaredNorm() / pd;
  if (d2 == 0.0) return {sample_cov, 0.0};

  // ||y y^T - S||_F^2 = (y^T y)^2 - 2 y^T S y + ||S||_F^2
  const double s_norm2 = s.squaredNorm();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Vector y = returns.row(i).transpose();
    const double yy = y.squaredNorm();
    total += yy * yy - 2.0 * y.dot(s * y) + s_norm2;
  }
  const double b2_bar = std::max(total, 0.0) / (static_cast<double>(n) * static_cast<double>(n) * pd);
  const double rho = std::min(d2, b2_bar) / d2;
  return {shrink_to_identity(sample_cov, rho), rho};
}

}  // namespace scr
