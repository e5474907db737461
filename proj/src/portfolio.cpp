#include "scr/portfolio.hpp"

#include "scr/error.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace scr {

DenseSymMatrix pd_repair(const DenseSymMatrix& sigma, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("repair floor must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma.matrix());
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed during PD repair");
  if (eig.eigenvalues().minCoeff() > 0.0) return sigma;
  const Vector values = eig.eigenvalues().unaryExpr([eps](double v) { return v > 0.0 ? v : eps; });
  const Matrix& v = eig.eigenvectors();
  return DenseSymMatrix::symmetrized(v * values.asDiagonal() * v.transpose());
}

Vector gmv_weights(const DenseSymMatrix& sigma) {
  const Index p = sigma.dim();
  if (p == 0) throw std::invalid_argument("empty covariance");
  Eigen::LDLT<Matrix> ldlt(sigma.matrix());
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-15) {
    throw NumericalError("covariance is singular; GMV weights undefined");
  }
  const Vector x = ldlt.solve(Vector::Ones(p));
  const double total = x.sum();
  if (!(std::abs(total) > 0.0) || !x.allFinite()) throw NumericalError("GMV normalization failed");
  return x / total;
}

PerformanceReport performance(std::span<const double> portfolio_returns, std::span<const double> benchmark_returns,
                              double risk_free) {
  const std::size_t t = portfolio_returns.size();
  if (t < 2) throw std::invalid_argument("performance needs at least two periods");
  if (benchmark_returns.size() != t) throw std::invalid_argument("portfolio and benchmark lengths differ");
  for (std::size_t i = 0; i < t; ++i) {
    if (!(portfolio_returns[i] > -1.0) || !(benchmark_returns[i] > -1.0)) {
      throw std::invalid_argument(fmt::format("return at period {} is <= -1", i));
    }
  }
  const Eigen::Map<const Vector> r(portfolio_returns.data(), static_cast<Index>(t));
  const Eigen::Map<const Vector> rm(benchmark_returns.data(), static_cast<Index>(t));
  const auto td = static_cast<double>(t);

  PerformanceReport out;
  out.period_returns.assign(portfolio_returns.begin(), portfolio_returns.end());
  out.mean = r.mean();
  out.sd = std::sqrt((r.array() - out.mean).square().sum() / (td - 1.0));
  if (out.sd > 0.0) out.sharpe = (out.mean - risk_free) / out.sd;

  const Vector x = rm.array() - risk_free;
  const Vector y = r.array() - risk_free;
  const double sxx = (x.array() - x.mean()).square().sum();
  if (sxx > 0.0) {
    const double sxy = ((x.array() - x.mean()) * (y.array() - y.mean())).sum();
    out.beta = sxy / sxx;
    out.alpha = y.mean() - *out.beta * x.mean();
  }
  out.cqgr = std::expm1(r.array().log1p().mean());
  return out;
}

}  // namespace scr
