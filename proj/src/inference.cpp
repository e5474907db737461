#include "scr/inference.hpp"

#include "scr/error.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace scr {

StandardizedPanel standardize(const Matrix& panel) {
  const Index n = panel.rows();
  if (n < 2) throw DataError("standardization needs at least two observations per subject");
  StandardizedPanel out;
  out.means = panel.colwise().mean().transpose();
  out.data = panel.rowwise() - out.means.transpose();
  out.sds = (out.data.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt().transpose();
  for (Index j = 0; j < panel.cols(); ++j) {
    if (!(out.sds[j] > 0.0)) throw DataError(fmt::format("column {} has zero variance", j));
    out.data.col(j) /= out.sds[j];
  }
  return out;
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> pd_eigen(const DenseSymMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma.matrix());
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const double lo = eig.eigenvalues().minCoeff();
  if (!(lo > 0.0)) throw NumericalError(fmt::format("covariance is not positive definite (min eigenvalue {:.6g})", lo));
  return eig;
}

}  // namespace

Matrix pd_sqrt(const DenseSymMatrix& sigma) {
  const auto eig = pd_eigen(sigma);
  const Matrix& v = eig.eigenvectors();
  return v * eig.eigenvalues().cwiseSqrt().asDiagonal() * v.transpose();
}

AsymptoticCovariance sandwich_covariance(const SimilarityBasis& basis_s, const DenseSymMatrix& sigma0, double mu4,
                                         Index n) {
  if (basis_s.size() == 0) throw std::invalid_argument("restricted basis is empty");
  if (basis_s.dim() != sigma0.dim()) {
    throw std::invalid_argument(
        fmt::format("basis dimension {} does not match covariance dimension {}", basis_s.dim(), sigma0.dim()));
  }
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const Index s = basis_s.size();
  const auto p = static_cast<double>(basis_s.dim());
  const Matrix root = pd_sqrt(sigma0);

  std::vector<Matrix> a(static_cast<std::size_t>(s));
  for (Index k = 0; k < s; ++k) {
    const Matrix w = basis_s[k].to_dense();
    a[static_cast<std::size_t>(k)] = root * w * root;
  }

  AsymptoticCovariance out;
  out.mu4 = mu4;
  out.g0.resize(s, s);
  out.g1.resize(s, s);
  out.h.resize(s, s);
  for (Index k = 0; k < s; ++k)
    for (Index l = k; l < s; ++l) {
      const Matrix& ak = a[static_cast<std::size_t>(k)];
      const Matrix& al = a[static_cast<std::size_t>(l)];
      out.g0(k, l) = out.g0(l, k) = trace_product(basis_s[k], basis_s[l]) / p;
      out.g1(k, l) = out.g1(l, k) = ak.cwiseProduct(al).sum() / p;
      out.h(k, l) = out.h(l, k) = ak.diagonal().dot(al.diagonal()) / p;
    }

  Eigen::LDLT<Matrix> g0(out.g0);
  if (g0.info() != Eigen::Success || !g0.isPositive() || g0.rcond() < 1e-12) {
    throw NumericalError("G0 is singular on the selected support");
  }
  const Matrix g0inv = g0.solve(Matrix::Identity(s, s));
  const Matrix middle = 2.0 * out.g1 + (mu4 - 3.0) * out.h;
  out.avar = g0inv * middle * g0inv / (p * static_cast<double>(n));
  out.avar = 0.5 * (out.avar + out.avar.transpose()).eval();
  return out;
}

double estimate_mu4(const Matrix& observations, const DenseSymMatrix& sigma) {
  if (observations.cols() != sigma.dim()) throw std::invalid_argument("observation width does not match covariance");
  if (observations.size() == 0) throw std::invalid_argument("no observations");
  const auto eig = pd_eigen(sigma);
  const Matrix& v = eig.eigenvectors();
  const Matrix inv_root = v * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  const Matrix z = observations * inv_root;
  return z.array().pow(4).mean();
}

}  // namespace scr
