#include "scr/kernels.hpp"

#include <fmt/format.h>

#include <stdexcept>
#include <utility>
#include <vector>

namespace scr::kernels {

namespace {

void check_observations(const SimilarityBasis& basis, const Matrix& observations) {
  if (observations.rows() < 1) throw std::invalid_argument("at least one observation is required");
  if (observations.cols() != basis.dim()) {
    throw std::invalid_argument(fmt::format("observation width {} does not match basis dimension {}",
                                            observations.cols(), basis.dim()));
  }
}

double mean_quad_form(const SparseSymMatrix& w, const Matrix& columns) {
  // columns is p x n, so each replicate is contiguous.
  const auto p = static_cast<std::size_t>(columns.rows());
  double sum = 0.0;
  for (Index i = 0; i < columns.cols(); ++i) {
    sum += quad_form(w, std::span<const double>(columns.col(i).data(), p));
  }
  return sum / static_cast<double>(columns.cols());
}

std::vector<std::pair<Index, Index>> upper_pairs(Index m) {
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(m * (m + 1) / 2));
  for (Index k = 0; k < m; ++k)
    for (Index l = k; l < m; ++l) pairs.emplace_back(k, l);
  return pairs;
}

}  // namespace

Matrix gram_matrix(const SimilarityBasis& basis) {
  const Index m = basis.size();
  const auto pairs = upper_pairs(m);
  Matrix gram(m, m);
  const auto npairs = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t idx = 0; idx < npairs; ++idx) {
    const auto [k, l] = pairs[static_cast<std::size_t>(idx)];
    const double v = trace_product(basis[k], basis[l]);
    gram(k, l) = v;
    gram(l, k) = v;
  }
  return gram;
}

Vector moment_vector(const SimilarityBasis& basis, const Matrix& observations) {
  check_observations(basis, observations);
  const Matrix columns = observations.transpose();
  const Index m = basis.size();
  Vector moments(m);
#pragma omp parallel for schedule(dynamic, 1)
  for (Index k = 0; k < m; ++k) moments[k] = mean_quad_form(basis[k], columns);
  return moments;
}

double squared_norm_moment(const Matrix& observations) {
  if (observations.rows() < 1) throw std::invalid_argument("at least one observation is required");
  double sum = 0.0;
  for (Index i = 0; i < observations.rows(); ++i) {
    const double s = observations.row(i).squaredNorm();
    sum += s * s;
  }
  return sum / static_cast<double>(observations.rows());
}

namespace serial {

Matrix gram_matrix(const SimilarityBasis& basis) {
  const Index m = basis.size();
  Matrix gram(m, m);
  for (Index k = 0; k < m; ++k) {
    for (Index l = k; l < m; ++l) {
      const double v = trace_product(basis[k], basis[l]);
      gram(k, l) = v;
      gram(l, k) = v;
    }
  }
  return gram;
}

Vector moment_vector(const SimilarityBasis& basis, const Matrix& observations) {
  check_observations(basis, observations);
  const Matrix columns = observations.transpose();
  Vector moments(basis.size());
  for (Index k = 0; k < basis.size(); ++k) moments[k] = mean_quad_form(basis[k], columns);
  return moments;
}

}  // namespace serial

}  // namespace scr::kernels
