#pragma once

#include "scr/matrix.hpp"

// Data-parallel kernels behind Gram assembly. Each parallel kernel has a
// serial reference in scr::kernels::serial. Parallelism is only over
// independent outputs, so both produce bit-identical results.

namespace scr::kernels {

/// {tr(W_k W_l)}, (K+1) x (K+1)
Matrix gram_matrix(const SimilarityBasis& basis);

/// {n^-1 sum_i y_i^T W_k y_i}, with observations stored n x p (one row per replicate)
Vector moment_vector(const SimilarityBasis& basis, const Matrix& observations);

/// n^-1 sum_i (y_i^T y_i)^2
double squared_norm_moment(const Matrix& observations);

namespace serial {

Matrix gram_matrix(const SimilarityBasis& basis);
Vector moment_vector(const SimilarityBasis& basis, const Matrix& observations);

}  // namespace serial

}  // namespace scr::kernels
