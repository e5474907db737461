#pragma once

#include "scr/matrix.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace scr {

inline constexpr double kDefaultKernelBandwidth = 10.0;

/**
 * Thresholded Gaussian-kernel similarity of one covariate column.
 *
 * w_ij = exp(-bandwidth * (x_i - x_j)^2) is kept iff the squared distance is
 * strictly below the empirical `density` quantile tau of all p(p-1)/2 pair
 * distances. Ties at tau are dropped, so the realized fraction is the
 * largest one <= density that does not split a tie. Diagonal is zero.
 *
 * Throws std::invalid_argument for density outside (0, 1] or p < 2, and
 * DataError for a constant column when density < 1.
 */
SparseSymMatrix kernel_similarity(const Vector& x, double bandwidth = kDefaultKernelBandwidth,
                                  double density = 1.0);

/// x x^T / p as a rank-one matrix; the diagonal is retained.
SparseSymMatrix outerproduct_similarity(const Vector& x);

/// w_ij = 1 iff labels match and i != j.
SparseSymMatrix indicator_similarity(const std::vector<std::string>& labels);

/// w_ij = 1 on each listed unordered pair; duplicates collapse. Self-loops
/// and out-of-range indices throw std::invalid_argument.
SparseSymMatrix edge_similarity(const std::vector<std::pair<Index, Index>>& edges, Index p);

/// W / ||W||_1 (max absolute column sum). Throws for the zero matrix.
SparseSymMatrix rescale_l1(const SparseSymMatrix& w);

/// Each upper off-diagonal entry is independently 1 with `probability`,
/// drawn in row-major order from a stream seeded by `seed`.
SparseSymMatrix bernoulli_similarity(Index p, double probability, std::uint64_t seed);

/// w_ij = x_i x_j exp(-p (x_i - x_j)^2), i != j. Entries may be negative.
SparseSymMatrix correlated_similarity(const Vector& x);

}  // namespace scr
