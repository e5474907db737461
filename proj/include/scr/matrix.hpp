#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scr {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Triplet {
  Index row;
  Index col;
  double value;
};

/**
 * Symmetric p x p matrix in one of three storage variants:
 *
 *  - triplets: sorted, deduplicated upper-triangle entries (row <= col),
 *  - rank_one: c * x x^T,
 *  - identity: c * I_p.
 *
 * Only the upper triangle is stored, so the represented matrix is symmetric
 * by construction. Instances are immutable.
 */
class SparseSymMatrix {
 public:
  enum class Kind { triplets, rank_one, identity };

  /// Builds canonical triplet storage. Entries with row > col are mirrored,
  /// duplicates are summed, and entries that are (or sum to) zero are dropped.
  /// Throws std::invalid_argument on out-of-range indices, non-finite values,
  /// or a diagonal entry when `zero_diagonal` is set.
  static SparseSymMatrix from_triplets(std::span<const Triplet> entries, Index p,
                                       bool zero_diagonal = false);
  static SparseSymMatrix identity(Index p, double scale = 1.0);
  static SparseSymMatrix rank_one(Vector x, double scale = 1.0);
  static SparseSymMatrix zero(Index p);

  Index dim() const { return dim_; }
  Kind kind() const { return kind_; }

  /// Number of structurally nonzero entries of the full matrix; off-diagonal
  /// triplets count twice. Rank-one and identity report their dense count.
  Index nnz() const;

  std::span<const Triplet> entries() const { return entries_; }
  const Vector& factor() const { return factor_; }
  double scale() const { return scale_; }

  double operator()(Index i, Index j) const;
  double trace() const;
  bool has_zero_diagonal() const;

  /// Maximum absolute column sum, i.e. the induced l1 norm.
  double l1_norm() const;

  SparseSymMatrix scaled(double c) const;
  Matrix to_dense() const;

  /// y = A x
  Vector multiply(const Vector& x) const;

  /// out += c * A
  void add_to(Matrix& out, double c) const;

 private:
  SparseSymMatrix() = default;

  Index dim_ = 0;
  Kind kind_ = Kind::triplets;
  std::vector<Triplet> entries_;
  Vector factor_;
  double scale_ = 1.0;
};

/// tr(A B) = sum_ij A_ij B_ij, with fast paths per storage variant.
/// Exactly symmetric in its arguments.
double trace_product(const SparseSymMatrix& a, const SparseSymMatrix& b);

/// y^T A y
double quad_form(const SparseSymMatrix& a, std::span<const double> y);
double quad_form(const SparseSymMatrix& a, const Vector& y);

/**
 * Dense symmetric matrix. Construction verifies
 * max |M_ij - M_ji| <= 1e-12 * max(1, max |M|) and finiteness.
 */
class DenseSymMatrix {
 public:
  DenseSymMatrix() = default;
  explicit DenseSymMatrix(Matrix m);

  /// Averages m with its transpose; only squareness and finiteness are checked.
  static DenseSymMatrix symmetrized(const Matrix& m);

  Index dim() const { return data_.rows(); }
  const Matrix& matrix() const { return data_; }
  double operator()(Index i, Index j) const { return data_(i, j); }

 private:
  Matrix data_;
};

/// Ordered similarity matrices [W_0, ..., W_K] sharing one dimension.
/// W_0 must be the identity variant unless `identity_first` is false.
class SimilarityBasis {
 public:
  SimilarityBasis() = default;
  explicit SimilarityBasis(std::vector<SparseSymMatrix> matrices,
                           std::vector<std::string> names = {},
                           bool identity_first = true);

  Index dim() const { return dim_; }
  /// Number of coefficients, K + 1.
  Index size() const { return static_cast<Index>(matrices_.size()); }
  /// Number of non-intercept matrices K.
  Index num_similarity() const { return size() - 1; }

  const SparseSymMatrix& operator[](Index k) const { return matrices_[static_cast<std::size_t>(k)]; }
  const std::vector<SparseSymMatrix>& matrices() const { return matrices_; }
  const std::vector<std::string>& names() const { return names_; }

  /// Restriction to the given indices, in the given order.
  SimilarityBasis subset(std::span<const Index> indices) const;

 private:
  std::vector<SparseSymMatrix> matrices_;
  std::vector<std::string> names_;
  Index dim_ = 0;
};

/// Sigma(beta) = sum_k beta_k W_k
DenseSymMatrix densify(const SimilarityBasis& basis, const Vector& beta);

/// Reads a triplet file: one `i j value` per line, 0-based, `#` comments,
/// either triangle. Throws DataError on malformed lines.
SparseSymMatrix read_triplet_file(const std::string& path, Index p, bool zero_diagonal = false);

}  // namespace scr
