#include "scr/matrix.hpp"

#include "scr/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace scr {

namespace {

bool key_less(const Triplet& a, const Triplet& b) {
  return a.row < b.row || (a.row == b.row && a.col < b.col);
}

bool same_key(const Triplet& a, const Triplet& b) { return a.row == b.row && a.col == b.col; }

double triplet_trace_product(std::span<const Triplet> a, std::span<const Triplet> b) {
  // Sorted-merge over upper-triangle keys; off-diagonal matches count twice.
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (key_less(a[i], b[j])) {
      ++i;
    } else if (key_less(b[j], a[i])) {
      ++j;
    } else {
      const double prod = a[i].value * b[j].value;
      sum += a[i].row == a[i].col ? prod : 2.0 * prod;
      ++i;
      ++j;
    }
  }
  return sum;
}

double triplet_quad_form(std::span<const Triplet> entries, std::span<const double> y) {
  double sum = 0.0;
  for (const auto& t : entries) {
    const auto i = static_cast<std::size_t>(t.row);
    const auto j = static_cast<std::size_t>(t.col);
    sum += t.row == t.col ? t.value * y[i] * y[i] : 2.0 * t.value * y[i] * y[j];
  }
  return sum;
}

}  // namespace

SparseSymMatrix SparseSymMatrix::from_triplets(std::span<const Triplet> entries, Index p,
                                               bool zero_diagonal) {
  if (p <= 0) throw std::invalid_argument("matrix dimension must be positive");
  std::vector<Triplet> upper;
  upper.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.row < 0 || e.col < 0 || e.row >= p || e.col >= p) {
      throw std::invalid_argument(
          fmt::format("triplet index ({}, {}) out of range for p = {}", e.row, e.col, p));
    }
    if (!std::isfinite(e.value)) {
      throw std::invalid_argument(fmt::format("non-finite value at ({}, {})", e.row, e.col));
    }
    if (zero_diagonal && e.row == e.col) {
      throw std::invalid_argument(fmt::format("diagonal entry ({}, {}) under zero_diagonal", e.row, e.col));
    }
    upper.push_back(e.row <= e.col ? e : Triplet{e.col, e.row, e.value});
  }
  std::stable_sort(upper.begin(), upper.end(), key_less);

  SparseSymMatrix m;
  m.dim_ = p;
  m.kind_ = Kind::triplets;
  m.entries_.reserve(upper.size());
  for (std::size_t i = 0; i < upper.size();) {
    Triplet merged = upper[i];
    std::size_t j = i + 1;
    for (; j < upper.size() && same_key(upper[j], merged); ++j) merged.value += upper[j].value;
    if (merged.value != 0.0) m.entries_.push_back(merged);
    i = j;
  }
  return m;
}

SparseSymMatrix SparseSymMatrix::identity(Index p, double scale) {
  if (p <= 0) throw std::invalid_argument("matrix dimension must be positive");
  if (!std::isfinite(scale)) throw std::invalid_argument("non-finite identity scale");
  SparseSymMatrix m;
  m.dim_ = p;
  m.kind_ = Kind::identity;
  m.scale_ = scale;
  return m;
}

SparseSymMatrix SparseSymMatrix::rank_one(Vector x, double scale) {
  if (x.size() <= 0) throw std::invalid_argument("matrix dimension must be positive");
  if (!x.allFinite() || !std::isfinite(scale)) throw std::invalid_argument("non-finite rank-one factor");
  SparseSymMatrix m;
  m.dim_ = x.size();
  m.kind_ = Kind::rank_one;
  m.factor_ = std::move(x);
  m.scale_ = scale;
  return m;
}

SparseSymMatrix SparseSymMatrix::zero(Index p) { return from_triplets({}, p); }

Index SparseSymMatrix::nnz() const {
  switch (kind_) {
    case Kind::identity:
      return scale_ != 0.0 ? dim_ : 0;
    case Kind::rank_one: {
      if (scale_ == 0.0) return 0;
      const Index nz = (factor_.array() != 0.0).count();
      return nz * nz;
    }
    case Kind::triplets:
      break;
  }
  Index count = 0;
  for (const auto& t : entries_) count += t.row == t.col ? 1 : 2;
  return count;
}

double SparseSymMatrix::operator()(Index i, Index j) const {
  switch (kind_) {
    case Kind::identity:
      return i == j ? scale_ : 0.0;
    case Kind::rank_one:
      return scale_ * factor_[i] * factor_[j];
    case Kind::triplets:
      break;
  }
  const Triplet key{std::min(i, j), std::max(i, j), 0.0};
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), key, key_less);
  return it != entries_.end() && same_key(*it, key) ? it->value : 0.0;
}

double SparseSymMatrix::trace() const {
  switch (kind_) {
    case Kind::identity:
      return scale_ * static_cast<double>(dim_);
    case Kind::rank_one:
      return scale_ * factor_.squaredNorm();
    case Kind::triplets:
      break;
  }
  double t = 0.0;
  for (const auto& e : entries_)
    if (e.row == e.col) t += e.value;
  return t;
}

bool SparseSymMatrix::has_zero_diagonal() const {
  switch (kind_) {
    case Kind::identity:
      return scale_ == 0.0;
    case Kind::rank_one:
      return scale_ == 0.0 || factor_.isZero(0.0);
    case Kind::triplets:
      break;
  }
  return std::none_of(entries_.begin(), entries_.end(), [](const Triplet& t) { return t.row == t.col; });
}

double SparseSymMatrix::l1_norm() const {
  switch (kind_) {
    case Kind::identity:
      return std::abs(scale_);
    case Kind::rank_one:
      return std::abs(scale_) * factor_.cwiseAbs().maxCoeff() * factor_.lpNorm<1>();
    case Kind::triplets:
      break;
  }
  Vector colsum = Vector::Zero(dim_);
  for (const auto& t : entries_) {
    colsum[t.col] += std::abs(t.value);
    if (t.row != t.col) colsum[t.row] += std::abs(t.value);
  }
  return colsum.maxCoeff();
}

SparseSymMatrix SparseSymMatrix::scaled(double c) const {
  if (!std::isfinite(c)) throw std::invalid_argument("non-finite scale factor");
  SparseSymMatrix m = *this;
  if (kind_ == Kind::triplets) {
    if (c == 0.0) {
      m.entries_.clear();
    } else {
      for (auto& t : m.entries_) t.value *= c;
    }
  } else {
    m.scale_ *= c;
  }
  return m;
}

Matrix SparseSymMatrix::to_dense() const {
  Matrix out = Matrix::Zero(dim_, dim_);
  add_to(out, 1.0);
  return out;
}

Vector SparseSymMatrix::multiply(const Vector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("dimension mismatch in multiply");
  switch (kind_) {
    case Kind::identity:
      return scale_ * x;
    case Kind::rank_one:
      return (scale_ * factor_.dot(x)) * factor_;
    case Kind::triplets:
      break;
  }
  Vector y = Vector::Zero(dim_);
  for (const auto& t : entries_) {
    y[t.row] += t.value * x[t.col];
    if (t.row != t.col) y[t.col] += t.value * x[t.row];
  }
  return y;
}

void SparseSymMatrix::add_to(Matrix& out, double c) const {
  if (out.rows() != dim_ || out.cols() != dim_) throw std::invalid_argument("dimension mismatch in add_to");
  switch (kind_) {
    case Kind::identity:
      out.diagonal().array() += c * scale_;
      return;
    case Kind::rank_one:
      out.noalias() += (c * scale_) * factor_ * factor_.transpose();
      return;
    case Kind::triplets:
      break;
  }
  for (const auto& t : entries_) {
    out(t.row, t.col) += c * t.value;
    if (t.row != t.col) out(t.col, t.row) += c * t.value;
  }
}

double trace_product(const SparseSymMatrix& a, const SparseSymMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(fmt::format("trace_product dimension mismatch: {} vs {}", a.dim(), b.dim()));
  }
  using Kind = SparseSymMatrix::Kind;
  // Canonical argument order so the result is exactly symmetric.
  const SparseSymMatrix* x = &a;
  const SparseSymMatrix* y = &b;
  if (static_cast<int>(x->kind()) < static_cast<int>(y->kind())) std::swap(x, y);

  if (x->kind() == Kind::identity) return x->scale() * y->trace();
  if (x->kind() == Kind::rank_one) {
    if (y->kind() == Kind::rank_one) {
      const double d = x->factor().dot(y->factor());
      return x->scale() * y->scale() * d * d;
    }
    const Vector& f = x->factor();
    return x->scale() * triplet_quad_form(y->entries(), std::span<const double>(f.data(), f.size()));
  }
  return triplet_trace_product(x->entries(), y->entries());
}

double quad_form(const SparseSymMatrix& a, std::span<const double> y) {
  if (static_cast<Index>(y.size()) != a.dim()) {
    throw std::invalid_argument(fmt::format("quad_form dimension mismatch: {} vs {}", y.size(), a.dim()));
  }
  using Kind = SparseSymMatrix::Kind;
  switch (a.kind()) {
    case Kind::identity: {
      double s = 0.0;
      for (double v : y) s += v * v;
      return a.scale() * s;
    }
    case Kind::rank_one: {
      double d = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) d += a.factor()[static_cast<Index>(i)] * y[i];
      return a.scale() * d * d;
    }
    case Kind::triplets:
      break;
  }
  return triplet_quad_form(a.entries(), y);
}

double quad_form(const SparseSymMatrix& a, const Vector& y) {
  return quad_form(a, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

DenseSymMatrix::DenseSymMatrix(Matrix m) : data_(std::move(m)) {
  if (data_.rows() != data_.cols()) throw std::invalid_argument("DenseSymMatrix must be square");
  if (!data_.allFinite()) throw std::invalid_argument("DenseSymMatrix has non-finite entries");
  if (data_.size() == 0) return;
  const double scale = std::max(1.0, data_.cwiseAbs().maxCoeff());
  const double asym = (data_ - data_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw std::invalid_argument(fmt::format("matrix is not symmetric (max asymmetry {:.3g})", asym));
  }
}

DenseSymMatrix DenseSymMatrix::symmetrized(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("DenseSymMatrix must be square");
  return DenseSymMatrix(Matrix(0.5 * (m + m.transpose())));
}

SimilarityBasis::SimilarityBasis(std::vector<SparseSymMatrix> matrices, std::vector<std::string> names,
                                 bool identity_first)
    : matrices_(std::move(matrices)), names_(std::move(names)) {
  if (matrices_.empty()) throw std::invalid_argument("similarity basis must not be empty");
  dim_ = matrices_.front().dim();
  for (const auto& w : matrices_) {
    if (w.dim() != dim_) {
      throw std::invalid_argument(fmt::format("basis dimension mismatch: {} vs {}", w.dim(), dim_));
    }
  }
  if (identity_first && matrices_.front().kind() != SparseSymMatrix::Kind::identity) {
    throw std::invalid_argument("basis index 0 must be the identity matrix");
  }
  if (names_.empty()) {
    for (std::size_t k = 0; k < matrices_.size(); ++k) names_.push_back(fmt::format("W{}", k));
  } else if (names_.size() != matrices_.size()) {
    throw std::invalid_argument("basis names and matrices differ in length");
  }
}

SimilarityBasis SimilarityBasis::subset(std::span<const Index> indices) const {
  std::vector<SparseSymMatrix> ms;
  std::vector<std::string> ns;
  for (Index k : indices) {
    if (k < 0 || k >= size()) throw std::invalid_argument(fmt::format("basis index {} out of range", k));
    ms.push_back(matrices_[static_cast<std::size_t>(k)]);
    ns.push_back(names_[static_cast<std::size_t>(k)]);
  }
  return SimilarityBasis(std::move(ms), std::move(ns), false);
}

DenseSymMatrix densify(const SimilarityBasis& basis, const Vector& beta) {
  if (beta.size() != basis.size()) {
    throw std::invalid_argument(
        fmt::format("densify: beta has length {} but basis has {} matrices", beta.size(), basis.size()));
  }
  Matrix out = Matrix::Zero(basis.dim(), basis.dim());
  for (Index k = 0; k < basis.size(); ++k) {
    if (beta[k] != 0.0) basis[k].add_to(out, beta[k]);
  }
  return DenseSymMatrix(std::move(out));
}

SparseSymMatrix read_triplet_file(const std::string& path, Index p, bool zero_diagonal) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open triplet file '{}'", path));
  std::vector<Triplet> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    Triplet t{};
    std::string extra;
    if (!(ss >> t.row >> t.col >> t.value) || (ss >> extra)) {
      throw DataError(fmt::format("{}:{}: expected `i j value`", path, lineno));
    }
    entries.push_back(t);
  }
  try {
    return SparseSymMatrix::from_triplets(entries, p, zero_diagonal);
  } catch (const std::invalid_argument& e) {
    throw DataError(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace scr
