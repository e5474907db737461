#pragma once

#include "scr/matrix.hpp"
#include "scr/random.hpp"
#include "scr/solver.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace scr::test {

inline Vector normal_vector(Engine& rng, Index n, double sd = 1.0) {
  boost::random::normal_distribution<double> z(0.0, sd);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = z(rng);
  return v;
}

inline Matrix normal_matrix(Engine& rng, Index rows, Index cols, double sd = 1.0) {
  boost::random::normal_distribution<double> z(0.0, sd);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = z(rng);
  return m;
}

inline double uniform(Engine& rng, double lo, double hi) {
  return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index uniform_index(Engine& rng, Index lo, Index hi) {
  return boost::random::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Random symmetric triplet matrix with about `fill` of the upper pairs set.
inline SparseSymMatrix random_sparse(Engine& rng, Index p, double fill, bool zero_diagonal = true) {
  std::vector<Triplet> t;
  for (Index i = 0; i < p; ++i)
    for (Index j = zero_diagonal ? i + 1 : i; j < p; ++j)
      if (uniform(rng, 0.0, 1.0) < fill) t.push_back({i, j, uniform(rng, -1.0, 1.0)});
  return SparseSymMatrix::from_triplets(t, p, zero_diagonal);
}

/// Basis {I, W_1..W_K} of random sparse matrices.
inline SimilarityBasis random_basis(Engine& rng, Index p, Index K, double fill = 0.1) {
  std::vector<SparseSymMatrix> ws{SparseSymMatrix::identity(p)};
  for (Index k = 0; k < K; ++k) ws.push_back(random_sparse(rng, p, fill));
  return SimilarityBasis(std::move(ws));
}

/**
 * Gram system of a least-squares problem ||t - X beta||^2 with X of size
 * rows x (K+1), so rss(beta) >= 0 holds exactly as for a real basis.
 * Columns are scaled so the Gram diagonal is on the order of p.
 */
inline GramSystem random_system(Engine& rng, Index K, Index p, const Vector& beta, double noise) {
  const Index rows = 4 * (K + 1) + 8;
  Matrix x = normal_matrix(rng, rows, K + 1) * std::sqrt(static_cast<double>(p) / rows);
  Vector t = x * beta + normal_vector(rng, rows, noise);
  Matrix g = x.transpose() * x;
  g = 0.5 * (g + g.transpose()).eval();
  return GramSystem(g, x.transpose() * t, p, 1, t.squaredNorm());
}

inline GramSystem random_system(Engine& rng, Index K, Index p) {
  Vector beta = Vector::Zero(K + 1);
  for (Index k = 0; k <= K; ++k)
    if (k == 0 || uniform(rng, 0.0, 1.0) < 0.3) beta[k] = uniform(rng, -3.0, 3.0);
  return random_system(rng, K, p, beta, 1.0);
}

inline double dense_frobenius_rss(const SimilarityBasis& basis, const Matrix& y, const Vector& beta) {
  const Matrix sigma = densify(basis, beta).matrix();
  double total = 0.0;
  for (Index i = 0; i < y.rows(); ++i) {
    const Vector yi = y.row(i).transpose();
    total += (yi * yi.transpose() - sigma).squaredNorm();
  }
  return total / static_cast<double>(y.rows());
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
             std::to_string(counter()++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(file(name)) << content;
    return file(name);
  }

 private:
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace scr::test
