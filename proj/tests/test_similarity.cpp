#include "scr/error.hpp"
#include "scr/similarity.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace scr;

namespace {

Index upper_nnz(const SparseSymMatrix& w) { return static_cast<Index>(w.entries().size()); }

void check_structure(const SparseSymMatrix& w) {
  const Matrix d = w.to_dense();
  CHECK(d == d.transpose());
  CHECK(w.has_zero_diagonal());
}

}  // namespace

TEST_CASE("kernel similarity examples") {
  const Vector x = (Vector(3) << 0, 0, 1).finished();
  auto w = kernel_similarity(x, 10.0, 1.0);
  CHECK(w(0, 1) == 1.0);
  CHECK(w(0, 2) == std::exp(-10.0));
  CHECK(w(1, 2) == std::exp(-10.0));
  check_structure(w);

  Engine rng(21);
  const Vector r = test::normal_vector(rng, 12);
  CHECK(kernel_similarity(r, 1.0, 1.0).nnz() == 12 * 11);

  const Vector x3 = (Vector(3) << 0, 1, 3).finished();
  auto third = kernel_similarity(x3, 10.0, 1.0 / 3.0);
  REQUIRE(upper_nnz(third) == 1);
  CHECK(third(0, 1) == std::exp(-10.0));
}

TEST_CASE("kernel density keeps the smallest distances without splitting ties") {
  Engine rng(22);
  const Index p = 30;
  Vector x = test::normal_vector(rng, p);
  for (double density : {0.1, 0.25, 0.5, 0.9}) {
    auto w = kernel_similarity(x, 10.0, density);
    std::vector<double> d2;
    for (Index i = 0; i < p; ++i)
      for (Index j = i + 1; j < p; ++j) d2.push_back((x[i] - x[j]) * (x[i] - x[j]));
    std::sort(d2.begin(), d2.end());
    const auto keep = static_cast<std::size_t>(std::floor(density * static_cast<double>(d2.size())));
    CHECK(upper_nnz(w) == static_cast<Index>(keep));
    check_structure(w);
  }

  // Squared distances 1, 1, 1, 4, 4, 9: a cut inside a tie drops the whole tie.
  const Vector tied = (Vector(4) << 0, 1, 2, 3).finished();
  CHECK(upper_nnz(kernel_similarity(tied, 1.0, 1.0 / 3.0)) == 0);
  CHECK(upper_nnz(kernel_similarity(tied, 1.0, 0.5)) == 3);
  CHECK(upper_nnz(kernel_similarity(tied, 1.0, 4.0 / 6.0)) == 3);
  auto wide = kernel_similarity(tied, 1.0, 5.0 / 6.0);
  CHECK(upper_nnz(wide) == 5);
  CHECK(wide(0, 3) == 0.0);
}

TEST_CASE("kernel similarity errors") {
  const Vector x = (Vector(3) << 0, 1, 2).finished();
  CHECK_THROWS_AS(kernel_similarity(x, 10.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_similarity(x, 10.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(kernel_similarity(Vector::Constant(4, 2.0), 10.0, 0.5), DataError);
  CHECK_NOTHROW(kernel_similarity(Vector::Constant(4, 2.0), 10.0, 1.0));
  CHECK_THROWS_AS(kernel_similarity(Vector::Zero(1), 10.0, 1.0), std::invalid_argument);
}

TEST_CASE("outer-product similarity") {
  auto w = outerproduct_similarity(Vector::Ones(2));
  CHECK(w.to_dense() == Matrix::Constant(2, 2, 0.5));
  CHECK(outerproduct_similarity(Vector::Zero(3)).to_dense().isZero());

  Engine rng(23);
  const Vector x = test::normal_vector(rng, 5);
  const Matrix d = outerproduct_similarity(x).to_dense();
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) CHECK(d(i, j) == doctest::Approx(x[i] * x[j] / 5.0).epsilon(1e-15));
}

TEST_CASE("indicator similarity") {
  auto w = indicator_similarity({"A", "A", "B"});
  CHECK(upper_nnz(w) == 1);
  CHECK(w(0, 1) == 1.0);
  check_structure(w);
  CHECK(indicator_similarity({"a", "b", "c"}).nnz() == 0);

  const std::vector<std::string> labels{"x", "y", "x", "y", "x"};
  Index pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = 0; j < labels.size(); ++j) pairs += (i != j && labels[i] == labels[j]) ? 1 : 0;
  CHECK(indicator_similarity(labels).nnz() == pairs);
  CHECK(pairs == 3 * 2 + 2 * 1);
}

TEST_CASE("edge similarity") {
  auto one = edge_similarity({{0, 1}}, 3);
  CHECK(upper_nnz(one) == 1);
  CHECK(edge_similarity({}, 3).nnz() == 0);
  auto dup = edge_similarity({{0, 1}, {1, 0}, {0, 1}}, 3);
  CHECK(upper_nnz(dup) == 1);
  CHECK(dup(1, 0) == 1.0);
  CHECK_THROWS_AS(edge_similarity({{2, 2}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(edge_similarity({{0, 3}}, 3), std::invalid_argument);
}

TEST_CASE("l1 rescaling") {
  const std::vector<Triplet> t{{0, 1, 1.0}, {0, 2, 1.0}};
  auto w = SparseSymMatrix::from_triplets(t, 3);
  // Column sums (2, 1, 1).
  auto r = rescale_l1(w);
  CHECK(r(0, 1) == 0.5);
  CHECK(r.l1_norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rescale_l1(r).to_dense() == r.to_dense());
  CHECK(rescale_l1(w.scaled(7.5)).to_dense().isApprox(r.to_dense(), 1e-15));
  auto id = rescale_l1(SparseSymMatrix::identity(4, 3.0));
  CHECK(id.kind() == SparseSymMatrix::Kind::identity);
  CHECK(id.scale() == 1.0);
  CHECK_THROWS_AS(rescale_l1(SparseSymMatrix::zero(3)), std::invalid_argument);

  Engine rng(24);
  auto signed_w = test::random_sparse(rng, 10, 0.4);
  CHECK(rescale_l1(signed_w).l1_norm() == doctest::Approx(1.0).epsilon(1e-12));
  auto rank1 = outerproduct_similarity(test::normal_vector(rng, 6));
  CHECK(rescale_l1(rank1).l1_norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bernoulli similarity") {
  CHECK(bernoulli_similarity(10, 0.0, 1).nnz() == 0);
  CHECK_THROWS_AS(bernoulli_similarity(10, 1.0, 1), std::invalid_argument);

  auto a = bernoulli_similarity(50, 0.1, 99);
  auto b = bernoulli_similarity(50, 0.1, 99);
  CHECK(a.to_dense() == b.to_dense());
  check_structure(a);

  const Index p = 200;
  const double q = 5.0 / p;
  double edges = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) edges += static_cast<double>(upper_nnz(bernoulli_similarity(p, q, derive_seed(7, 1, s))));
  const double trials = seeds * p * (p - 1) / 2.0;
  const double freq = edges / trials;
  CHECK(std::abs(freq - q) <= 3.0 * std::sqrt(q * (1 - q) / trials));
}

TEST_CASE("correlated similarity") {
  const Vector x = (Vector(2) << 1, -1).finished();
  CHECK(correlated_similarity(x)(0, 1) == doctest::Approx(-std::exp(-8.0)).epsilon(1e-15));
  CHECK(correlated_similarity(Vector::Zero(4)).nnz() == 0);

  Engine rng(25);
  const Vector r = test::normal_vector(rng, 10);
  auto w = correlated_similarity(r);
  check_structure(w);
  for (Index i = 0; i < 10; ++i)
    for (Index j = 0; j < 10; ++j) {
      const double expected = i == j ? 0.0 : r[i] * r[j] * std::exp(-10.0 * (r[i] - r[j]) * (r[i] - r[j]));
      CHECK(w(i, j) == doctest::Approx(expected).epsilon(1e-14).scale(1e-300));
    }
}
