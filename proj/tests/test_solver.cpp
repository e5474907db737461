#include "scr/error.hpp"
#include "scr/kernels.hpp"
#include "scr/solver.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace scr;

namespace {

GramSystem scalar_system() { return GramSystem(Matrix::Constant(1, 1, 10.0), Vector::Constant(1, 5.0), 10, 1, 100.0); }

SolverOptions penalize_all() {
  SolverOptions o;
  o.unpenalized_intercept = false;
  return o;
}

}  // namespace

TEST_CASE("assemble_gram on the identity basis") {
  Engine rng(31);
  const Index p = 7;
  const Matrix y = test::normal_matrix(rng, 1, p);
  SimilarityBasis basis({SparseSymMatrix::identity(p)});
  auto sys = assemble_gram(basis, y);
  const double yy = y.row(0).squaredNorm();
  CHECK(sys.gram()(0, 0) == static_cast<double>(p));
  CHECK(sys.moments()[0] == doctest::Approx(yy).epsilon(1e-15));
  CHECK(sys.c() == doctest::Approx(yy * yy).epsilon(1e-15));

  auto two = test::random_basis(rng, p, 1, 0.5);
  CHECK(assemble_gram(two, y).gram()(0, 1) == 0.0);

  Matrix twice(2, p);
  twice << y, y;
  auto sys2 = assemble_gram(two, twice);
  auto sys1 = assemble_gram(two, y);
  CHECK(sys2.moments().isApprox(sys1.moments(), 1e-15));
  CHECK(sys2.c() == doctest::Approx(sys1.c()));
  CHECK(sys2.n() == 2);

  CHECK_THROWS_AS(assemble_gram(two, Matrix::Zero(0, p)), std::invalid_argument);
  CHECK_THROWS_AS(assemble_gram(two, Matrix::Zero(1, p + 1)), std::invalid_argument);
}

TEST_CASE("GramSystem validation") {
  Matrix g = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(GramSystem(g, Vector::Zero(3), 2, 1, 0.0), std::invalid_argument);
  g(0, 1) = 0.5;
  CHECK_THROWS_AS(GramSystem(g, Vector::Zero(2), 2, 1, 0.0), std::invalid_argument);
}

TEST_CASE("rss examples") {
  Engine rng(32);
  const Index p = 10;
  auto basis = test::random_basis(rng, p, 3, 0.3);
  const Matrix y = test::normal_matrix(rng, 1, p);
  auto sys = assemble_gram(basis, y);
  CHECK(rss(sys, Vector::Zero(4)) == sys.c());

  const Vector b = ols(sys).beta();
  CHECK(rss(sys, b) == doctest::Approx(test::dense_frobenius_rss(basis, y, b)).epsilon(1e-10));
  CHECK(loss(sys, b) == doctest::Approx(rss(sys, b) / (2.0 * p)));

  SimilarityBasis id({SparseSymMatrix::identity(p)});
  auto s1 = assemble_gram(id, y);
  const double yy = y.row(0).squaredNorm();
  CHECK(rss(s1, Vector::Constant(1, yy / p)) == doctest::Approx(s1.c() - yy * yy / p).epsilon(1e-12));
  CHECK_THROWS_AS(rss(sys, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("ols examples") {
  Engine rng(33);
  const Index p = 6;
  const Matrix y = test::normal_matrix(rng, 1, p);
  SimilarityBasis id({SparseSymMatrix::identity(p)});
  CHECK(ols(assemble_gram(id, y))[0] == doctest::Approx(y.row(0).squaredNorm() / p).epsilon(1e-14));

  GramSystem diag(Vector(Vector::LinSpaced(2, 2.0, 4.0)).asDiagonal().toDenseMatrix(),
                  (Vector(2) << 3.0, 1.0).finished(), 4, 1, 10.0);
  CHECK(ols(diag)[0] == 1.5);
  CHECK(ols(diag)[1] == 0.25);

  auto sys = test::random_system(rng, 5, 30);
  const Vector b = ols(sys).beta();
  CHECK((sys.gram() * b - sys.moments()).norm() <= 1e-8 * sys.moments().norm());
  CHECK(ols(sys).support().size() == 6);

  GramSystem singular(Matrix::Ones(2, 2), Vector::Ones(2), 2, 1, 4.0);
  CHECK_THROWS_AS(ols(singular), NumericalError);
}

TEST_CASE("oracle_fit examples") {
  Engine rng(34);
  auto sys = test::random_system(rng, 4, 20);
  const std::vector<Index> all{0, 1, 2, 3, 4};
  CHECK(oracle_fit(sys, all).beta() == ols(sys).beta());

  const Index p = 8;
  const Matrix y = test::normal_matrix(rng, 3, p);
  auto basis = test::random_basis(rng, p, 4, 0.4);
  auto full = assemble_gram(basis, y);
  const std::vector<Index> zero{0};
  const Vector b0 = oracle_fit(full, zero).beta();
  double mean_yy = 0.0;
  for (Index i = 0; i < 3; ++i) mean_yy += y.row(i).squaredNorm() / 3.0;
  CHECK(b0[0] == doctest::Approx(mean_yy / p).epsilon(1e-13));
  CHECK(b0.tail(4).isZero());

  const std::vector<Index> s02{0, 2};
  const Vector b = oracle_fit(full, s02).beta();
  Matrix g2(2, 2);
  g2 << trace_product(basis[0], basis[0]), trace_product(basis[0], basis[2]), trace_product(basis[2], basis[0]),
      trace_product(basis[2], basis[2]);
  Vector m2(2);
  for (int j = 0; j < 2; ++j) {
    const auto& w = basis[s02[j]];
    double acc = 0.0;
    for (Index i = 0; i < 3; ++i) {
      const Vector yi = y.row(i).transpose();
      acc += yi.dot(w.to_dense() * yi);
    }
    m2[j] = acc / 3.0;
  }
  const Vector hand = g2.inverse() * m2;
  CHECK(b[0] == doctest::Approx(hand[0]).epsilon(1e-10));
  CHECK(b[2] == doctest::Approx(hand[1]).epsilon(1e-10));
  CHECK(b[1] == 0.0);
  CHECK(b[3] == 0.0);
  CHECK(b[4] == 0.0);
}

TEST_CASE("weighted_lasso examples") {
  auto sys = scalar_system();
  auto fit = weighted_lasso(sys, Vector::Constant(1, 0.2), penalize_all());
  CHECK(fit.coefficients[0] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(fit.converged);
  CHECK(kkt_residual(sys, Vector::Constant(1, 0.3), Vector::Constant(1, 0.2)) <= 1e-10);

  auto zero = weighted_lasso(sys, Vector::Constant(1, 1.0), penalize_all());
  CHECK(zero.coefficients[0] == 0.0);
  CHECK(zero.coefficients.support().empty());

  Engine rng(35);
  auto big = test::random_system(rng, 6, 40);
  auto unpen = weighted_lasso(big, Vector::Zero(7));
  CHECK((unpen.coefficients.beta() - ols(big).beta()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("weighted_lasso objective decreases every sweep") {
  Engine rng(36);
  for (int rep = 0; rep < 20; ++rep) {
    auto sys = test::random_system(rng, 12, 50);
    const Vector w = Vector::Constant(13, test::uniform(rng, 0.01, 0.5));
    SolverOptions opts;
    opts.polish = false;
    auto fit = weighted_lasso(sys, w, opts);
    CHECK(fit.converged);
    for (std::size_t i = 1; i < fit.objective_path.size(); ++i)
      CHECK(fit.objective_path[i] <= fit.objective_path[i - 1] + 1e-12 * std::abs(fit.objective_path[i - 1]));
    CHECK(fit.kkt_residual <= 1e-8);
  }
}

TEST_CASE("polish never worsens the fit") {
  Engine rng(37);
  for (int rep = 0; rep < 20; ++rep) {
    auto sys = test::random_system(rng, 10, 30);
    const Vector w = Vector::Constant(11, test::uniform(rng, 0.05, 0.3));
    SolverOptions plain;
    plain.polish = false;
    auto a = weighted_lasso(sys, w, plain);
    auto b = weighted_lasso(sys, w);
    CHECK(b.objective <= a.objective + 1e-12);
    CHECK(b.kkt_residual <= 1e-8);
    CHECK(a.coefficients.support() == b.coefficients.support());
  }
}

TEST_CASE("warm start reaches the same solution") {
  Engine rng(38);
  auto sys = test::random_system(rng, 8, 25);
  const Vector w = Vector::Constant(9, 0.1);
  auto cold = weighted_lasso(sys, w);
  auto warm = weighted_lasso(sys, w, {}, ols(sys).beta());
  CHECK((cold.coefficients.beta() - warm.coefficients.beta()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("max_iter exhaustion reports non-convergence") {
  Engine rng(39);
  auto sys = test::random_system(rng, 10, 30);
  SolverOptions o;
  o.max_iter = 1;
  o.polish = false;
  o.tol = 1e-15;
  CHECK_FALSE(weighted_lasso(sys, Vector::Constant(11, 1e-4), o).converged);
}

TEST_CASE("weighted_lasso rejects a zero Gram diagonal on a penalized coordinate") {
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 1.0;
  GramSystem sys(g, Vector::Ones(2), 2, 1, 4.0);
  CHECK_THROWS_AS(weighted_lasso(sys, Vector::Constant(2, 0.1)), NumericalError);
}

TEST_CASE("kkt_residual examples") {
  Engine rng(40);
  auto sys = test::random_system(rng, 5, 20);
  CHECK(kkt_residual(sys, ols(sys).beta(), Vector::Zero(6)) <= 1e-8);
  CHECK(kkt_residual(sys, Vector::Zero(6), Vector::Constant(6, 1e9)) == 0.0);
}

TEST_CASE("lla examples") {
  Engine rng(41);
  auto sys = test::random_system(rng, 8, 30);
  const auto spec = PenaltySpec::scad(0.3);

  SolverOptions one;
  one.max_outer = 1;
  auto first = lla(sys, spec, Coefficients::zeros(9), one);
  auto lasso = weighted_lasso(sys, lasso_weights(9, penalty_deriv(spec, 0.0), true), one, Vector::Zero(9));
  CHECK(first.coefficients.beta() == lasso.coefficients.beta());

  auto zero_lambda = lla(sys, PenaltySpec::scad(0.0), Coefficients(test::normal_vector(rng, 9)));
  CHECK((zero_lambda.coefficients.beta() - ols(sys).beta()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("lla weights follow the penalty derivative") {
  const auto spec = PenaltySpec::scad(1.0);
  const Vector beta = (Vector(4) << 5.0, 0.0, 2.0, -10.0).finished();
  const Vector w = lla_weights(spec, beta, true);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 1.0);
  CHECK(w[2] == doctest::Approx(1.7 / 2.7));
  CHECK(w[3] == 0.0);
  CHECK(lla_weights(spec, beta, false)[0] == 0.0);
  CHECK(lla_weights(spec, Vector::Zero(2), false)[0] == 1.0);
}

TEST_CASE("lla objective is nonincreasing and ends at a KKT point") {
  Engine rng(42);
  for (int rep = 0; rep < 25; ++rep) {
    auto sys = test::random_system(rng, 10, 40);
    const double lam = test::uniform(rng, 0.02, 0.4);
    for (auto spec : {PenaltySpec::scad(lam), PenaltySpec::mcp(lam)}) {
      auto init = weighted_lasso(sys, lasso_weights(11, lam, true));
      auto fit = lla(sys, spec, init.coefficients);
      for (std::size_t i = 1; i < fit.objective_path.size(); ++i)
        CHECK(fit.objective_path[i] <= fit.objective_path[i - 1] + 1e-8);
      CHECK(fit.kkt_residual <= 1e-6);
    }
  }
}

TEST_CASE("per-entry scaling rescales the concave shape only") {
  Engine rng(43);
  auto sys = test::random_system(rng, 6, 50);
  const double lam = 0.2;
  SolverOptions stated;
  SolverOptions per_entry;
  per_entry.scaling = PenaltyScaling::per_entry;
  CHECK(penalty_scale(PenaltyScaling::stated, sys) == 1.0);
  CHECK(penalty_scale(PenaltyScaling::per_entry, sys) == 50.0);

  // The first step from zero is the same lasso under both scalings.
  stated.max_outer = per_entry.max_outer = 1;
  auto a = lla(sys, PenaltySpec::scad(lam), Coefficients::zeros(7), stated);
  auto b = lla(sys, PenaltySpec::scad(lam), Coefficients::zeros(7), per_entry);
  CHECK(a.coefficients.beta() == b.coefficients.beta());

  const Vector beta = (Vector(7) << 1, 0.001, 0.01, 0.5, 0, 0, 0).finished();
  const auto shape = PenaltySpec::scad(lam / 50.0);
  const Vector expected = 50.0 * lla_weights(shape, beta, true);
  CHECK(penalized_objective(sys, PenaltySpec::scad(lam), beta, true, 50.0) ==
        doctest::Approx(loss(sys, beta) + 50.0 * (penalty_value(shape, 0.001) + penalty_value(shape, 0.01) +
                                                  penalty_value(shape, 0.5))));
  CHECK(expected[1] == doctest::Approx(lam));
  CHECK(expected[3] == 0.0);
  CHECK(parse_penalty_scaling("per_entry") == PenaltyScaling::per_entry);
  CHECK_THROWS_AS(parse_penalty_scaling("other"), std::invalid_argument);
}

TEST_CASE("observation scaling multiplies moments and ols by c squared") {
  Engine rng(44);
  const Index p = 9;
  auto basis = test::random_basis(rng, p, 3, 0.4);
  const Matrix y = test::normal_matrix(rng, 2, p);
  auto a = assemble_gram(basis, y);
  auto b = assemble_gram(basis, 3.0 * y);
  CHECK(a.gram() == b.gram());
  CHECK(b.moments().isApprox(9.0 * a.moments(), 1e-13));
  CHECK(ols(b).beta().isApprox(9.0 * ols(a).beta(), 1e-12));
}
