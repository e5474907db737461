#include "scr/backtest.hpp"
#include "scr/error.hpp"
#include "scr/factor.hpp"
#include "scr/portfolio.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace scr;

namespace {

DenseSymMatrix random_pd(Engine& rng, Index p) {
  const Matrix a = test::normal_matrix(rng, p, p);
  return DenseSymMatrix::symmetrized(a * a.transpose() + 0.1 * Matrix::Identity(p, p));
}

}  // namespace

TEST_CASE("pd_repair") {
  Engine rng(81);
  auto pd = random_pd(rng, 5);
  CHECK(pd_repair(pd).matrix() == pd.matrix());

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  auto fixed = pd_repair(DenseSymMatrix(d), 1e-6);
  CHECK(fixed(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fixed(1, 1) == doctest::Approx(1e-6).epsilon(1e-9));
  CHECK(std::abs(fixed(0, 1)) <= 1e-15);

  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = test::normal_matrix(rng, 5, 5);
    auto indefinite = DenseSymMatrix::symmetrized(a + a.transpose());
    auto out = pd_repair(indefinite);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(out.matrix());
    CHECK(eig.eigenvalues().minCoeff() >= 1e-6 - 1e-12);
    CHECK(pd_repair(out).matrix() == out.matrix());
  }
  CHECK_THROWS_AS(pd_repair(pd, 0.0), std::invalid_argument);
}

TEST_CASE("gmv_weights") {
  const Vector eq = gmv_weights(DenseSymMatrix(Matrix::Identity(4, 4)));
  CHECK(eq.isApprox(Vector::Constant(4, 0.25), 1e-15));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const Vector w = gmv_weights(DenseSymMatrix(d));
  CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  Engine rng(82);
  auto sigma = random_pd(rng, 4);
  const Vector opt = gmv_weights(sigma);
  CHECK(opt.sum() == doctest::Approx(1.0).epsilon(1e-10));
  const double best = opt.dot(sigma.matrix() * opt);
  bool beaten = false;
  for (int i = 0; i < 100000; ++i) {
    Vector v = test::normal_vector(rng, 4);
    v[3] = 1.0 - v.head(3).sum();
    if (v.dot(sigma.matrix() * v) < best - 1e-12) beaten = true;
  }
  CHECK_FALSE(beaten);

  const Vector scaled = gmv_weights(DenseSymMatrix(7.25 * sigma.matrix()));
  CHECK((scaled - opt).cwiseAbs().maxCoeff() <= 1e-14);

  CHECK_THROWS_AS(gmv_weights(DenseSymMatrix(Matrix::Zero(3, 3))), NumericalError);
}

TEST_CASE("performance measures") {
  const std::vector<double> r{0.1, -0.1};
  auto rep = performance(r, r);
  CHECK(rep.cqgr == doctest::Approx(std::sqrt(0.99) - 1.0).epsilon(1e-12));
  CHECK(std::abs(rep.cqgr - (-0.0050126)) < 1e-7);
  REQUIRE(rep.alpha);
  REQUIRE(rep.beta);
  CHECK(std::abs(*rep.alpha) <= 1e-15);
  CHECK(*rep.beta == doctest::Approx(1.0));

  const std::vector<double> x{0.02, 0.05, -0.01, 0.03, 0.00};
  auto same = performance(x, x, 0.004);
  CHECK(std::abs(*same.alpha) <= 1e-15);
  CHECK(*same.beta == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(same.mean == doctest::Approx(0.018));
  double ss = 0.0;
  for (double v : x) ss += (v - 0.018) * (v - 0.018);
  CHECK(same.sd == doctest::Approx(std::sqrt(ss / 4.0)));
  CHECK(*same.sharpe == doctest::Approx((0.018 - 0.004) / same.sd));

  const std::vector<double> m{0.01, 0.02, 0.03, 0.04, 0.05};
  std::vector<double> lin;
  for (double v : m) lin.push_back(0.001 + 1.5 * v);
  auto reg = performance(lin, m);
  CHECK(*reg.beta == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(*reg.alpha == doctest::Approx(0.001).epsilon(1e-10));

  const std::vector<double> flat{0.01, 0.01, 0.01};
  auto f = performance(flat, flat);
  CHECK_FALSE(f.sharpe.has_value());
  CHECK_FALSE(f.beta.has_value());

  CHECK_THROWS_AS(performance(std::vector<double>{0.1}, std::vector<double>{0.1}), std::invalid_argument);
  CHECK_THROWS_AS(performance(std::vector<double>{0.1, -1.0}, std::vector<double>{0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(performance(r, std::vector<double>{0.1, 0.2, 0.3}), std::invalid_argument);
}

TEST_CASE("Sharpe definition recomputes the reported SCAD ratio") {
  const double mean = 4.206, sd = 10.647, rf = 0.375;
  CHECK((mean - rf) / sd == doctest::Approx(0.360).epsilon(0.003));
}

TEST_CASE("rolling backtest examples") {
  BacktestInputs in;
  in.returns = Matrix::Constant(12, 4, 0.01);
  BacktestOptions opts;
  opts.window = 5;
  auto res = rolling_backtest(in, {"identity", "sample", "lw"}, {}, opts);
  REQUIRE(res.methods.size() == 4);
  CHECK(res.methods[0].method == "market");
  for (const auto& m : res.methods)
    for (double r : m.report.period_returns) CHECK(r == doctest::Approx(0.01).epsilon(1e-12));

  Engine rng(83);
  in.returns = test::normal_matrix(rng, 20, 5, 0.05);
  opts.window = 19;
  auto one = rolling_returns(in.returns, make_estimator("sample", in, {}), opts);
  CHECK(one.size() == 1);

  opts.window = 8;
  auto eq = rolling_returns(in.returns, make_estimator("identity", in, {}), opts);
  for (std::size_t i = 0; i < eq.size(); ++i) CHECK(eq[i] == doctest::Approx(in.returns.row(8 + i).mean()).epsilon(1e-14));

  opts.window = 20;
  CHECK_THROWS_AS(rolling_returns(in.returns, make_estimator("sample", in, {}), opts), std::invalid_argument);
}

TEST_CASE("benchmark is cap weighted when caps are given") {
  Engine rng(84);
  BacktestInputs in;
  in.returns = test::normal_matrix(rng, 10, 3, 0.05);
  in.market_caps = (Vector(3) << 1.0, 0.0, 3.0).finished();
  BacktestOptions opts;
  opts.window = 6;
  auto res = rolling_backtest(in, {}, {}, opts);
  for (std::size_t i = 0; i < res.periods.size(); ++i) {
    const auto t = res.periods[i];
    CHECK(res.benchmark_returns[i] == doctest::Approx(0.25 * in.returns(t, 0) + 0.75 * in.returns(t, 2)));
  }
  in.market_caps = Vector::Ones(2);
  CHECK_THROWS_AS(rolling_backtest(in, {}, {}, opts), DataError);
}

TEST_CASE("estimator failures name the window") {
  Engine rng(85);
  const Matrix y = test::normal_matrix(rng, 10, 3, 0.05);
  BacktestOptions opts;
  opts.window = 4;
  CovarianceEstimator failing = [](const Matrix& w, Index first) -> DenseSymMatrix {
    if (first == 2) throw NumericalError("boom");
    return sample_covariance(w);
  };
  try {
    rolling_returns(y, failing, opts);
    FAIL("expected a NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()) == "window 2 (rows 2..5): boom");
  }
}

TEST_CASE("make_estimator validates method inputs") {
  BacktestInputs in;
  in.returns = Matrix::Zero(10, 3);
  CHECK_THROWS_AS(make_estimator("capm", in, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_estimator("scr", in, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_estimator("cbf", in, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_estimator("nope", in, {}), std::invalid_argument);
  in.factors = Matrix::Zero(10, 1);
  CHECK_THROWS_AS(make_estimator("ff3", in, {}), std::invalid_argument);
  CHECK_NOTHROW(make_estimator("capm", in, {}));
  CHECK(known_methods().size() == 12);
}

TEST_CASE("factor and SCR estimators on a small panel") {
  Engine rng(86);
  const Index t = 40, p = 12;
  BacktestInputs in;
  const Matrix f = test::normal_matrix(rng, t, 3, 0.03);
  const Matrix b = test::normal_matrix(rng, p, 3);
  in.returns = f * b.transpose() + test::normal_matrix(rng, t, p, 0.02);
  in.factors = f;
  in.characteristics = b;
  std::vector<SparseSymMatrix> ws{SparseSymMatrix::identity(p)};
  for (int k = 0; k < 3; ++k) ws.push_back(test::random_sparse(rng, p, 0.3));
  in.basis = SimilarityBasis(ws);
  BacktestOptions opts;
  opts.window = 30;
  for (const auto& m : known_methods()) {
    auto est = make_estimator(m, in, {});
    auto realized = rolling_returns(in.returns, est, opts);
    CHECK(realized.size() == 10);
    for (double r : realized) CHECK(std::isfinite(r));
  }
}
