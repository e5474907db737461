#include "scr/backtest.hpp"

#include "scr/error.hpp"
#include "scr/factor.hpp"
#include "scr/inference.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace scr {

namespace {

struct Fitted {
  Matrix data;
  Vector scale;
};

Fitted prepare(const SimilarityBasis& basis, const Matrix& window, bool standardize_rows) {
  if (window.cols() != basis.dim()) {
    throw DataError(fmt::format("window has {} assets but the basis dimension is {}", window.cols(), basis.dim()));
  }
  if (standardize_rows && window.rows() >= 2) {
    StandardizedPanel st = standardize(window);
    return {std::move(st.data), std::move(st.sds)};
  }
  return {window, Vector::Ones(window.cols())};
}

DenseSymMatrix rescaled(const SimilarityBasis& basis, const Vector& beta, const Vector& scale) {
  const Matrix sigma = densify(basis, beta).matrix();
  return DenseSymMatrix::symmetrized(scale.asDiagonal() * sigma * scale.asDiagonal());
}

Matrix centered(const Matrix& window) { return window.rowwise() - window.colwise().mean(); }

template <typename T>
const T& require(const std::optional<T>& value, const std::string& method, const char* what) {
  if (!value) throw std::invalid_argument(fmt::format("method '{}' needs {}", method, what));
  return *value;
}

Matrix factor_columns(const Matrix& factors, Index count, const std::string& method) {
  if (factors.cols() < count) {
    throw std::invalid_argument(fmt::format("method '{}' needs {} factor columns, got {}", method, count, factors.cols()));
  }
  return factors.leftCols(count);
}

}  // namespace

DenseSymMatrix scr_covariance(const SimilarityBasis& basis, const Matrix& window, const ScrSettings& settings) {
  const Fitted f = prepare(basis, window, settings.standardize);
  const GramSystem system = assemble_gram(basis, f.data);
  const std::vector<double> grid = default_lambda_grid(system, settings.tuning);
  const TuningResult tuned = select_lambda(system, settings.penalty, grid, settings.tuning);
  return rescaled(basis, tuned.best_fit.coefficients.beta(), f.scale);
}

DenseSymMatrix ols_covariance(const SimilarityBasis& basis, const Matrix& window, bool standardize_rows) {
  const Fitted f = prepare(basis, window, standardize_rows);
  const GramSystem system = assemble_gram(basis, f.data);
  return rescaled(basis, ols(system).beta(), f.scale);
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names{"identity", "sample",  "lw",      "capm",    "ff3",     "cbf",
                                              "ols",      "scr",     "capm+scr", "ff3+scr", "cbf+scr", "lw+scr"};
  return names;
}

CovarianceEstimator make_estimator(const std::string& method, const BacktestInputs& inputs,
                                   const ScrSettings& settings) {
  const Index p = inputs.returns.cols();
  if (method == "identity") {
    return [p](const Matrix&, Index) { return DenseSymMatrix(Matrix::Identity(p, p)); };
  }
  if (method == "sample") {
    return [](const Matrix& w, Index) { return sample_covariance(w); };
  }
  if (method == "lw") {
    return [](const Matrix& w, Index) { return lw_shrink(sample_covariance(w), centered(w)).sigma; };
  }

  const bool with_scr = method.size() > 4 && method.ends_with("+scr");
  const std::string base = with_scr ? method.substr(0, method.size() - 4) : method;
  const SimilarityBasis* basis = nullptr;
  if (with_scr || method == "scr" || method == "ols") basis = &require(inputs.basis, method, "a similarity basis");

  auto residual_cov = [basis, settings, with_scr](const FactorDecomposition& d) {
    return with_scr ? scr_covariance(*basis, d.residuals, settings) : residual_variances(d);
  };

  if (method == "scr") {
    return [basis, settings](const Matrix& w, Index) { return scr_covariance(*basis, w, settings); };
  }
  if (method == "ols") {
    const bool standardize_rows = settings.standardize;
    return [basis, standardize_rows](const Matrix& w, Index) { return ols_covariance(*basis, w, standardize_rows); };
  }
  if (base == "capm" || base == "ff3") {
    const Matrix& all = require(inputs.factors, method, "a factor panel");
    if (all.rows() != inputs.returns.rows()) throw DataError("factor panel and returns have different row counts");
    const Matrix factors = factor_columns(all, base == "capm" ? 1 : 3, method);
    return [factors, residual_cov](const Matrix& w, Index first) {
      const FactorDecomposition d = factor_loadings(w, factors.middleRows(first, w.rows()));
      return composite_covariance(d, residual_cov(d));
    };
  }
  if (base == "cbf") {
    const Matrix& x = require(inputs.characteristics, method, "a characteristics matrix");
    if (x.rows() != p) throw DataError("characteristics rows do not match the number of assets");
    return [x, residual_cov](const Matrix& w, Index) {
      const FactorDecomposition d = cbf_factors(w, x);
      return composite_covariance(d, residual_cov(d));
    };
  }
  if (method == "lw+scr") {
    return [basis, settings](const Matrix& w, Index) {
      return lw_shrink(scr_covariance(*basis, w, settings), centered(w)).sigma;
    };
  }
  throw std::invalid_argument(fmt::format("unknown covariance method '{}'", method));
}

std::vector<double> rolling_returns(const Matrix& returns, const CovarianceEstimator& estimator,
                                    const BacktestOptions& options) {
  const Index t_total = returns.rows();
  const Index window = options.window;
  if (window < 1 || t_total <= window) {
    throw std::invalid_argument(fmt::format("backtest needs 1 <= window < T (window {}, T {})", window, t_total));
  }
  const Index count = t_total - window;
  std::vector<double> realized(static_cast<std::size_t>(count), 0.0);

  enum class Kind { none, data, numerical, argument, other };
  std::vector<Kind> kinds(static_cast<std::size_t>(count), Kind::none);
  std::vector<std::string> messages(static_cast<std::size_t>(count));

#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < count; ++i) {
    const Index t = window + i;
    const auto slot = static_cast<std::size_t>(i);
    try {
      const DenseSymMatrix sigma = pd_repair(estimator(returns.middleRows(t - window, window), t - window),
                                             options.repair_eps);
      realized[slot] = gmv_weights(sigma).dot(returns.row(t).transpose());
    } catch (const DataError& e) {
      kinds[slot] = Kind::data;
      messages[slot] = e.what();
    } catch (const NumericalError& e) {
      kinds[slot] = Kind::numerical;
      messages[slot] = e.what();
    } catch (const std::invalid_argument& e) {
      kinds[slot] = Kind::argument;
      messages[slot] = e.what();
    } catch (const std::exception& e) {
      kinds[slot] = Kind::other;
      messages[slot] = e.what();
    }
  }

  for (Index i = 0; i < count; ++i) {
    const auto slot = static_cast<std::size_t>(i);
    if (kinds[slot] == Kind::none) continue;
    const std::string msg = fmt::format("window {} (rows {}..{}): {}", i, i, i + window - 1, messages[slot]);
    switch (kinds[slot]) {
      case Kind::data:
        throw DataError(msg);
      case Kind::numerical:
        throw NumericalError(msg);
      case Kind::argument:
        throw std::invalid_argument(msg);
      default:
        throw std::runtime_error(msg);
    }
  }
  return realized;
}

BacktestResult rolling_backtest(const BacktestInputs& inputs, const std::vector<std::string>& methods,
                                const ScrSettings& settings, const BacktestOptions& options) {
  const Matrix& y = inputs.returns;
  const Index p = y.cols();
  if (y.rows() <= options.window) {
    throw std::invalid_argument(fmt::format("backtest needs T > window (T {}, window {})", y.rows(), options.window));
  }
  Vector bench_w = Vector::Constant(p, 1.0 / static_cast<double>(p));
  if (inputs.market_caps) {
    const Vector& caps = *inputs.market_caps;
    if (caps.size() != p) throw DataError("market caps do not match the number of assets");
    if ((caps.array() < 0.0).any() || !(caps.sum() > 0.0)) throw DataError("market caps must be nonnegative with a positive sum");
    bench_w = caps / caps.sum();
  }

  BacktestResult result;
  for (Index t = options.window; t < y.rows(); ++t) {
    result.periods.push_back(t);
    result.benchmark_returns.push_back(bench_w.dot(y.row(t).transpose()));
  }
  result.methods.push_back({"market", performance(result.benchmark_returns, result.benchmark_returns, options.risk_free)});
  for (const auto& name : methods) {
    const CovarianceEstimator estimator = make_estimator(name, inputs, settings);
    const std::vector<double> realized = rolling_returns(y, estimator, options);
    result.methods.push_back({name, performance(realized, result.benchmark_returns, options.risk_free)});
  }
  return result;
}

}  // namespace scr
