#include "scr/tuning.hpp"

#include "scr/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

namespace scr {

double bic_score(double rss_value, Index p, Index K, Index df, Index n) {
  if (!(rss_value > 0.0)) throw std::invalid_argument(fmt::format("BIC needs rss > 0 (got {})", rss_value));
  if (K < 1) throw std::invalid_argument("BIC needs K >= 1");
  if (df < 0 || p < 1 || n < 1) throw std::invalid_argument("BIC needs df >= 0, p >= 1, n >= 1");
  const double p2 = static_cast<double>(p) * static_cast<double>(p);
  return std::log(rss_value) +
         std::log(std::log(static_cast<double>(K) + 1.0)) * std::log(p2) / p2 * static_cast<double>(df);
}

double lambda_max(const GramSystem& system, bool unpenalized_intercept) {
  const Matrix& g = system.gram();
  const Vector& m = system.moments();
  double beta0 = 0.0;
  Index first = 0;
  if (unpenalized_intercept) {
    first = 1;
    if (g(0, 0) > 0.0) beta0 = m[0] / g(0, 0);
  }
  double hi = 0.0;
  for (Index k = first; k < system.size(); ++k) hi = std::max(hi, std::abs(m[k] - g(k, 0) * beta0));
  return hi / static_cast<double>(system.p());
}

std::vector<double> log_grid(double hi, double min_ratio, int count) {
  if (!(hi > 0.0) || !(min_ratio > 0.0 && min_ratio < 1.0) || count < 1) {
    throw std::invalid_argument("lambda grid needs hi > 0, 0 < min_ratio < 1, count >= 1");
  }
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double step = count > 1 ? std::log(min_ratio) / (count - 1) : 0.0;
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = hi * std::exp(step * i);
  return grid;
}

std::vector<double> default_lambda_grid(const GramSystem& system, const TuningOptions& options) {
  const double hi = lambda_max(system, options.solver.unpenalized_intercept);
  if (!(hi > 0.0)) throw NumericalError("lambda_max is zero: no signal in any penalized moment");
  return log_grid(hi, options.lambda_min_ratio, options.n_lambda);
}

namespace {

struct GridFit {
  std::optional<FitResult> fit;
  Vector lasso_beta;
};

GridFit fit_point(const GramSystem& system, const PenaltySpec& spec, const SolverOptions& opts, const Vector& start) {
  GridFit out;
  try {
    const Vector w = lasso_weights(system.size(), spec.lambda(), opts.unpenalized_intercept);
    FitResult lasso = weighted_lasso(system, w, opts, start);
    out.lasso_beta = lasso.coefficients.beta();
    out.fit = lla(system, spec, lasso.coefficients, opts);
  } catch (const NumericalError&) {
    out.lasso_beta = start;
  }
  return out;
}

}  // namespace

TuningResult select_lambda(const GramSystem& system, const PenaltySpec& family, std::span<const double> grid,
                           const TuningOptions& options) {
  if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
  if (system.size() < 2) throw std::invalid_argument("tuning needs at least one similarity matrix besides W0");
  std::vector<double> lambdas(grid.begin(), grid.end());
  for (double l : lambdas)
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument(fmt::format("grid value {} is not positive", l));
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

  const auto count = static_cast<Index>(lambdas.size());
  std::vector<std::optional<FitResult>> fits(static_cast<std::size_t>(count));
  if (options.warm_start) {
    Vector start = Vector::Zero(system.size());
    for (Index i = 0; i < count; ++i) {
      GridFit g = fit_point(system, family.with_lambda(lambdas[static_cast<std::size_t>(i)]), options.solver, start);
      fits[static_cast<std::size_t>(i)] = std::move(g.fit);
      start = std::move(g.lasso_beta);
    }
  } else {
    const Vector zero = Vector::Zero(system.size());
#pragma omp parallel for schedule(dynamic)
    for (Index i = 0; i < count; ++i) {
      fits[static_cast<std::size_t>(i)] =
          fit_point(system, family.with_lambda(lambdas[static_cast<std::size_t>(i)]), options.solver, zero).fit;
    }
  }

  TuningResult result;
  result.lambda_grid = lambdas;
  const Index num_similarity = system.size() - 1;
  Index best = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < count; ++i) {
    const auto& fit = fits[static_cast<std::size_t>(i)];
    double score = std::numeric_limits<double>::quiet_NaN();
    Index df = 0;
    double r = std::numeric_limits<double>::quiet_NaN();
    if (fit) {
      df = static_cast<Index>(fit->coefficients.support().size());
      r = rss(system, fit->coefficients.beta());
      if (r > 0.0) score = bic_score(r, system.p(), num_similarity, df, system.n());
    }
    if (std::isnan(score)) ++result.failures;
    result.scores.push_back(score);
    result.df.push_back(df);
    result.rss.push_back(r);
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  if (best < 0) throw NumericalError("every lambda on the grid failed to produce a fit");
  result.best_lambda = lambdas[static_cast<std::size_t>(best)];
  result.best_fit = *fits[static_cast<std::size_t>(best)];
  return result;
}

}  // namespace scr
