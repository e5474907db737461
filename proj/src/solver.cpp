#include "scr/solver.hpp"

#include "scr/error.hpp"
#include "scr/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scr {

namespace {

constexpr double kMaxCondition = 1e12;
// Exact active-set re-solves are skipped above this size.
constexpr Index kMaxPolishSize = 400;
// Residual m - G beta is recomputed from scratch this often to stop drift.
constexpr int kRefreshSweeps = 50;

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

void require_length(const GramSystem& system, const Vector& v, const char* what) {
  if (v.size() != system.size()) {
    throw std::invalid_argument(fmt::format("{} has length {}, expected {}", what, v.size(), system.size()));
  }
}

double l1_term(const Vector& weights, const Vector& beta) { return weights.cwiseProduct(beta.cwiseAbs()).sum(); }

Vector restricted_solve(const GramSystem& system, std::span<const Index> support) {
  const auto s = static_cast<Index>(support.size());
  Matrix g(s, s);
  Vector m(s);
  for (Index a = 0; a < s; ++a) {
    m[a] = system.moments()[support[a]];
    for (Index b = 0; b < s; ++b) g(a, b) = system.gram()(support[a], support[b]);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("eigen-decomposition of the Gram matrix failed");
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw NumericalError(fmt::format("Gram matrix is singular or ill-conditioned (eigenvalues in [{:.3g}, {:.3g}])", lo, hi));
  }
  Eigen::LDLT<Matrix> ldlt(g);
  Vector x = ldlt.solve(m);
  Vector beta = Vector::Zero(system.size());
  for (Index a = 0; a < s; ++a) beta[support[a]] = x[a];
  return beta;
}

double lasso_objective(const GramSystem& system, const Vector& weights, const Vector& beta) {
  return loss(system, beta) + l1_term(weights, beta);
}

// Solves the active-set stationarity equations exactly for the current sign
// pattern; returns false when the solution leaves that pattern.
bool polish_active_set(const GramSystem& system, const Vector& weights, Vector& beta) {
  std::vector<Index> active;
  for (Index k = 0; k < beta.size(); ++k)
    if (beta[k] != 0.0) active.push_back(k);
  const auto s = static_cast<Index>(active.size());
  if (s == 0 || s > kMaxPolishSize) return false;

  const auto p = static_cast<double>(system.p());
  Matrix g(s, s);
  Vector rhs(s);
  for (Index a = 0; a < s; ++a) {
    const Index k = active[static_cast<std::size_t>(a)];
    rhs[a] = system.moments()[k] - p * weights[k] * sign(beta[k]);
    for (Index b = 0; b < s; ++b) g(a, b) = system.gram()(k, active[static_cast<std::size_t>(b)]);
  }
  Eigen::LDLT<Matrix> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
  const Vector x = ldlt.solve(rhs);
  if (!x.allFinite()) return false;

  Vector candidate = Vector::Zero(beta.size());
  for (Index a = 0; a < s; ++a) {
    const Index k = active[static_cast<std::size_t>(a)];
    if (x[a] * beta[k] <= 0.0) return false;
    candidate[k] = x[a];
  }
  if (kkt_residual(system, candidate, weights) > kkt_residual(system, beta, weights)) return false;
  if (lasso_objective(system, weights, candidate) > lasso_objective(system, weights, beta)) return false;
  beta = candidate;
  return true;
}

}  // namespace

GramSystem::GramSystem(Matrix gram, Vector moments, Index p, Index n, double c)
    : gram_(std::move(gram)), moments_(std::move(moments)), p_(p), n_(n), c_(c) {
  if (gram_.rows() != gram_.cols() || gram_.rows() != moments_.size() || moments_.size() == 0) {
    throw std::invalid_argument(fmt::format("Gram system shape mismatch: gram {}x{}, moments {}", gram_.rows(),
                                            gram_.cols(), moments_.size()));
  }
  if (p_ < 1 || n_ < 1) throw std::invalid_argument("Gram system needs p >= 1 and n >= 1");
  if (!gram_.allFinite() || !moments_.allFinite() || !std::isfinite(c_)) {
    throw std::invalid_argument("Gram system has non-finite entries");
  }
  const double scale = std::max(1.0, gram_.cwiseAbs().maxCoeff());
  if ((gram_ - gram_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("Gram matrix is not symmetric");
  }
}

GramSystem assemble_gram(const SimilarityBasis& basis, const Matrix& observations) {
  if (observations.rows() == 0) throw std::invalid_argument("assemble_gram needs at least one observation");
  if (observations.cols() != basis.dim()) {
    throw std::invalid_argument(
        fmt::format("observations have {} columns but the basis dimension is {}", observations.cols(), basis.dim()));
  }
  return GramSystem(kernels::gram_matrix(basis), kernels::moment_vector(basis, observations), basis.dim(),
                    observations.rows(), kernels::squared_norm_moment(observations));
}

Coefficients::Coefficients(Vector beta) : beta_(std::move(beta)) {
  for (Index k = 0; k < beta_.size(); ++k)
    if (std::abs(beta_[k]) > kZeroTol) support_.push_back(k);
}

double rss(const GramSystem& system, const Vector& beta) {
  require_length(system, beta, "beta");
  const double value = system.c() - 2.0 * beta.dot(system.moments()) + beta.dot(system.gram() * beta);
  return std::max(value, 0.0);
}

double loss(const GramSystem& system, const Vector& beta) {
  return rss(system, beta) / (2.0 * static_cast<double>(system.p()));
}

Coefficients ols(const GramSystem& system) {
  std::vector<Index> all(static_cast<std::size_t>(system.size()));
  for (Index k = 0; k < system.size(); ++k) all[static_cast<std::size_t>(k)] = k;
  return oracle_fit(system, all);
}

Coefficients oracle_fit(const GramSystem& system, std::span<const Index> support) {
  if (support.empty()) throw std::invalid_argument("oracle_fit needs a nonempty support");
  std::vector<Index> sorted(support.begin(), support.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 0 ||
      sorted.back() >= system.size()) {
    throw std::invalid_argument("oracle_fit support has duplicate or out-of-range indices");
  }
  return Coefficients(restricted_solve(system, sorted));
}

Vector lasso_weights(Index size, double lambda, bool unpenalized_intercept) {
  Vector w = Vector::Constant(size, lambda);
  if (unpenalized_intercept && size > 0) w[0] = 0.0;
  return w;
}

FitResult weighted_lasso(const GramSystem& system, const Vector& weights, const SolverOptions& options) {
  return weighted_lasso(system, weights, options, Vector::Zero(system.size()));
}

FitResult weighted_lasso(const GramSystem& system, const Vector& weights, const SolverOptions& options,
                         const Vector& warm_start) {
  require_length(system, weights, "weights");
  require_length(system, warm_start, "warm start");
  if (!weights.allFinite() || (weights.array() < 0.0).any()) {
    throw std::invalid_argument("lasso weights must be finite and nonnegative");
  }
  const Matrix& g = system.gram();
  const Vector& m = system.moments();
  const auto p = static_cast<double>(system.p());
  const Index size = system.size();

  Vector beta = warm_start;
  for (Index k = 0; k < size; ++k) {
    if (g(k, k) <= 0.0) {
      if (m[k] != 0.0) throw NumericalError(fmt::format("coordinate {} has zero Gram diagonal", k));
      beta[k] = 0.0;
    }
  }

  FitResult result;
  result.weights = weights;
  Vector r = m - g * beta;
  auto objective = [&] {
    // beta^T G beta = beta^T (m - r)
    const double value = std::max(system.c() - beta.dot(m) - beta.dot(r), 0.0);
    return value / (2.0 * p) + l1_term(weights, beta);
  };
  result.objective_path.push_back(objective());

  for (int sweep = 1; sweep <= options.max_iter; ++sweep) {
    double max_change = 0.0;
    for (Index k = 0; k < size; ++k) {
      const double gkk = g(k, k);
      if (gkk <= 0.0) continue;
      const double z = r[k] + gkk * beta[k];
      const double updated = soft_threshold(z, p * weights[k]) / gkk;
      const double delta = updated - beta[k];
      if (delta != 0.0) {
        r.noalias() -= delta * g.col(k);
        beta[k] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (sweep % kRefreshSweeps == 0) r = m - g * beta;
    result.objective_path.push_back(objective());
    result.iterations = sweep;
    if (max_change <= options.tol) {
      if (kkt_residual(system, beta, weights) <= options.tol) {
        result.converged = true;
        break;
      }
      if (max_change == 0.0) break;
    }
  }

  if (options.polish) polish_active_set(system, weights, beta);
  result.kkt_residual = kkt_residual(system, beta, weights);
  if (!result.converged && result.kkt_residual <= options.tol) result.converged = true;
  result.objective = lasso_objective(system, weights, beta);
  result.coefficients = Coefficients(std::move(beta));
  return result;
}

std::string to_string(PenaltyScaling scaling) { return scaling == PenaltyScaling::stated ? "stated" : "per_entry"; }

PenaltyScaling parse_penalty_scaling(const std::string& name) {
  if (name == "stated") return PenaltyScaling::stated;
  if (name == "per_entry") return PenaltyScaling::per_entry;
  throw std::invalid_argument(fmt::format("unknown penalty scaling '{}' (stated | per_entry)", name));
}

double penalty_scale(PenaltyScaling scaling, const GramSystem& system) {
  return scaling == PenaltyScaling::per_entry ? static_cast<double>(system.p()) : 1.0;
}

Vector lla_weights(const PenaltySpec& spec, const Vector& beta, bool unpenalized_intercept) {
  Vector w(beta.size());
  for (Index k = 0; k < beta.size(); ++k) w[k] = penalty_deriv(spec, std::abs(beta[k]));
  if (unpenalized_intercept && beta.size() > 0) w[0] = 0.0;
  return w;
}

double penalized_objective(const GramSystem& system, const PenaltySpec& spec, const Vector& beta,
                           bool unpenalized_intercept, double penalty_scale) {
  const PenaltySpec shape = spec.with_lambda(spec.lambda() / penalty_scale);
  double pen = 0.0;
  for (Index k = unpenalized_intercept ? 1 : 0; k < beta.size(); ++k) pen += penalty_value(shape, std::abs(beta[k]));
  return loss(system, beta) + penalty_scale * pen;
}

FitResult lla(const GramSystem& system, const PenaltySpec& spec, const Coefficients& initial,
              const SolverOptions& options) {
  require_length(system, initial.beta(), "initial coefficients");
  const bool unpen = options.unpenalized_intercept;
  const double c = penalty_scale(options.scaling, system);
  const PenaltySpec shape = spec.with_lambda(spec.lambda() / c);
  auto weights_at = [&](const Vector& b) { return Vector(c * lla_weights(shape, b, unpen)); };
  auto objective_at = [&](const Vector& b) { return penalized_objective(system, spec, b, unpen, c); };

  Vector beta = initial.beta();
  Vector w = weights_at(beta);
  FitResult result;
  result.weights = w;
  result.objective_path.push_back(objective_at(beta));

  bool inner_converged = true;
  for (int outer = 1; outer <= options.max_outer; ++outer) {
    FitResult inner = weighted_lasso(system, w, options, beta);
    inner_converged = inner.converged;
    const Vector& next = inner.coefficients.beta();
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    result.objective_path.push_back(objective_at(beta));
    result.iterations = outer;
    result.weights = w;
    Vector next_w = weights_at(beta);
    if (change <= options.tol || next_w == w) {
      result.converged = inner_converged;
      break;
    }
    w = std::move(next_w);
  }

  result.kkt_residual = kkt_residual(system, beta, result.weights);
  result.objective = result.objective_path.back();
  result.coefficients = Coefficients(std::move(beta));
  return result;
}

double kkt_residual(const GramSystem& system, const Vector& beta, const Vector& weights) {
  require_length(system, beta, "beta");
  require_length(system, weights, "weights");
  const Vector grad = (system.gram() * beta - system.moments()) / static_cast<double>(system.p());
  double worst = 0.0;
  for (Index k = 0; k < beta.size(); ++k) {
    const double v = beta[k] != 0.0 ? std::abs(grad[k] + weights[k] * sign(beta[k]))
                                    : std::max(0.0, std::abs(grad[k]) - weights[k]);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace scr
