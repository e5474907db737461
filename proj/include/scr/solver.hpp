#pragma once

#include "scr/matrix.hpp"
#include "scr/penalty.hpp"

#include <span>
#include <string>
#include <vector>

namespace scr {

/**
 * Sufficient statistics of the Frobenius least-squares loss
 *
 *   Q_n(beta) = (2 n p)^-1 sum_i || y_i y_i^T - Sigma(beta) ||_F^2
 *             = (c - 2 beta^T m + beta^T G beta) / (2 p)
 *
 * with G = {tr(W_k W_l)}, m = {n^-1 sum_i y_i^T W_k y_i} and
 * c = n^-1 sum_i (y_i^T y_i)^2. Every solve below is (K+1)-dimensional.
 */
class GramSystem {
 public:
  GramSystem(Matrix gram, Vector moments, Index p, Index n, double c);

  const Matrix& gram() const { return gram_; }
  const Vector& moments() const { return moments_; }
  Index p() const { return p_; }
  Index n() const { return n_; }
  double c() const { return c_; }
  Index size() const { return moments_.size(); }

 private:
  Matrix gram_;
  Vector moments_;
  Index p_;
  Index n_;
  double c_;
};

/// observations are n x p, one replicate of the response per row.
GramSystem assemble_gram(const SimilarityBasis& basis, const Matrix& observations);

class Coefficients {
 public:
  /// |beta_k| <= kZeroTol counts as an exact zero for the support.
  static constexpr double kZeroTol = 1e-10;

  Coefficients() = default;
  explicit Coefficients(Vector beta);
  static Coefficients zeros(Index size) { return Coefficients(Vector::Zero(size)); }

  const Vector& beta() const { return beta_; }
  const std::vector<Index>& support() const { return support_; }
  Index size() const { return beta_.size(); }
  double operator[](Index k) const { return beta_[k]; }

 private:
  Vector beta_;
  std::vector<Index> support_;
};

struct FitResult {
  Coefficients coefficients;
  /// Coordinate-descent sweeps for weighted_lasso, outer iterations for lla.
  int iterations = 0;
  bool converged = false;
  /// Penalized objective at the returned coefficients.
  double objective = 0.0;
  double kkt_residual = 0.0;
  /// l1 weights of the (last) weighted-lasso problem that produced the fit.
  Vector weights;
  /// Objective after each sweep (weighted_lasso) or outer iteration,
  /// starting from the initial value (lla).
  std::vector<double> objective_path;
};

/**
 * How lambda is tied to the concave penalty shape. LLA solves
 *
 *   Q_n(beta) + sum_k c * p_{lambda/c}(|beta_k|),
 *
 * whose first (lasso) step always thresholds at level lambda. `stated` uses
 * c = 1, the loss exactly as written. `per_entry` uses c = p, the same
 * problem with the squared error averaged over all p^2 entries, which puts
 * the flat region of SCAD/MCP at gamma * lambda / p on the coefficient scale.
 */
enum class PenaltyScaling { stated, per_entry };

std::string to_string(PenaltyScaling scaling);
PenaltyScaling parse_penalty_scaling(const std::string& name);

struct SolverOptions {
  /// Coordinate descent stops when the max coefficient change and the KKT
  /// residual are both below tol.
  double tol = 1e-8;
  int max_iter = 10000;
  int max_outer = 50;
  /// Leaves coefficient 0 (the identity matrix) out of the penalty.
  bool unpenalized_intercept = true;
  /// Re-solves the active set exactly after coordinate descent when that
  /// keeps the sign pattern and does not increase the objective.
  bool polish = true;
  PenaltyScaling scaling = PenaltyScaling::stated;
};

/// c = 1 (stated) or c = p (per_entry).
double penalty_scale(PenaltyScaling scaling, const GramSystem& system);

/// n^-1 sum_i ||y_i y_i^T - Sigma(beta)||_F^2, clamped at 0.
double rss(const GramSystem& system, const Vector& beta);

/// Q_n(beta) = rss / (2p)
double loss(const GramSystem& system, const Vector& beta);

/// Sigma_W^-1 Sigma_WY via LDLT. Throws NumericalError when the Gram matrix
/// is singular or its condition number exceeds 1e12.
Coefficients ols(const GramSystem& system);

/// Least squares restricted to `support` (zeros elsewhere).
Coefficients oracle_fit(const GramSystem& system, std::span<const Index> support);

/// Uniform level lambda on every coordinate, except 0 when unpenalized_intercept.
Vector lasso_weights(Index size, double lambda, bool unpenalized_intercept);

/**
 * Cyclic coordinate descent on Q_n(beta) + sum_k w_k |beta_k|. Coordinates
 * are updated in ascending order; each update is the exact scalar minimizer
 *
 *   beta_k <- S(m_k - sum_{l != k} G_kl beta_l, p * w_k) / G_kk.
 *
 * Returns converged = false when max_iter sweeps are exhausted.
 */
FitResult weighted_lasso(const GramSystem& system, const Vector& weights, const SolverOptions& options = {});
FitResult weighted_lasso(const GramSystem& system, const Vector& weights, const SolverOptions& options,
                         const Vector& warm_start);

/// {p'_lambda(|beta_k|)}, with weight 0 on index 0 when unpenalized_intercept.
Vector lla_weights(const PenaltySpec& spec, const Vector& beta, bool unpenalized_intercept);

/// Q_n(beta) + c * sum_k p_{lambda/c}(|beta_k|), skipping index 0 when
/// unpenalized_intercept.
double penalized_objective(const GramSystem& system, const PenaltySpec& spec, const Vector& beta,
                           bool unpenalized_intercept, double penalty_scale = 1.0);

/**
 * Local linear approximation: starting from `initial`, repeatedly solve the
 * weighted lasso with weights c * p'_{lambda/c}(|beta^(m-1)|) (c from
 * options.scaling), warm-started at the previous iterate, until successive iterates differ by <= tol or the weight
 * vector repeats. `iterations` counts outer steps.
 */
FitResult lla(const GramSystem& system, const PenaltySpec& spec, const Coefficients& initial,
              const SolverOptions& options = {});

/// Max violation of the weighted-lasso optimality conditions, with
/// gradient (G beta - m) / p.
double kkt_residual(const GramSystem& system, const Vector& beta, const Vector& weights);

}  // namespace scr
