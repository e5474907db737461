#pragma once

#include "scr/random.hpp"
#include "scr/solver.hpp"
#include "scr/tuning.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace scr {

enum class ZDist { standard_normal, mixture_normal, standardized_exponential };
enum class WModel { bernoulli, correlated_ar };

std::string to_string(ZDist dist);
std::string to_string(WModel model);
/// "normal" | "mixture" | "exponential" (long enum spellings also accepted).
ZDist parse_z_dist(const std::string& name);
/// "bernoulli" | "correlated"
WModel parse_w_model(const std::string& name);

/// p i.i.d. draws: N(0,1); N(0,5/9) w.p. 0.9 else N(0,5); or Exp(1) - 1.
Vector generate_z(ZDist dist, Index p, Engine& rng);

/// (8, 1, 1, 1, 0, ..., 0) of length K + 1 (shorter K truncates).
Vector default_beta0(Index K);

struct DgpConfig {
  Index p = 200;
  Index K = 10;
  /// Rows of observations per replicate.
  Index n = 1;
  /// Empty means default_beta0(K).
  Vector beta0;
  ZDist z_dist = ZDist::standard_normal;
  WModel w_model = WModel::bernoulli;
  /// Bernoulli edge probability is edge_theta / p.
  double edge_theta = 5.0;
  /// AR correlation of the covariates in the correlated model.
  double ar_rho = 0.5;
  std::uint64_t seed = 1;
  /// Draw the similarity matrices from the base seed for every replicate.
  bool freeze_w = false;
};

struct DgpSample {
  SimilarityBasis basis;
  /// n x p
  Matrix observations;
  Coefficients truth;
  DenseSymMatrix sigma0;
  std::uint64_t seed = 0;
};

/// Replicate r uses seed config.seed + r. Similarity matrices are redrawn
/// (up to 10 times) until Sigma0 is positive definite, else NumericalError.
DgpSample dgp(const DgpConfig& config, Index replicate = 0);

enum class SimMethod { scad, mcp, lasso, ols, oracle };
std::string to_string(SimMethod method);
SimMethod parse_sim_method(const std::string& name);

/// Tuning defaults for the simulation harness: the concave penalty on the
/// per-entry scale.
inline TuningOptions per_entry_tuning() {
  TuningOptions t;
  t.solver.scaling = PenaltyScaling::per_entry;
  return t;
}

struct SimulationOptions {
  Index replications = 20;
  std::vector<SimMethod> methods{SimMethod::scad, SimMethod::mcp, SimMethod::ols, SimMethod::oracle};
  /// Concavity override for SCAD/MCP; <= 0 keeps the family default.
  double gamma = 0.0;
  TuningOptions tuning = per_entry_tuning();
};

struct MethodFit {
  Vector beta;
  double lambda = 0.0;
  double spectral_error = 0.0;
  double frobenius_error = 0.0;
  double kkt_residual = 0.0;
  bool converged = true;
};

struct ReplicationRecord {
  Index replicate = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  /// Parallel to SimulationOptions::methods.
  std::vector<MethodFit> fits;
};

struct MethodSummary {
  SimMethod method = SimMethod::scad;
  /// Unset for OLS, which does not select.
  std::optional<double> tpr, fpr, cs;
  double rmse = 0.0, bias = 0.0, sd = 0.0;
  double spectral = 0.0, frobenius = 0.0;
};

struct SimulationReport {
  DgpConfig config;
  SimulationOptions options;
  Index used = 0;
  Index failures = 0;
  std::vector<MethodSummary> rows;
  std::vector<ReplicationRecord> replications;
};

/// Runs one replicate end to end. Solver failures are reported through
/// `ok` / `error` rather than thrown.
ReplicationRecord run_replicate(const DgpConfig& config, const SimulationOptions& options, Index replicate);

/// Replicates run in parallel; aggregation follows replicate order.
SimulationReport run_replications(const DgpConfig& config, const SimulationOptions& options);

/// Summary metrics over the successful records (TPR, FPR, CS, RMSE, Bias, SD
/// with the (RK) and K denominators, mean spectral and p^-1/2 Frobenius errors).
std::vector<MethodSummary> summarize(const std::vector<ReplicationRecord>& records, const DgpConfig& config,
                                     const SimulationOptions& options);

/// CSV with one row per method; absent selection metrics print as NA.
void write_report_csv(std::ostream& out, const SimulationReport& report);

}  // namespace scr
