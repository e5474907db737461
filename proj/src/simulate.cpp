#include "scr/simulate.hpp"

#include "scr/error.hpp"
#include "scr/similarity.hpp"

#include <Eigen/Eigenvalues>
#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

namespace scr {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

constexpr int kMaxDgpAttempts = 10;

double spectral_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<SparseSymMatrix> draw_similarity(const DgpConfig& config, std::uint64_t base, int attempt) {
  std::vector<SparseSymMatrix> mats;
  mats.reserve(static_cast<std::size_t>(config.K) + 1);
  mats.push_back(SparseSymMatrix::identity(config.p));
  const std::uint64_t seed = derive_seed(base, stream::similarity, static_cast<std::uint64_t>(attempt));
  if (config.w_model == WModel::bernoulli) {
    const double prob = config.edge_theta / static_cast<double>(config.p);
    for (Index k = 1; k <= config.K; ++k) {
      mats.push_back(bernoulli_similarity(config.p, prob, derive_seed(seed, stream::similarity, static_cast<std::uint64_t>(k))));
    }
    return mats;
  }
  // Covariates x_j ~ N_K(0, (rho^|k1-k2|)), one row per subject.
  Matrix ar(config.K, config.K);
  for (Index a = 0; a < config.K; ++a)
    for (Index b = 0; b < config.K; ++b) ar(a, b) = std::pow(config.ar_rho, std::abs(static_cast<double>(a - b)));
  const Matrix chol = Eigen::LLT<Matrix>(ar).matrixL();
  Engine rng(derive_seed(seed, stream::covariates));
  boost::random::normal_distribution<double> normal;
  Matrix z(config.p, config.K);
  for (Index j = 0; j < config.p; ++j)
    for (Index k = 0; k < config.K; ++k) z(j, k) = normal(rng);
  const Matrix x = z * chol.transpose();
  for (Index k = 0; k < config.K; ++k) mats.push_back(correlated_similarity(x.col(k)));
  return mats;
}

bool selects(const ReplicationRecord& r, std::size_t m, Index k) {
  return std::abs(r.fits[m].beta[k]) > Coefficients::kZeroTol;
}

}  // namespace

std::string to_string(ZDist dist) {
  switch (dist) {
    case ZDist::standard_normal:
      return "normal";
    case ZDist::mixture_normal:
      return "mixture";
    case ZDist::standardized_exponential:
      return "exponential";
  }
  return "unknown";
}

std::string to_string(WModel model) { return model == WModel::bernoulli ? "bernoulli" : "correlated"; }

ZDist parse_z_dist(const std::string& name) {
  const std::string s = lower(name);
  if (s == "normal" || s == "standard_normal") return ZDist::standard_normal;
  if (s == "mixture" || s == "mixture_normal") return ZDist::mixture_normal;
  if (s == "exponential" || s == "standardized_exponential") return ZDist::standardized_exponential;
  throw std::invalid_argument(fmt::format("unknown Z distribution '{}'", name));
}

WModel parse_w_model(const std::string& name) {
  const std::string s = lower(name);
  if (s == "bernoulli") return WModel::bernoulli;
  if (s == "correlated" || s == "correlated_ar") return WModel::correlated_ar;
  throw std::invalid_argument(fmt::format("unknown similarity model '{}'", name));
}

Vector generate_z(ZDist dist, Index p, Engine& rng) {
  Vector z(p);
  switch (dist) {
    case ZDist::standard_normal: {
      boost::random::normal_distribution<double> normal;
      for (Index j = 0; j < p; ++j) z[j] = normal(rng);
      break;
    }
    case ZDist::mixture_normal: {
      boost::random::bernoulli_distribution<double> narrow(0.9);
      boost::random::normal_distribution<double> normal;
      const double small = std::sqrt(5.0 / 9.0);
      const double large = std::sqrt(5.0);
      for (Index j = 0; j < p; ++j) {
        const double scale = narrow(rng) ? small : large;
        z[j] = scale * normal(rng);
      }
      break;
    }
    case ZDist::standardized_exponential: {
      boost::random::exponential_distribution<double> expo(1.0);
      for (Index j = 0; j < p; ++j) z[j] = expo(rng) - 1.0;
      break;
    }
  }
  return z;
}

Vector default_beta0(Index K) {
  Vector b = Vector::Zero(K + 1);
  b[0] = 8.0;
  for (Index k = 1; k <= std::min<Index>(3, K); ++k) b[k] = 1.0;
  return b;
}

DgpSample dgp(const DgpConfig& config, Index replicate) {
  if (config.p < 2 || config.K < 1 || config.n < 1) throw std::invalid_argument("DGP needs p >= 2, K >= 1, n >= 1");
  if (replicate < 0) throw std::invalid_argument("replicate index must be >= 0");
  const Vector beta0 = config.beta0.size() == 0 ? default_beta0(config.K) : config.beta0;
  if (beta0.size() != config.K + 1) {
    throw std::invalid_argument(fmt::format("beta0 has length {}, expected K + 1 = {}", beta0.size(), config.K + 1));
  }
  if (config.w_model == WModel::bernoulli && !(config.edge_theta > 0.0 && config.edge_theta < static_cast<double>(config.p))) {
    throw std::invalid_argument("edge probability theta / p must lie in (0, 1)");
  }

  DgpSample out;
  out.seed = config.seed + static_cast<std::uint64_t>(replicate);
  const std::uint64_t w_base = config.freeze_w ? config.seed : out.seed;

  for (int attempt = 0; attempt < kMaxDgpAttempts; ++attempt) {
    SimilarityBasis basis(draw_similarity(config, w_base, attempt));
    DenseSymMatrix sigma0 = densify(basis, beta0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma0.matrix());
    if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0)) continue;

    const Matrix& v = eig.eigenvectors();
    const Matrix root = v * eig.eigenvalues().cwiseSqrt().asDiagonal() * v.transpose();
    Engine rng(derive_seed(out.seed, stream::noise));
    Matrix z(config.n, config.p);
    for (Index i = 0; i < config.n; ++i) z.row(i) = generate_z(config.z_dist, config.p, rng).transpose();

    out.observations = z * root;
    out.basis = std::move(basis);
    out.sigma0 = std::move(sigma0);
    out.truth = Coefficients(beta0);
    return out;
  }
  throw NumericalError(fmt::format("Sigma0 not positive definite after {} draws (replicate {})", kMaxDgpAttempts, replicate));
}

std::string to_string(SimMethod method) {
  switch (method) {
    case SimMethod::scad:
      return "SCAD";
    case SimMethod::mcp:
      return "MCP";
    case SimMethod::lasso:
      return "LASSO";
    case SimMethod::ols:
      return "OLS";
    case SimMethod::oracle:
      return "ORACLE";
  }
  return "unknown";
}

SimMethod parse_sim_method(const std::string& name) {
  const std::string s = lower(name);
  if (s == "scad") return SimMethod::scad;
  if (s == "mcp") return SimMethod::mcp;
  if (s == "lasso") return SimMethod::lasso;
  if (s == "ols") return SimMethod::ols;
  if (s == "oracle") return SimMethod::oracle;
  throw std::invalid_argument(fmt::format("unknown simulation method '{}'", name));
}

ReplicationRecord run_replicate(const DgpConfig& config, const SimulationOptions& options, Index replicate) {
  ReplicationRecord rec;
  rec.replicate = replicate;
  rec.seed = config.seed + static_cast<std::uint64_t>(replicate);
  try {
    const DgpSample sample = dgp(config, replicate);
    const GramSystem system = assemble_gram(sample.basis, sample.observations);
    const Vector& truth = sample.truth.beta();
    const auto p = static_cast<double>(config.p);
    std::optional<std::vector<double>> grid;

    for (SimMethod method : options.methods) {
      MethodFit fit;
      switch (method) {
        case SimMethod::scad:
        case SimMethod::mcp:
        case SimMethod::lasso: {
          if (!grid) grid = default_lambda_grid(system, options.tuning);
          const PenaltyFamily family = method == SimMethod::scad  ? PenaltyFamily::scad
                                       : method == SimMethod::mcp ? PenaltyFamily::mcp
                                                                  : PenaltyFamily::lasso;
          const TuningResult tuned =
              select_lambda(system, PenaltySpec::make(family, 1.0, options.gamma), *grid, options.tuning);
          fit.beta = tuned.best_fit.coefficients.beta();
          fit.lambda = tuned.best_lambda;
          fit.kkt_residual = tuned.best_fit.kkt_residual;
          fit.converged = tuned.best_fit.converged;
          break;
        }
        case SimMethod::ols:
          fit.beta = ols(system).beta();
          break;
        case SimMethod::oracle:
          fit.beta = oracle_fit(system, sample.truth.support()).beta();
          break;
      }
      const Vector delta = fit.beta - truth;
      // ||Sigma(delta)||_F^2 = delta^T G delta
      fit.frobenius_error = std::sqrt(std::max(delta.dot(system.gram() * delta), 0.0) / p);
      fit.spectral_error = spectral_norm(densify(sample.basis, delta).matrix());
      rec.fits.push_back(std::move(fit));
    }
  } catch (const NumericalError& e) {
    rec.ok = false;
    rec.error = e.what();
    rec.fits.clear();
  }
  return rec;
}

SimulationReport run_replications(const DgpConfig& config, const SimulationOptions& options) {
  if (options.replications < 1) throw std::invalid_argument("need at least one replication");
  if (options.methods.empty()) throw std::invalid_argument("no simulation methods requested");
  SimulationReport report;
  report.config = config;
  report.options = options;
  report.replications.resize(static_cast<std::size_t>(options.replications));

#pragma omp parallel for schedule(dynamic)
  for (Index r = 0; r < options.replications; ++r) {
    report.replications[static_cast<std::size_t>(r)] = run_replicate(config, options, r);
  }

  for (const auto& rec : report.replications) {
    if (rec.ok) {
      ++report.used;
    } else {
      ++report.failures;
      fmt::print(stderr, "warning: replicate {} (seed {}) excluded: {}\n", rec.replicate, rec.seed, rec.error);
    }
  }
  if (report.used == 0) throw NumericalError("every replication failed");
  report.rows = summarize(report.replications, config, options);
  return report;
}

std::vector<MethodSummary> summarize(const std::vector<ReplicationRecord>& records, const DgpConfig& config,
                                     const SimulationOptions& options) {
  const Vector beta0 = config.beta0.size() == 0 ? default_beta0(config.K) : config.beta0;
  std::set<Index> truth;
  for (Index k = 0; k < beta0.size(); ++k)
    if (std::abs(beta0[k]) > Coefficients::kZeroTol) truth.insert(k);

  std::vector<const ReplicationRecord*> used;
  for (const auto& r : records)
    if (r.ok) used.push_back(&r);
  const auto R = static_cast<double>(used.size());
  const auto K = static_cast<double>(config.K);
  const Index size = config.K + 1;

  std::vector<MethodSummary> rows;
  for (std::size_t m = 0; m < options.methods.size(); ++m) {
    MethodSummary row;
    row.method = options.methods[m];
    if (used.empty()) {
      rows.push_back(row);
      continue;
    }
    Vector mean = Vector::Zero(size);
    double tpr = 0.0, fpr = 0.0, cs = 0.0, sq = 0.0;
    for (const auto* r : used) {
      const Vector& b = r->fits[m].beta;
      mean += b;
      sq += (b - beta0).squaredNorm();
      row.spectral += r->fits[m].spectral_error;
      row.frobenius += r->fits[m].frobenius_error;

      Index hits = 0, selected = 0;
      bool exact = true;
      for (Index k = 0; k < size; ++k) {
        const bool sel = selects(*r, m, k);
        const bool real = truth.count(k) > 0;
        selected += sel;
        hits += sel && real;
        exact = exact && (sel == real);
      }
      tpr += static_cast<double>(hits) / static_cast<double>(truth.size());
      if (selected > 0) fpr += static_cast<double>(selected - hits) / static_cast<double>(selected);
      cs += exact ? 1.0 : 0.0;
    }
    mean /= R;
    double var = 0.0;
    for (const auto* r : used) var += (r->fits[m].beta - mean).squaredNorm();

    if (options.methods[m] != SimMethod::ols) {
      row.tpr = tpr / R;
      row.fpr = fpr / R;
      row.cs = cs / R;
    }
    row.rmse = std::sqrt(sq / (R * K));
    row.bias = (mean - beta0).cwiseAbs().sum() / K;
    row.sd = std::sqrt(var / (R * K));
    row.spectral /= R;
    row.frobenius /= R;
    rows.push_back(row);
  }
  return rows;
}

void write_report_csv(std::ostream& out, const SimulationReport& report) {
  auto num = [](double v) { return fmt::format("{:.17g}", v); };
  auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string("NA"); };
  fmt::print(out, "method,replications,failures,tpr,fpr,cs,rmse,bias,sd,spectral,frobenius\n");
  for (const auto& row : report.rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", to_string(row.method), report.used, report.failures,
               opt(row.tpr), opt(row.fpr), opt(row.cs), num(row.rmse), num(row.bias), num(row.sd), num(row.spectral),
               num(row.frobenius));
  }
}

}  // namespace scr
