#include "scr/app.hpp"

#include "scr/backtest.hpp"
#include "scr/error.hpp"
#include "scr/factor.hpp"
#include "scr/inference.hpp"
#include "scr/io.hpp"
#include "scr/parallel.hpp"
#include "scr/similarity.hpp"
#include "scr/simulate.hpp"
#include "scr/solver.hpp"
#include "scr/tuning.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

namespace scr::app {

using nlohmann::json;

json default_config() {
  return json{
      {"seed", 1},
      {"threads", 0},
      {"penalty", {{"family", "scad"}, {"gamma", 0.0}, {"lambda", nullptr}, {"lambda0", nullptr}, {"scaling", "per_entry"}}},
      {"solver", {{"tol", 1e-8}, {"max_iter", 10000}, {"max_outer", 50}, {"unpenalized_intercept", true}}},
      {"tuning", {{"n_lambda", 50}, {"lambda_min_ratio", 1e-3}, {"grid", json::array()}, {"warm_start", true}}},
      {"data",
       {{"responses", nullptr},
        {"covariates", nullptr},
        {"labels", json::array()},
        {"edges", json::array()},
        {"triplets", json::array()},
        {"constructions", {"kernel", "outer"}},
        {"kernel_density", 0.25},
        {"bandwidth", kDefaultKernelBandwidth},
        {"standardize_covariates", true},
        {"rescale", true},
        {"standardize", false}}},
      {"inference", {{"standard_errors", false}, {"mu4", 3.0}}},
      {"simulate",
       {{"p", 200},
        {"k", 10},
        {"n", 1},
        {"dist", "normal"},
        {"w_model", "bernoulli"},
        {"edge_theta", 5.0},
        {"replications", 20},
        {"freeze_w", false},
        {"methods", {"scad", "mcp", "ols", "oracle"}}}},
      {"backtest",
       {{"returns", nullptr},
        {"window", 60},
        {"methods", {"sample", "lw", "scr"}},
        {"factors", nullptr},
        {"characteristics", nullptr},
        {"market_caps", nullptr},
        {"risk_free", 0.0},
        {"repair_eps", kDefaultRepairEps},
        {"standardize", true}}},
      {"portfolio", {{"method", "scr"}, {"covariance", nullptr}}},
      {"out", nullptr},
  };
}

namespace {

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::vector<std::string> string_list(const json& j) {
  if (j.is_null()) return {};
  if (j.is_string()) return {j.get<std::string>()};
  return j.get<std::vector<std::string>>();
}

void check_p(Index got, Index p, const std::string& source) {
  if (got != p) throw DataError(fmt::format("{} describes {} subjects but the panel has {}", source, got, p));
}

// --- configuration -----------------------------------------------------------

using Override = std::function<void(json&)>;

template <typename T>
void bind_option(CLI::App* sub, std::vector<Override>& overrides, const std::string& flag, const std::string& pointer,
          const std::string& help) {
  auto holder = std::make_shared<T>();
  CLI::Option* opt = sub->add_option(flag, *holder, help);
  overrides.push_back([opt, holder, pointer](json& j) {
    if (opt->count() > 0) j[json::json_pointer(pointer)] = *holder;
  });
}

void bind_flag(CLI::App* sub, std::vector<Override>& overrides, const std::string& flag, const std::string& pointer,
               bool value, const std::string& help) {
  CLI::Option* opt = sub->add_flag(flag, help);
  overrides.push_back([opt, pointer, value](json& j) {
    if (opt->count() > 0) j[json::json_pointer(pointer)] = value;
  });
}

void add_shared(CLI::App* sub, std::vector<Override>& ov, std::string& config_path) {
  sub->add_option("--config", config_path, "JSON config file; flags override its values");
  bind_option<std::uint64_t>(sub, ov, "--seed", "/seed", "Base random seed");
  bind_option<std::string>(sub, ov, "--out", "/out", "Output file (stdout when omitted)");
  bind_option<std::string>(sub, ov, "--penalty", "/penalty/family", "lasso | scad | mcp");
  bind_option<double>(sub, ov, "--gamma", "/penalty/gamma", "Concavity parameter (family default when omitted)");
  bind_option<double>(sub, ov, "--lambda", "/penalty/lambda", "Penalty level");
  bind_option<int>(sub, ov, "--threads", "/threads", "OpenMP threads (0 = runtime default)");
  bind_option<std::string>(sub, ov, "--penalty-scaling", "/penalty/scaling", "per_entry | stated");
}

void add_data(CLI::App* sub, std::vector<Override>& ov) {
  bind_option<std::string>(sub, ov, "--responses", "/data/responses", "Response CSV: rows = replicates, columns = subjects");
  bind_option<std::string>(sub, ov, "--covariates", "/data/covariates", "Covariate CSV: rows = subjects, named columns");
  bind_option<std::vector<std::string>>(sub, ov, "--labels", "/data/labels", "subject,label CSV (repeatable)");
  bind_option<std::vector<std::string>>(sub, ov, "--edges", "/data/edges", "Edge list `i j` (repeatable)");
  bind_option<std::vector<std::string>>(sub, ov, "--triplets", "/data/triplets", "Triplet file `i j value` (repeatable)");
  bind_option<std::vector<std::string>>(sub, ov, "--constructions", "/data/constructions", "kernel and/or outer");
  bind_option<double>(sub, ov, "--kernel-density", "/data/kernel_density", "Fraction of kernel pairs kept");
  bind_option<double>(sub, ov, "--bandwidth", "/data/bandwidth", "Kernel bandwidth");
  bind_flag(sub, ov, "--no-rescale", "/data/rescale", false, "Skip l1 rescaling of similarity matrices");
  bind_flag(sub, ov, "--standardize", "/data/standardize", true, "Standardize responses per subject first");
}

void add_tuning(CLI::App* sub, std::vector<Override>& ov) {
  bind_option<std::vector<double>>(sub, ov, "--lambda-grid", "/tuning/grid", "Explicit lambda grid");
  bind_option<double>(sub, ov, "--lambda-min-ratio", "/tuning/lambda_min_ratio", "Smallest grid value / lambda_max");
  bind_option<int>(sub, ov, "--n-lambda", "/tuning/n_lambda", "Grid size");
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open config '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(fmt::format("config '{}': {}", path, e.what()));
  }
}

SolverOptions solver_options(const json& cfg) {
  SolverOptions o;
  o.tol = cfg.at("/solver/tol"_json_pointer).get<double>();
  o.max_iter = cfg.at("/solver/max_iter"_json_pointer).get<int>();
  o.max_outer = cfg.at("/solver/max_outer"_json_pointer).get<int>();
  o.unpenalized_intercept = cfg.at("/solver/unpenalized_intercept"_json_pointer).get<bool>();
  o.scaling = parse_penalty_scaling(cfg.at("/penalty/scaling"_json_pointer).get<std::string>());
  return o;
}

TuningOptions tuning_options(const json& cfg) {
  TuningOptions t;
  t.n_lambda = cfg.at("/tuning/n_lambda"_json_pointer).get<int>();
  t.lambda_min_ratio = cfg.at("/tuning/lambda_min_ratio"_json_pointer).get<double>();
  t.warm_start = cfg.at("/tuning/warm_start"_json_pointer).get<bool>();
  t.solver = solver_options(cfg);
  return t;
}

PenaltySpec penalty_spec(const json& cfg, double lambda) {
  return PenaltySpec::make(parse_penalty_family(cfg.at("/penalty/family"_json_pointer).get<std::string>()), lambda,
                           cfg.at("/penalty/gamma"_json_pointer).get<double>());
}

// --- output ------------------------------------------------------------------

class Output {
 public:
  Output(const json& cfg, std::ostream& fallback) : stream_(&fallback) {
    if (!cfg["out"].is_null()) {
      file_.open(cfg["out"].get<std::string>());
      if (!file_) throw DataError(fmt::format("cannot write '{}'", cfg["out"].get<std::string>()));
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_header(std::ostream& out, const json& cfg) { fmt::print(out, "# config: {}\n", cfg.dump()); }

std::string csv_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); }

// --- subcommands -------------------------------------------------------------

struct Problem {
  Panel responses;
  SimilarityBasis basis;
  Matrix data;
  GramSystem system;
};

Problem load_problem(const json& cfg) {
  const json& data = cfg["data"];
  if (data["responses"].is_null()) throw DataError("--responses is required");
  Panel responses = load_panel(data["responses"].get<std::string>());
  SimilarityBasis basis = build_basis(data, responses.data.cols());
  Matrix y = responses.data;
  if (data["standardize"].get<bool>()) y = standardize(y).data;
  GramSystem system = assemble_gram(basis, y);
  return {std::move(responses), std::move(basis), std::move(y), std::move(system)};
}

json fit_json(const FitResult& fit, const SimilarityBasis& basis) {
  const Vector& b = fit.coefficients.beta();
  json out;
  out["names"] = basis.names();
  out["beta"] = std::vector<double>(b.data(), b.data() + b.size());
  out["support"] = fit.coefficients.support();
  out["iterations"] = fit.iterations;
  out["converged"] = fit.converged;
  out["objective"] = fit.objective;
  out["kkt_residual"] = fit.kkt_residual;
  return out;
}

json standard_errors(const json& cfg, const Problem& prob, const Coefficients& coef) {
  const auto& support = coef.support();
  const SimilarityBasis sub = prob.basis.subset(support);
  const DenseSymMatrix sigma = densify(prob.basis, coef.beta());
  const json& mu4_cfg = cfg.at("/inference/mu4"_json_pointer);
  double mu4 = 3.0;
  if (mu4_cfg.is_string()) {
    if (mu4_cfg.get<std::string>() != "estimate") throw DataError("inference.mu4 must be a number or \"estimate\"");
    mu4 = estimate_mu4(prob.data, sigma);
  } else {
    mu4 = mu4_cfg.get<double>();
  }
  const AsymptoticCovariance cov = sandwich_covariance(sub, sigma, mu4, prob.data.rows());
  const Vector se = cov.standard_errors();
  json out;
  out["mu4"] = mu4;
  out["plug_in"] = true;
  json entries = json::object();
  for (std::size_t a = 0; a < support.size(); ++a) {
    entries[prob.basis.names()[static_cast<std::size_t>(support[a])]] = se[static_cast<Index>(a)];
  }
  out["values"] = entries;
  return out;
}

FitResult fit_at(const GramSystem& system, const PenaltySpec& spec, double lambda0, const SolverOptions& opts) {
  const FitResult lasso = weighted_lasso(system, lasso_weights(system.size(), lambda0, opts.unpenalized_intercept), opts);
  if (spec.family() == PenaltyFamily::lasso && lambda0 == spec.lambda()) return lasso;
  return lla(system, spec, lasso.coefficients, opts);
}

int cmd_fit(const json& cfg, std::ostream& out) {
  const json& lam = cfg.at("/penalty/lambda"_json_pointer);
  if (lam.is_null()) throw std::invalid_argument("fit requires --lambda (use `tune` to select one)");
  const double lambda = lam.get<double>();
  const json& lam0 = cfg.at("/penalty/lambda0"_json_pointer);
  const double lambda0 = lam0.is_null() ? lambda : lam0.get<double>();

  const Problem prob = load_problem(cfg);
  const SolverOptions opts = solver_options(cfg);
  const FitResult fit = fit_at(prob.system, penalty_spec(cfg, lambda), lambda0, opts);

  json result = fit_json(fit, prob.basis);
  result["lambda"] = lambda;
  result["lambda0"] = lambda0;
  result["p"] = prob.system.p();
  result["n"] = prob.system.n();
  if (cfg.at("/inference/standard_errors"_json_pointer).get<bool>()) {
    result["standard_errors"] = standard_errors(cfg, prob, fit.coefficients);
  }
  result["config"] = cfg;
  Output o(cfg, out);
  o.stream() << result.dump(2) << '\n';
  return 0;
}

int cmd_tune(const json& cfg, std::ostream& out, const std::string& fit_out) {
  const Problem prob = load_problem(cfg);
  const TuningOptions topts = tuning_options(cfg);
  std::vector<double> grid = cfg.at("/tuning/grid"_json_pointer).get<std::vector<double>>();
  if (grid.empty()) grid = default_lambda_grid(prob.system, topts);
  const TuningResult tuned = select_lambda(prob.system, penalty_spec(cfg, 1.0), grid, topts);

  Output o(cfg, out);
  write_header(o.stream(), cfg);
  fmt::print(o.stream(), "# best_lambda: {}\n", format_double(tuned.best_lambda));
  fmt::print(o.stream(), "lambda,df,rss,bic\n");
  for (std::size_t i = 0; i < tuned.lambda_grid.size(); ++i) {
    fmt::print(o.stream(), "{},{},{},{}\n", format_double(tuned.lambda_grid[i]), tuned.df[i],
               format_double(tuned.rss[i]), format_double(tuned.scores[i]));
  }
  if (!fit_out.empty()) {
    json result = fit_json(tuned.best_fit, prob.basis);
    result["lambda"] = tuned.best_lambda;
    result["config"] = cfg;
    std::ofstream f(fit_out);
    if (!f) throw DataError(fmt::format("cannot write '{}'", fit_out));
    f << result.dump(2) << '\n';
  }
  return 0;
}

int cmd_simulate(const json& cfg, std::ostream& out, std::ostream& err, const std::string& replicates_out) {
  const json& s = cfg["simulate"];
  DgpConfig dgp_cfg;
  dgp_cfg.p = s["p"].get<Index>();
  dgp_cfg.K = s["k"].get<Index>();
  dgp_cfg.n = s["n"].get<Index>();
  dgp_cfg.z_dist = parse_z_dist(s["dist"].get<std::string>());
  dgp_cfg.w_model = parse_w_model(s["w_model"].get<std::string>());
  dgp_cfg.edge_theta = s["edge_theta"].get<double>();
  dgp_cfg.freeze_w = s["freeze_w"].get<bool>();
  dgp_cfg.seed = cfg["seed"].get<std::uint64_t>();

  SimulationOptions opts;
  opts.replications = s["replications"].get<Index>();
  opts.gamma = cfg.at("/penalty/gamma"_json_pointer).get<double>();
  opts.tuning = tuning_options(cfg);
  opts.methods.clear();
  for (const auto& m : string_list(s["methods"])) opts.methods.push_back(parse_sim_method(m));

  const SimulationReport report = run_replications(dgp_cfg, opts);
  if (report.failures > 0) fmt::print(err, "{} of {} replications failed and were excluded\n", report.failures, opts.replications);

  Output o(cfg, out);
  write_header(o.stream(), cfg);
  write_report_csv(o.stream(), report);

  if (!replicates_out.empty()) {
    std::ofstream f(replicates_out);
    if (!f) throw DataError(fmt::format("cannot write '{}'", replicates_out));
    write_header(f, cfg);
    fmt::print(f, "replicate,seed,method,lambda,df,spectral,frobenius,kkt_residual,beta\n");
    for (const auto& rec : report.replications) {
      if (!rec.ok) continue;
      for (std::size_t m = 0; m < rec.fits.size(); ++m) {
        const MethodFit& fit = rec.fits[m];
        std::vector<std::string> beta;
        Index df = 0;
        for (Index k = 0; k < fit.beta.size(); ++k) {
          beta.push_back(format_double(fit.beta[k]));
          df += std::abs(fit.beta[k]) > Coefficients::kZeroTol;
        }
        fmt::print(f, "{},{},{},{},{},{},{},{},{}\n", rec.replicate, rec.seed, to_string(opts.methods[m]),
                   format_double(fit.lambda), df, format_double(fit.spectral_error), format_double(fit.frobenius_error),
                   format_double(fit.kkt_residual), fmt::join(beta, ";"));
      }
    }
  }
  return 0;
}

BacktestInputs backtest_inputs(const json& cfg, Panel& returns) {
  const json& b = cfg["backtest"];
  if (b["returns"].is_null()) throw DataError("--returns is required");
  returns = load_panel(b["returns"].get<std::string>());
  const Index p = returns.data.cols();
  BacktestInputs in;
  in.returns = returns.data;
  if (!b["factors"].is_null()) in.factors = load_panel(b["factors"].get<std::string>()).data;
  if (!b["characteristics"].is_null()) {
    Matrix x = load_panel(b["characteristics"].get<std::string>()).data;
    check_p(x.rows(), p, "characteristics file");
    if (cfg.at("/data/standardize_covariates"_json_pointer).get<bool>()) x = standardize(x).data;
    in.characteristics = std::move(x);
  }
  if (!b["market_caps"].is_null()) in.market_caps = load_vector(b["market_caps"].get<std::string>());
  const json& d = cfg["data"];
  const bool has_similarity = !d["covariates"].is_null() || !string_list(d["labels"]).empty() ||
                              !string_list(d["edges"]).empty() || !string_list(d["triplets"]).empty();
  if (has_similarity) in.basis = build_basis(d, p);
  return in;
}

ScrSettings scr_settings(const json& cfg) {
  ScrSettings s;
  s.penalty = penalty_spec(cfg, 1.0);
  s.tuning = tuning_options(cfg);
  s.standardize = cfg.at("/backtest/standardize"_json_pointer).get<bool>();
  return s;
}

int cmd_backtest(const json& cfg, std::ostream& out, const std::string& returns_out) {
  Panel returns;
  const BacktestInputs in = backtest_inputs(cfg, returns);
  BacktestOptions opts;
  opts.window = cfg.at("/backtest/window"_json_pointer).get<Index>();
  opts.risk_free = cfg.at("/backtest/risk_free"_json_pointer).get<double>();
  opts.repair_eps = cfg.at("/backtest/repair_eps"_json_pointer).get<double>();
  const BacktestResult result =
      rolling_backtest(in, string_list(cfg.at("/backtest/methods"_json_pointer)), scr_settings(cfg), opts);

  Output o(cfg, out);
  write_header(o.stream(), cfg);
  fmt::print(o.stream(), "method,periods,mean,sd,sharpe,alpha,beta,cqgr\n");
  for (const auto& m : result.methods) {
    const auto& r = m.report;
    fmt::print(o.stream(), "{},{},{},{},{},{},{},{}\n", m.method, r.period_returns.size(), format_double(r.mean),
               format_double(r.sd), csv_number(r.sharpe), csv_number(r.alpha), csv_number(r.beta),
               format_double(r.cqgr));
  }
  if (!returns_out.empty()) {
    Matrix table(static_cast<Index>(result.periods.size()), static_cast<Index>(result.methods.size()) + 1);
    std::vector<std::string> names{"period"};
    for (std::size_t i = 0; i < result.periods.size(); ++i) table(static_cast<Index>(i), 0) = static_cast<double>(result.periods[i]);
    for (std::size_t m = 0; m < result.methods.size(); ++m) {
      names.push_back(result.methods[m].method);
      for (std::size_t i = 0; i < result.periods.size(); ++i) {
        table(static_cast<Index>(i), static_cast<Index>(m) + 1) = result.methods[m].report.period_returns[i];
      }
    }
    write_matrix_csv(returns_out, table, names, {"config: " + cfg.dump()});
  }
  return 0;
}

int cmd_portfolio(const json& cfg, std::ostream& out) {
  const json& pcfg = cfg["portfolio"];
  DenseSymMatrix sigma;
  std::vector<std::string> assets;
  if (!pcfg["covariance"].is_null()) {
    const Panel cov = load_panel(pcfg["covariance"].get<std::string>());
    if (cov.data.rows() != cov.data.cols()) throw DataError("covariance file must be square");
    sigma = DenseSymMatrix(cov.data);
    assets = cov.names;
  } else {
    Panel returns;
    const BacktestInputs in = backtest_inputs(cfg, returns);
    const CovarianceEstimator est = make_estimator(pcfg["method"].get<std::string>(), in, scr_settings(cfg));
    const Index window = std::min<Index>(cfg.at("/backtest/window"_json_pointer).get<Index>(), in.returns.rows());
    const Index first = in.returns.rows() - window;
    sigma = est(in.returns.bottomRows(window), first);
    assets = returns.names;
  }
  const double eps = cfg.at("/backtest/repair_eps"_json_pointer).get<double>();
  const Vector w = gmv_weights(pd_repair(sigma, eps));

  Output o(cfg, out);
  write_header(o.stream(), cfg);
  fmt::print(o.stream(), "asset,weight\n");
  for (Index j = 0; j < w.size(); ++j) fmt::print(o.stream(), "{},{}\n", assets[static_cast<std::size_t>(j)], format_double(w[j]));
  return 0;
}

}  // namespace

SimilarityBasis build_basis(const json& data, Index p) {
  std::vector<SparseSymMatrix> mats{SparseSymMatrix::identity(p)};
  std::vector<std::string> names{"I"};

  if (!data["covariates"].is_null()) {
    const Panel cov = load_panel(data["covariates"].get<std::string>());
    check_p(cov.data.rows(), p, "covariate file");
    Matrix x = cov.data;
    if (data.value("standardize_covariates", true)) x = standardize(x).data;
    bool kernel = false, outer = false;
    for (const auto& c : string_list(data["constructions"])) {
      if (c == "kernel") kernel = true;
      else if (c == "outer") outer = true;
      else throw std::invalid_argument(fmt::format("unknown similarity construction '{}'", c));
    }
    const double density = data["kernel_density"].get<double>();
    const double bandwidth = data["bandwidth"].get<double>();
    for (Index k = 0; k < x.cols(); ++k) {
      const std::string& name = cov.names[static_cast<std::size_t>(k)];
      if (kernel) {
        mats.push_back(kernel_similarity(x.col(k), bandwidth, density));
        names.push_back("kernel:" + name);
      }
      if (outer) {
        mats.push_back(outerproduct_similarity(x.col(k)));
        names.push_back("outer:" + name);
      }
    }
  }
  for (const auto& path : string_list(data["labels"])) {
    const auto labels = load_labels(path);
    check_p(static_cast<Index>(labels.size()), p, "label file '" + path + "'");
    mats.push_back(indicator_similarity(labels));
    names.push_back("labels:" + stem(path));
  }
  for (const auto& path : string_list(data["edges"])) {
    try {
      mats.push_back(edge_similarity(load_edges(path), p));
    } catch (const std::invalid_argument& e) {
      throw DataError(fmt::format("'{}': {}", path, e.what()));
    }
    names.push_back("edges:" + stem(path));
  }
  for (const auto& path : string_list(data["triplets"])) {
    try {
      mats.push_back(read_triplet_file(path, p));
    } catch (const std::invalid_argument& e) {
      throw DataError(fmt::format("'{}': {}", path, e.what()));
    }
    names.push_back("triplets:" + stem(path));
  }

  if (data.value("rescale", true)) {
    for (std::size_t k = 1; k < mats.size(); ++k) {
      if (mats[k].l1_norm() == 0.0) throw DataError(fmt::format("similarity matrix '{}' is identically zero", names[k]));
      mats[k] = rescale_l1(mats[k]);
    }
  }
  return SimilarityBasis(std::move(mats), std::move(names));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse covariance regression: fitting, tuning, simulation and portfolio backtests", "scr"};
  app.require_subcommand(1);

  std::string config_path;
  std::string fit_out;
  std::string replicates_out;
  std::string returns_out;
  std::map<CLI::App*, std::vector<Override>> overrides;

  auto* fit = app.add_subcommand("fit", "Penalized fit at a fixed lambda");
  auto* tune = app.add_subcommand("tune", "BIC selection of lambda over a grid");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo replications of the simulation design");
  auto* bt = app.add_subcommand("backtest", "Rolling-window GMV backtest");
  auto* pf = app.add_subcommand("portfolio", "GMV weights from one covariance estimate");

  for (auto* sub : {fit, tune, sim, bt, pf}) add_shared(sub, overrides[sub], config_path);
  for (auto* sub : {fit, tune, bt, pf}) add_data(sub, overrides[sub]);
  add_tuning(tune, overrides[tune]);
  for (auto* sub : {bt, pf}) add_tuning(sub, overrides[sub]);

  bind_option<double>(fit, overrides[fit], "--lambda0", "/penalty/lambda0", "Lasso level for the initial fit (default lambda)");
  bind_flag(fit, overrides[fit], "--se", "/inference/standard_errors", true, "Report plug-in standard errors");
  bind_option<std::string>(fit, overrides[fit], "--mu4", "/inference/mu4", "Fourth moment: a number or 'estimate'");
  tune->add_option("--fit-out", fit_out, "Write the selected fit as JSON");

  auto& so = overrides[sim];
  bind_option<Index>(sim, so, "--p", "/simulate/p", "Dimension");
  bind_option<Index>(sim, so, "--k", "/simulate/k", "Number of similarity matrices");
  bind_option<Index>(sim, so, "--n", "/simulate/n", "Observations per replicate");
  bind_option<std::string>(sim, so, "--dist", "/simulate/dist", "normal | mixture | exponential");
  bind_option<std::string>(sim, so, "--w-model", "/simulate/w_model", "bernoulli | correlated");
  bind_option<Index>(sim, so, "--replications", "/simulate/replications", "Number of replications");
  bind_option<std::vector<std::string>>(sim, so, "--methods", "/simulate/methods", "scad mcp lasso ols oracle");
  bind_flag(sim, so, "--freeze-w", "/simulate/freeze_w", true, "Reuse the same similarity matrices in every replicate");
  add_tuning(sim, so);
  sim->add_option("--replicates-out", replicates_out, "Per-replicate records CSV");
  so.push_back([penalty = sim->get_option("--penalty"), methods = sim->get_option("--methods")](json& j) {
    if (penalty->count() > 0 && methods->count() == 0) {
      j["simulate"]["methods"] = {j["penalty"]["family"], "ols", "oracle"};
    }
  });

  for (auto* sub : {bt, pf}) {
    auto& o = overrides[sub];
    bind_option<std::string>(sub, o, "--returns", "/backtest/returns", "Returns CSV: rows = periods, columns = assets");
    bind_option<Index>(sub, o, "--window", "/backtest/window", "Training window length");
    bind_option<std::string>(sub, o, "--factors", "/backtest/factors", "Factor CSV aligned by row with returns");
    bind_option<std::string>(sub, o, "--characteristics", "/backtest/characteristics", "Known loadings CSV (rows = assets)");
    bind_option<std::string>(sub, o, "--market-caps", "/backtest/market_caps", "Market caps (one row or column)");
    bind_option<double>(sub, o, "--rf", "/backtest/risk_free", "Risk-free rate per period");
    bind_option<double>(sub, o, "--eps", "/backtest/repair_eps", "Eigenvalue floor for PD repair");
  }
  bind_option<std::vector<std::string>>(bt, overrides[bt], "--methods", "/backtest/methods", "Covariance methods");
  bt->add_option("--returns-out", returns_out, "Per-period portfolio returns CSV");
  bind_option<std::string>(pf, overrides[pf], "--method", "/portfolio/method", "Covariance method");
  bind_option<std::string>(pf, overrides[pf], "--covariance", "/portfolio/covariance", "Use this covariance CSV directly");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n\n{}", e.what(), app.help());
    return 1;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    json cfg = default_config();
    if (!config_path.empty()) cfg.merge_patch(load_config(config_path));
    for (auto& apply : overrides[chosen]) apply(cfg);
    cfg["command"] = chosen->get_name();
    set_num_threads(cfg["threads"].get<int>());

    const std::string& name = chosen->get_name();
    if (name == "fit") return cmd_fit(cfg, out);
    if (name == "tune") return cmd_tune(cfg, out, fit_out);
    if (name == "simulate") return cmd_simulate(cfg, out, err, replicates_out);
    if (name == "backtest") return cmd_backtest(cfg, out, returns_out);
    return cmd_portfolio(cfg, out);
  } catch (const NumericalError& e) {
    fmt::print(err, "numerical error: {}\n", e.what());
    return 2;
  } catch (const DataError& e) {
    fmt::print(err, "data error: {}\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "invalid input: {}\n", e.what());
    return 1;
  } catch (const json::exception& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
}

}  // namespace scr::app
