#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "fasim/csv.hpp"
#include "fasim/error.hpp"
#include "fasim/estimate.hpp"
#include "fasim/fast.hpp"
#include "fasim/forecast.hpp"
#include "fasim/inference.hpp"
#include "fasim/lasso.hpp"
#include "fasim/lp.hpp"
#include "fasim/parallel.hpp"

#ifndef FASIM_VERSION
#define FASIM_VERSION "0.0.0"
#endif

namespace fasim::cli {
namespace {

using nlohmann::ordered_json;

double parse_number(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw_invalid("cannot parse " + what + " '" + text + "'");
  return value;
}

std::pair<std::string, std::string> split_colon(const std::string& text) {
  const auto pos = text.find(':');
  if (pos == std::string::npos) return {text, ""};
  return {text.substr(0, pos), text.substr(pos + 1)};
}

struct DataFlags {
  std::string input;
  std::string response;
  std::optional<Index> factors;
  bool auto_factors = false;
  std::optional<Index> max_factors;
  std::uint64_t seed = 0;
};

struct FitFlags {
  std::optional<double> lambda;
  Index cv_folds = 10;
  bool standardize = false;
};

struct DgpFlags {
  std::string model = "linear";
  Index n = 200;
  Index p = 200;
  Index K = 2;
  Index s = 3;
  double omega = 0.0;
  std::string gamma = "0.5,0.5";
  std::string factor_case = "iid";
  std::string noise = "gaussian:0.25";
  std::string u_structure = "toeplitz:0.5";
  std::string outliers = "none";
  std::optional<Index> reps;
  bool full = false;
  std::uint64_t seed = 0;
  std::string summary_json;
  std::string plot_data;
};

void add_data_flags(CLI::App& app, DataFlags& f) {
  app.add_option("--input", f.input, "CSV file with a header row")->required();
  app.add_option("--response", f.response, "response column: header name or 0-based index")
      ->required();
  auto* k = app.add_option("--factors", f.factors, "number of factors K");
  auto* a = app.add_flag("--auto-factors", f.auto_factors, "choose K by the eigenvalue ratio");
  k->excludes(a);
  app.add_option("--max-factors", f.max_factors, "largest K considered by --auto-factors");
  app.add_option("--seed", f.seed, "root seed");
}

void add_fit_flags(CLI::App& app, FitFlags& f) {
  auto* l = app.add_option("--lambda", f.lambda, "fixed lasso penalty");
  auto* c = app.add_option("--cv-folds", f.cv_folds, "cross-validation folds for lambda");
  l->excludes(c);
  app.add_flag("--standardize", f.standardize, "penalize unit-scaled idiosyncratic columns");
}

void add_dgp_flags(CLI::App& app, DgpFlags& f) {
  app.add_option("--model", f.model, "linear | nonlinear")->check(CLI::IsMember({"linear", "nonlinear"}));
  app.add_option("--n", f.n, "sample size");
  app.add_option("--p", f.p, "number of covariates");
  app.add_option("--K", f.K, "number of factors");
  app.add_option("--s", f.s, "support size of beta");
  app.add_option("--gamma", f.gamma, "comma-separated factor coefficients");
  app.add_option("--factor-case", f.factor_case, "iid | ar1")->check(CLI::IsMember({"iid", "ar1"}));
  app.add_option("--noise", f.noise, "gaussian:VAR | uniform:A | t:DF");
  app.add_option("--u-structure", f.u_structure, "toeplitz:RHO | iid");
  app.add_option("--outliers", f.outliers, "FRACTION:MULTIPLIER | none");
  app.add_option("--reps", f.reps, "replications (default 200)");
  app.add_flag("--full", f.full, "500 replications");
  app.add_option("--seed", f.seed, "root seed");
  app.add_option("--summary-json", f.summary_json, "write a JSON summary to this path");
  app.add_option("--plot-data", f.plot_data, "write per-grid-point data (CSV) to this path");
}

std::optional<Index> response_index(const std::string& text) {
  Index value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc() && ptr == text.data() + text.size()) return value;
  return std::nullopt;
}

Dataset load_dataset(const DataFlags& f) {
  const CsvTable table = read_csv_file(f.input);
  ResponseColumn column;
  const bool named = std::find(table.header.begin(), table.header.end(), f.response) !=
                     table.header.end();
  if (!named) column.index = response_index(f.response);
  if (named || !column.index) column.name = f.response;
  return dataset_from_table(table, column);
}

FitOptions fit_options(const DataFlags& d, const FitFlags& f) {
  FitOptions o;
  if (d.factors) o.K = *d.factors;
  o.K_max = d.max_factors;
  o.lambda = f.lambda;
  o.cv_folds = f.cv_folds;
  o.standardize = f.standardize;
  o.seed = SeedSpec{d.seed, 0};
  return o;
}

DgpConfig dgp_config(const DgpFlags& f) {
  DgpConfig cfg;
  cfg.model = f.model == "nonlinear" ? Model::Nonlinear : Model::Linear;
  cfg.n = f.n;
  cfg.p = f.p;
  cfg.K = f.K;
  cfg.s = f.s;
  cfg.omega = f.omega;
  const std::vector<double> gamma = parse_list(f.gamma);
  cfg.gamma = Eigen::Map<const Vector>(gamma.data(), static_cast<Index>(gamma.size()));
  cfg.factor_case = f.factor_case == "ar1" ? FactorCase::Ar1 : FactorCase::IidNormal;
  cfg.noise = parse_noise(f.noise);
  parse_u_structure(f.u_structure, cfg);
  cfg.outliers = parse_outliers(f.outliers);
  cfg.seed = SeedSpec{f.seed, 0};
  validate(cfg);
  return cfg;
}

Index replications(const DgpFlags& f) {
  if (f.full) return 500;
  return f.reps.value_or(200);
}

ordered_json vector_json(const Vector& v) { return ordered_json(std::vector<double>(v.data(), v.data() + v.size())); }

ordered_json tolerances_json() {
  const LassoOptions lasso;
  const LpOptions lp;
  return {{"lasso_tolerance", lasso.tolerance},
          {"lasso_max_sweeps", lasso.max_sweeps},
          {"lambda_grid", "30 log-spaced c in [0.01, 10] times sqrt(log p / n)"},
          {"delta_default", "2 sqrt(log p / n)"},
          {"lp_primal_tolerance", lp.primal_tolerance},
          {"lp_pivot_tolerance", lp.pivot_tolerance},
          {"factor_eigen_floor", 1e-12},
          {"bootstrap_quantile", "order statistic ceil(B (1 - alpha))"}};
}

ordered_json provenance(const std::string& subcommand, const ordered_json& config,
                        std::uint64_t seed) {
  return {{"tool", "fasim"},
          {"version", FASIM_VERSION},
          {"subcommand", subcommand},
          {"root_seed", seed},
          {"config", config},
          {"defaults", tolerances_json()}};
}

void write_csv_header(std::ostream& out, const ordered_json& prov) {
  out << "# " << prov.dump() << "\n";
}

// Writes to the named file, or to `fallback` when the path is empty or "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw_invalid("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }
  bool is_file() const { return stream_ == &file_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

ordered_json data_config_json(const DataFlags& d) {
  ordered_json j = {{"input", d.input}, {"response", d.response}};
  j["factors"] = d.factors ? ordered_json(*d.factors) : ordered_json("auto");
  j["max_factors"] = d.max_factors ? ordered_json(*d.max_factors) : ordered_json("default");
  return j;
}

ordered_json fit_config_json(const FitFlags& f) {
  ordered_json j;
  j["lambda"] = f.lambda ? ordered_json(*f.lambda) : ordered_json("cross-validation");
  j["cv_folds"] = f.cv_folds;
  j["standardize"] = f.standardize;
  return j;
}

ordered_json dgp_json(const DgpFlags& f, Index reps) {
  return {{"model", f.model},         {"n", f.n},
          {"p", f.p},                 {"K", f.K},
          {"s", f.s},                 {"gamma", f.gamma},
          {"factor_case", f.factor_case}, {"noise", f.noise},
          {"u_structure", f.u_structure}, {"outliers", f.outliers},
          {"replications", reps}};
}

ordered_json report_json(const ExperimentReport& report) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"config", r.config},
                    {"grid_name", r.grid_name},
                    {"grid_value", r.grid_value},
                    {"metric", r.metric},
                    {"value", r.value},
                    {"mc_se", r.mc_se},
                    {"replications", r.replications}});
  }
  return {{"experiment", report.experiment}, {"rows", rows}};
}

// plot data: one row per grid value, one column per metric
void write_plot_data(const std::string& path, const ExperimentReport& report) {
  std::vector<std::string> metrics;
  std::vector<double> grid;
  for (const auto& r : report.rows) {
    if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) metrics.push_back(r.metric);
    if (std::find(grid.begin(), grid.end(), r.grid_value) == grid.end()) grid.push_back(r.grid_value);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_invalid("cannot open plot-data file '" + path + "'");
  out.precision(17);
  out << (report.rows.empty() ? "grid" : report.rows.front().grid_name);
  for (const auto& m : metrics) out << "," << m << "," << m << "_se";
  out << "\n";
  for (const double g : grid) {
    out << g;
    for (const auto& m : metrics) {
      const ReportRow* row = report.find(m, g);
      if (row) {
        out << "," << row->value << "," << row->mc_se;
      } else {
        out << ",,";
      }
    }
    out << "\n";
  }
}

void emit_report(const ExperimentReport& report, const ordered_json& prov, const DgpFlags& f,
                 const std::string& output, std::ostream& out) {
  Sink sink(output, out);
  write_csv_header(*sink, prov);
  report.write_csv(*sink);
  if (!f.summary_json.empty()) {
    std::ofstream js(f.summary_json, std::ios::binary);
    if (!js) throw_invalid("cannot open summary file '" + f.summary_json + "'");
    ordered_json j = report_json(report);
    j["provenance"] = prov;
    js << j.dump(2) << "\n";
  }
  if (!f.plot_data.empty()) write_plot_data(f.plot_data, report);
}

TuningRule lambda_rule(const std::string& rule, double scale) {
  TuningRule out;
  if (rule == "cv") return out;
  out.scale = scale;
  out.noise_scaled = rule == "noise";
  return out;
}

void error_line(std::ostream& err, const std::string& kind, const std::string& message) {
  err << ordered_json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

NoiseSpec parse_noise(const std::string& text) {
  const auto [kind, value] = split_colon(text);
  if (kind == "gaussian" || kind == "normal") {
    return NoiseSpec::gaussian(value.empty() ? 1.0 : parse_number(value, "noise variance"));
  }
  if (kind == "uniform") {
    return NoiseSpec::uniform(value.empty() ? 1.5 : parse_number(value, "uniform half-width"));
  }
  if (kind == "t") {
    const double df = value.empty() ? 3.0 : parse_number(value, "t degrees of freedom");
    if (df < 1.0 || df != std::floor(df)) throw_invalid("t noise needs a positive integer df");
    return NoiseSpec::student_t(static_cast<int>(df));
  }
  throw_invalid("unknown noise '" + text + "' (expected gaussian:VAR, uniform:A or t:DF)");
}

void parse_u_structure(const std::string& text, DgpConfig& cfg) {
  const auto [kind, value] = split_colon(text);
  if (kind == "iid") {
    cfg.u_structure = UStructure::Iid;
  } else if (kind == "toeplitz") {
    cfg.u_structure = UStructure::Toeplitz;
    cfg.u_rho = value.empty() ? 0.5 : parse_number(value, "Toeplitz correlation");
  } else {
    throw_invalid("unknown u-structure '" + text + "' (expected toeplitz:RHO or iid)");
  }
}

std::optional<OutlierSpec> parse_outliers(const std::string& text) {
  if (text == "none" || text.empty()) return std::nullopt;
  const auto [fraction, multiplier] = split_colon(text);
  if (multiplier.empty()) throw_invalid("outliers must be FRACTION:MULTIPLIER or none");
  return OutlierSpec{parse_number(fraction, "outlier fraction"),
                     parse_number(multiplier, "outlier multiplier")};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_number(item, "list entry"));
  }
  if (out.empty()) throw_invalid("empty list '" + text + "'");
  return out;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Factor-augmented single-index model: testing, estimation and inference", "fasim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FASIM_VERSION);
  std::optional<int> threads;
  std::string output;
  app.add_option("--threads", threads, "worker cap (falls back to FASIM_THREADS)");
  app.add_option("--output", output, "output file (default: stdout)");

  // test
  DataFlags test_data;
  double test_alpha = 0.05;
  Index test_bootstrap = 2000;
  auto* test = app.add_subcommand("test", "factor-adjusted score test of H0: beta_h = 0");
  add_data_flags(*test, test_data);
  test->add_option("--alpha", test_alpha, "significance level");
  test->add_option("--bootstrap", test_bootstrap, "multiplier bootstrap replicates");

  // fit
  DataFlags fit_data;
  FitFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "lasso estimate of beta_h on the idiosyncratic components");
  add_data_flags(*fit, fit_data);
  add_fit_flags(*fit, fit_flags);

  // infer
  DataFlags inf_data;
  FitFlags inf_fit;
  std::optional<double> inf_delta;
  bool inf_cv_delta = false;
  double inf_alpha = 0.05;
  auto* infer = app.add_subcommand("infer", "debiased estimates and confidence intervals");
  add_data_flags(*infer, inf_data);
  add_fit_flags(*infer, inf_fit);
  auto* dflag = infer->add_option("--delta", inf_delta, "CLIME constraint level");
  infer->add_flag("--cv-delta", inf_cv_delta, "choose delta by 5-fold cross-validation")->excludes(dflag);
  infer->add_option("--alpha", inf_alpha, "1 - confidence level");

  // simulate-power
  DgpFlags pow_flags;
  std::string omega_grid = "0,0.1,0.2,0.3,0.4,0.5";
  std::optional<double> pow_omega;
  double pow_alpha = 0.05;
  Index pow_bootstrap = 500;
  auto* spow = app.add_subcommand("simulate-power", "empirical size and power of the test");
  add_dgp_flags(*spow, pow_flags);
  auto* og = spow->add_option("--omega-grid", omega_grid, "comma-separated signal levels");
  spow->add_option("--omega", pow_omega, "single signal level")->excludes(og);
  spow->add_option("--alpha", pow_alpha, "significance level");
  spow->add_option("--bootstrap", pow_bootstrap, "bootstrap replicates per test");

  // simulate-estimation
  DgpFlags est_flags;
  est_flags.p = 500;
  est_flags.omega = 0.5;
  est_flags.noise = "gaussian:1";
  est_flags.u_structure = "iid";
  std::string rate_grid = "0.10,0.15,0.20,0.25,0.30";
  std::string n_grid;
  std::string est_lambda_rule = "cv";
  double est_lambda_scale = 2.0;
  Index est_cv_folds = 10;
  Index est_oracle = 1000000;
  auto* sest = app.add_subcommand("simulate-estimation", "relative estimation error against the oracle");
  add_dgp_flags(*sest, est_flags);
  sest->add_option("--omega", est_flags.omega, "value of the nonzero coefficients");
  auto* rg = sest->add_option("--rate-grid", rate_grid, "values of sqrt(s log p / n)");
  sest->add_option("--n-grid", n_grid, "explicit sample sizes")->excludes(rg);
  sest->add_option("--lambda-rule", est_lambda_rule, "cv | noise | fixed")
      ->check(CLI::IsMember({"cv", "noise", "fixed"}));
  sest->add_option("--lambda-scale", est_lambda_scale,
                   "c in lambda = c sqrt(log p / n), times the residual scale for 'noise'");
  sest->add_option("--cv-folds", est_cv_folds, "folds when cross-validating lambda");
  sest->add_option("--oracle-draws", est_oracle, "Monte Carlo draws for beta_h");

  // simulate-coverage
  DgpFlags cov_flags;
  cov_flags.p = 500;
  cov_flags.omega = 0.5;
  cov_flags.u_structure = "iid";
  double cov_alpha = 0.05;
  std::string cov_lambda_rule = "noise";
  double cov_lambda_scale = 2.0;
  double cov_delta_scale = 0.85;
  bool cov_cv_delta = false;
  Index cov_oracle = 1000000;
  auto* scov = app.add_subcommand("simulate-coverage", "coverage and length of the debiased intervals");
  add_dgp_flags(*scov, cov_flags);
  scov->add_option("--omega", cov_flags.omega, "value of the nonzero coefficients");
  scov->add_option("--alpha", cov_alpha, "1 - confidence level");
  scov->add_option("--lambda-rule", cov_lambda_rule, "noise | fixed | cv")
      ->check(CLI::IsMember({"cv", "noise", "fixed"}));
  scov->add_option("--lambda-scale", cov_lambda_scale,
                   "c in lambda = c sqrt(log p / n), times the residual scale for 'noise'");
  auto* ds = scov->add_option("--delta-scale", cov_delta_scale, "delta = scale * sqrt(log p / n)");
  scov->add_flag("--cv-delta", cov_cv_delta, "cross-validate delta instead")->excludes(ds);
  scov->add_option("--oracle-draws", cov_oracle, "Monte Carlo draws for beta_h");

  // forecast
  DataFlags fc_data;
  FitFlags fc_fit;
  Index fc_window = 90;
  Index fc_knots = 6;
  std::string fc_summary;
  auto* fc = app.add_subcommand("forecast", "moving-window forecasts with a spline link");
  add_data_flags(*fc, fc_data);
  add_fit_flags(*fc, fc_fit);
  fc->add_option("--window", fc_window, "training window length");
  fc->add_option("--knots", fc_knots, "interior spline knots");
  fc->add_option("--summary-json", fc_summary, "write {mse} JSON to this path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << FASIM_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    error_line(err, "invalid-input", e.what());
    return 1;
  }

  try {
    if (threads) {
      if (*threads < 1) throw_invalid("--threads must be at least 1");
      set_thread_count(*threads);
    }
    const auto check_factor_flags = [](const DataFlags& d) {
      if (!d.factors && !d.auto_factors) {
        throw_invalid("one of --factors or --auto-factors is required");
      }
    };

    if (*test) {
      check_factor_flags(test_data);
      const Dataset ds = load_dataset(test_data);
      FastOptions o;
      if (test_data.factors) o.K = *test_data.factors;
      o.K_max = test_data.max_factors;
      o.alpha = test_alpha;
      o.bootstrap = test_bootstrap;
      o.seed = SeedSpec{test_data.seed, 0};
      const FastResult r = fast_test(ds, o);
      ordered_json cfg = data_config_json(test_data);
      cfg["alpha"] = test_alpha;
      cfg["bootstrap"] = test_bootstrap;
      Sink sink(output, out);
      ordered_json j{{"provenance", provenance("test", cfg, test_data.seed)},
                     {"M_n", r.M_n},
                     {"critical_value", r.critical_value},
                     {"p_value", r.p_value},
                     {"reject", r.reject},
                     {"alpha", test_alpha},
                     {"B", r.B},
                     {"K", r.K},
                     {"gamma_hat", vector_json(r.gamma_hat)},
                     {"T_n", vector_json(r.T_n)}};
      *sink << j.dump(2) << "\n";
    } else if (*fit) {
      check_factor_flags(fit_data);
      const Dataset ds = load_dataset(fit_data);
      const FasimModel model = fit_fasim_model(ds, fit_options(fit_data, fit_flags));
      ordered_json beta = ordered_json::object();
      ordered_json names = ordered_json::object();
      for (Index j = 0; j < model.fit.beta_hat.size(); ++j) {
        if (model.fit.beta_hat[j] != 0.0) {
          beta[std::to_string(j)] = model.fit.beta_hat[j];
          names[std::to_string(j)] = ds.name(j);
        }
      }
      ordered_json cfg = data_config_json(fit_data);
      cfg.update(fit_config_json(fit_flags));
      Sink sink(output, out);
      ordered_json j{{"provenance", provenance("fit", cfg, fit_data.seed)},
                     {"beta_hat", beta},
                     {"names", names},
                     {"gamma_hat", vector_json(model.fit.gamma_hat)},
                     {"lambda", model.fit.lambda},
                     {"K", model.factors.K},
                     {"objective", model.fit.objective},
                     {"converged", model.fit.converged}};
      *sink << j.dump(2) << "\n";
    } else if (*infer) {
      check_factor_flags(inf_data);
      const Dataset ds = load_dataset(inf_data);
      InferenceOptions o;
      o.fit = fit_options(inf_data, inf_fit);
      o.delta = inf_delta;
      o.cv_delta = inf_cv_delta;
      o.alpha = inf_alpha;
      const DebiasedInference r = infer_fasim(ds, o);
      ordered_json cfg = data_config_json(inf_data);
      cfg.update(fit_config_json(inf_fit));
      cfg["delta"] = inf_delta ? ordered_json(*inf_delta)
                               : ordered_json(inf_cv_delta ? "cross-validation" : "default");
      cfg["alpha"] = inf_alpha;
      cfg["resolved_lambda"] = r.lambda;
      cfg["resolved_delta"] = r.delta_n;
      cfg["K"] = r.K;
      Sink sink(output, out);
      write_csv_header(*sink, provenance("infer", cfg, inf_data.seed));
      std::ostream& os = *sink;
      os.precision(17);
      os << "index,name,beta_hat,beta_tilde,sd,ci_lower,ci_upper\n";
      for (Index j = 0; j < r.beta_tilde.size(); ++j) {
        os << j << "," << ds.name(j) << "," << r.beta_hat[j] << "," << r.beta_tilde[j] << ","
           << r.sigma_z[j] << "," << r.ci_lower[j] << "," << r.ci_upper[j] << "\n";
      }
    } else if (*spow) {
      const DgpConfig cfg = dgp_config(pow_flags);
      PowerOptions o;
      o.replications = replications(pow_flags);
      o.alpha = pow_alpha;
      o.bootstrap = pow_bootstrap;
      const std::vector<double> grid =
          pow_omega ? std::vector<double>{*pow_omega} : parse_list(omega_grid);
      const ExperimentReport report = run_size_power(grid, cfg, o);
      ordered_json c = dgp_json(pow_flags, o.replications);
      c["omega_grid"] = grid;
      c["alpha"] = pow_alpha;
      c["bootstrap"] = pow_bootstrap;
      emit_report(report, provenance("simulate-power", c, pow_flags.seed), pow_flags, output, out);
    } else if (*sest) {
      const DgpConfig cfg = dgp_config(est_flags);
      std::vector<Index> ns;
      if (!n_grid.empty()) {
        for (const double v : parse_list(n_grid)) ns.push_back(static_cast<Index>(v));
      } else {
        for (const double rate : parse_list(rate_grid)) ns.push_back(n_for_rate(rate, cfg.s, cfg.p));
      }
      EstimationOptions o;
      o.replications = est_flags.full ? 500 : est_flags.reps.value_or(100);
      o.lambda = lambda_rule(est_lambda_rule, est_lambda_scale);
      o.cv_folds = est_cv_folds;
      o.oracle_draws = est_oracle;
      const ExperimentReport report = run_estimation_error(ns, cfg, o);
      ordered_json c = dgp_json(est_flags, o.replications);
      c["omega"] = est_flags.omega;
      c["n_grid"] = ns;
      c["lambda_rule"] = est_lambda_rule;
      c["lambda_scale"] = est_lambda_scale;
      c["cv_folds"] = est_cv_folds;
      c["oracle_draws"] = est_oracle;
      emit_report(report, provenance("simulate-estimation", c, est_flags.seed), est_flags, output,
                  out);
    } else if (*scov) {
      const DgpConfig cfg = dgp_config(cov_flags);
      CoverageOptions o;
      o.replications = replications(cov_flags);
      o.alpha = cov_alpha;
      o.lambda = lambda_rule(cov_lambda_rule, cov_lambda_scale);
      o.delta.scale = cov_cv_delta ? std::nullopt : std::optional<double>(cov_delta_scale);
      o.oracle_draws = cov_oracle;
      const ExperimentReport report = run_coverage(cfg, o);
      ordered_json c = dgp_json(cov_flags, o.replications);
      c["omega"] = cov_flags.omega;
      c["alpha"] = cov_alpha;
      c["lambda_rule"] = cov_lambda_rule;
      c["lambda_scale"] = cov_lambda_scale;
      c["delta"] = cov_cv_delta ? ordered_json("cross-validation") : ordered_json(cov_delta_scale);
      c["oracle_draws"] = cov_oracle;
      emit_report(report, provenance("simulate-coverage", c, cov_flags.seed), cov_flags, output,
                  out);
    } else if (*fc) {
      check_factor_flags(fc_data);
      const Dataset ds = load_dataset(fc_data);
      ForecastOptions o;
      o.window = fc_window;
      o.knots = fc_knots;
      o.fit = fit_options(fc_data, fc_fit);
      const ForecastReport r = moving_window_forecast(ds, o);
      ordered_json cfg = data_config_json(fc_data);
      cfg.update(fit_config_json(fc_fit));
      cfg["window"] = fc_window;
      cfg["knots"] = fc_knots;
      const ordered_json prov = provenance("forecast", cfg, fc_data.seed);
      Sink sink(output, out);
      write_csv_header(*sink, prov);
      std::ostream& os = *sink;
      os.precision(17);
      os << "t,Y,Y_hat\n";
      for (const auto& point : r.predictions) {
        os << point.t << "," << point.y << "," << point.y_hat << "\n";
      }
      const ordered_json summary{{"provenance", prov}, {"mse", r.mse},
                                 {"predictions", r.predictions.size()}};
      if (!fc_summary.empty()) {
        std::ofstream js(fc_summary, std::ios::binary);
        if (!js) throw_invalid("cannot open summary file '" + fc_summary + "'");
        js << summary.dump(2) << "\n";
      } else if (sink.is_file()) {
        out << summary.dump(2) << "\n";
      }
    }
    return 0;
  } catch (const Error& e) {
    error_line(err, std::string(error_kind_name(e.kind())), e.what());
    return 1;
  } catch (const std::exception& e) {
    error_line(err, "internal", e.what());
    return 2;
  }
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_and_dispatch(args, out, err);
}

}  // namespace fasim::cli
