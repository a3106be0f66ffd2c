// sgam: fit, evaluate and benchmark sparse additive logistic classifiers.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sgam/check.hpp"
#include "sgam/data_io.hpp"
#include "sgam/model.hpp"
#include "sgam/sim.hpp"
#include "sgam/spambase.hpp"
#include "sgam/tuning.hpp"

namespace {

using namespace sgam;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

constexpr const char* kSpambaseHelp =
    "The spambase data (4601 rows, 57 features + spam label in the last column) is not\n"
    "bundled. Download spambase.data from the UCI Machine Learning Repository\n"
    "(https://archive.ics.uci.edu/dataset/94/spambase) and pass its path with --data.";

struct DataFlags {
  std::string path;
  bool header = false;
  std::string label = "-1";

  CsvOptions options() const {
    CsvOptions o;
    o.header = header;
    Index index = 0;
    std::istringstream is(label);
    if (is >> index && is.eof())
      o.label_index = index;
    else
      o.label_name = label;
    return o;
  }
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
  cmd->add_option("--data", flags.path, "CSV file (comma separated, numeric features)")->required();
  cmd->add_flag("--header", flags.header, "First line holds column names");
  cmd->add_option("--label", flags.label,
                  "Label column: index (negative counts from the end) or header name")
      ->capture_default_str();
}

struct ModelFlags {
  std::string basis = "cosine";
  Index m = 0;
  std::string method = "sparsegrouplasso";
  int max_iter = 5000;
  double tol = 1e-8;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
  cmd->add_option("--basis", flags.basis, "Basis: cosine or haar")->capture_default_str();
  cmd->add_option("--m", flags.m, "Basis functions per feature (0: min(n, 128))")->capture_default_str();
  cmd->add_option("--method", flags.method,
                  "lasso, grouplasso, sparsegrouplasso or sparsegroupslope")
      ->capture_default_str();
  cmd->add_option("--max-iter", flags.max_iter, "Solver iteration limit")->capture_default_str();
  cmd->add_option("--tol", flags.tol, "Relative objective change for convergence")->capture_default_str();
}

FitConfig fit_config(const ModelFlags& f) {
  FitConfig cfg;
  cfg.max_iterations = f.max_iter;
  cfg.tolerance = f.tol;
  return cfg;
}

struct GridFlags {
  int points = 13;
  double lo = 1e-2;
  double hi = 1e1;
  std::string grid;  // "lo:hi:points"
};

void add_grid_flags(CLI::App* cmd, GridFlags& flags) {
  cmd->add_option("--grid", flags.grid, "Log grid for the constants as lo:hi:points (default 0.01:10:13)");
}

std::vector<GridPoint> make_grid(Method method, GridFlags flags) {
  if (!flags.grid.empty()) {
    std::istringstream is(flags.grid);
    char c1 = 0, c2 = 0;
    if (!(is >> flags.lo >> c1 >> flags.hi >> c2 >> flags.points) || c1 != ':' || c2 != ':')
      throw InputError("--grid expects lo:hi:points, got '" + flags.grid + "'");
  }
  return default_grid(method, flags.points, flags.lo, flags.hi);
}

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw InputError("cannot write " + path);
  return file;
}

void check_method_constants(Method method, double c1, double c2) {
  if (method != Method::Lasso && !(c1 > 0)) throw InputError("--c1 must be positive for this method");
  if (method != Method::GroupLasso && !(c2 > 0)) throw InputError("--c2 must be positive for this method");
}

int cmd_fit(const DataFlags& data, const ModelFlags& mf, double c1, double c2, const std::string& out) {
  const Method method = parse_method(mf.method);
  check_method_constants(method, c1, c2);
  const Dataset ds = load_csv(data.path, data.options());
  const ScalerFit scaling = fit_scaler(ds.X);
  for (Index j : scaling.dropped) std::cerr << "warning: dropping constant column " << j + 1 << '\n';
  const Eigen::MatrixXd X = apply_scaler(scaling.scaler, ds.X);
  const BasisSpec basis{parse_basis_kind(mf.basis), mf.m > 0 ? mf.m : default_truncation(ds.n())};
  const Design design = expand(X, basis);
  const PenaltyWeights w = method_weights(method, design.n(), design.d(), design.m(), c1, c2);
  const FitResult res = fit(design, ds.y, w, fit_config(mf));

  const SpamModel model{basis, scaling.scaler, res.coef, method};
  save_model(model, out);
  std::cout << std::setprecision(6);
  std::cout << "method: " << display_name(method) << ", basis: " << to_string(basis.kind)
            << ", m = " << basis.m << '\n';
  std::cout << "lambda_1 = " << (w.row.size() ? w.row(0) : 0.0)
            << ", kappa_1 = " << (w.entry.size() ? w.entry(0) : 0.0) << '\n';
  std::cout << "iterations: " << res.iterations << (res.converged ? " (converged)" : " (not converged)")
            << ", objective: " << res.objective.back() << '\n';
  std::cout << "training error: " << misclassification_rate(model, ds.X, ds.y) << '\n';
  std::cout << "selected features: " << selected_features(model).size()
            << ", nonzero coefficients: " << nonzero_coefficients(model) << '\n';
  std::cout << "model written to " << out << '\n';
  return kOk;
}

int cmd_predict(const std::string& model_path, const DataFlags& data, bool labelled,
                const std::string& out) {
  const SpamModel model = load_model(model_path);
  CsvOptions opts = data.options();
  Eigen::MatrixXd X;
  Labels y;
  if (labelled) {
    const Dataset ds = load_csv(data.path, opts);
    X = ds.X;
    y = ds.y;
  } else {
    // Without a label column every field is a feature; parse through a dummy label.
    std::ifstream in(data.path);
    if (!in) throw InputError("cannot open data file " + data.path);
    std::stringstream buffer;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      buffer << line << ',' << (first && data.header ? "label" : "0") << '\n';
      first = false;
    }
    opts.label_index = -1;
    opts.label_name.reset();
    X = parse_csv(buffer, opts, data.path).X;
  }
  const Eigen::VectorXd g = predict_logits(model, X);
  std::ofstream file;
  std::ostream& os = open_or_stdout(out, file);
  os << std::setprecision(17) << "logit,probability,class\n";
  for (Index i = 0; i < g.size(); ++i)
    os << g(i) << ',' << sigmoid(g(i)) << ',' << (g(i) >= 0.0 ? 1 : 0) << '\n';
  if (labelled)
    std::cerr << "misclassification rate: " << misclassification_rate(model, X, y) << '\n';
  return kOk;
}

int cmd_cv(const DataFlags& data, const ModelFlags& mf, const GridFlags& gf, int folds,
           std::uint64_t seed, int threads, const std::string& out, const std::string& model_out) {
  const Method method = parse_method(mf.method);
  const Dataset ds = load_csv(data.path, data.options());
  const ScalerFit scaling = fit_scaler(ds.X);
  const Eigen::MatrixXd X = apply_scaler(scaling.scaler, ds.X);
  const BasisSpec basis{parse_basis_kind(mf.basis), mf.m > 0 ? mf.m : default_truncation(ds.n())};
  CvOptions opts;
  opts.fit = fit_config(mf);
  opts.threads = threads;
  const CvReport report = cross_validate(X, ds.y, basis, method, make_grid(method, gf), folds, seed, opts);
  std::ofstream file;
  write_csv(report, open_or_stdout(out, file));
  const GridPoint& best = report.chosen_point();
  std::cerr << "chosen C1 = " << best.c1 << ", C2 = " << best.c2
            << ", cv error = " << report.mean_error[report.chosen] << '\n';
  if (!model_out.empty()) {
    const FitResult res = fit_method(expand(X, basis), ds.y, method, best.c1, best.c2, opts.fit);
    save_model(SpamModel{basis, scaling.scaler, res.coef, method}, model_out);
  }
  return kOk;
}

std::vector<Index> parse_list(const std::string& text, const char* flag) {
  std::vector<Index> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(std::string(flag) + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw InputError(std::string(flag) + " is empty");
  return out;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(parse_method(item));
  if (out.empty()) throw InputError("--methods is empty");
  return out;
}

int cmd_simulate(SimConfig base, const std::string& ds, const std::string& ns,
                 const std::string& methods, const std::string& scale, const std::string& basis,
                 const std::string& out, const std::string& table) {
  base.methods = parse_methods(methods);
  base.scale = parse_component_scale(scale);
  base.basis = parse_basis_kind(basis);
  const auto d_list = parse_list(ds, "--d");
  const auto n_list = parse_list(ns, "--n");
  for (Index d : d_list)
    for (Index n : n_list) {
      SimConfig cfg = base;
      cfg.d = d;
      cfg.n = n;
      validate(cfg);
    }
  std::vector<ExperimentReport> reports;
  for (Index d : d_list)
    for (Index n : n_list) {
      SimConfig cfg = base;
      cfg.d = d;
      cfg.n = n;
      std::cerr << "simulating d = " << d << ", n = " << n << " ...\n";
      reports.push_back(run_experiment(cfg));
    }
  {
    std::ofstream file;
    write_csv(reports, open_or_stdout(out, file));
  }
  if (table.empty() || table == "-") {
    write_table(reports, std::cout);
  } else {
    std::ofstream file(table);
    if (!file) throw InputError("cannot write " + table);
    write_table(reports, file);
  }
  return kOk;
}

int cmd_spam_demo(const std::string& path, SpamDemoOptions opts, const std::string& mode,
                  const std::string& basis, const std::string& out, const std::string& csv) {
  opts.mode = parse_tuning_mode(mode);
  opts.basis = parse_basis_kind(basis);
  const Dataset data = load_spambase(path);
  const SpamDemoReport report = run_spam_demo(data, opts);
  {
    std::ofstream file;
    write_table(report, open_or_stdout(out, file));
  }
  if (!csv.empty()) {
    std::ofstream file(csv);
    if (!file) throw InputError("cannot write " + csv);
    write_csv(report, file);
  }
  return kOk;
}

int cmd_selfcheck(const check::SelfcheckOptions& opts) {
  bool ok = true;
  for (const auto& o : check::run_selfcheck(opts)) {
    std::cout << (o.passed ? "PASS  " : "FAIL  ") << o.property << "  [" << o.detail << "]\n";
    ok = ok && o.passed;
  }
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse additive logistic classification with sparse group Lasso / Slope penalties"};
  app.require_subcommand(1);
  app.footer(kSpambaseHelp);

  DataFlags data;
  ModelFlags model;
  GridFlags grid;
  double c1 = 1.0, c2 = 1.0;
  std::string out, model_out, table, csv;
  int folds = 10, threads = 1;
  std::uint64_t seed = 1;

  auto* fit = app.add_subcommand("fit", "Fit a classifier at fixed penalty constants");
  add_data_flags(fit, data);
  add_model_flags(fit, model);
  fit->add_option("--c1", c1, "Row (group) penalty constant C1")->capture_default_str();
  fit->add_option("--c2", c2, "Entry penalty constant C2")->capture_default_str();
  fit->add_option("--out", out, "Model JSON output")->required();

  std::string model_path;
  bool labelled = false;
  auto* predict = app.add_subcommand("predict", "Score a CSV with a saved model");
  predict->add_option("--model", model_path, "Model JSON")->required();
  add_data_flags(predict, data);
  predict->add_flag("--labelled", labelled, "The CSV carries a label column; report the error rate");
  predict->add_option("--out", out, "Predictions CSV (default stdout)");

  auto* cv = app.add_subcommand("cv", "Cross-validate the penalty constants");
  add_data_flags(cv, data);
  add_model_flags(cv, model);
  add_grid_flags(cv, grid);
  cv->add_option("--folds", folds, "Number of folds")->capture_default_str();
  cv->add_option("--seed", seed, "Fold assignment seed")->capture_default_str();
  cv->add_option("--threads", threads, "Worker threads")->capture_default_str();
  cv->add_option("--out", out, "CV report CSV (default stdout)");
  cv->add_option("--model", model_out, "Refit at the chosen point and write the model here");

  SimConfig sim;
  std::string d_list = "10", n_list = "100", methods = "grouplasso,lasso,sparsegrouplasso";
  std::string scale = "unit-norm", basis = "cosine";
  auto* simulate = app.add_subcommand("simulate", "Simulation study with three active additive components");
  simulate->add_option("--d", d_list, "Feature counts, comma separated")->capture_default_str();
  simulate->add_option("--n", n_list, "Training sizes, comma separated")->capture_default_str();
  simulate->add_option("--reps", sim.replications, "Replications")->capture_default_str();
  simulate->add_option("--test-size", sim.test_size, "Test samples per replication")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--m", sim.m, "Basis functions per feature (0: min(n, 128))")->capture_default_str();
  simulate->add_option("--basis", basis, "Basis: cosine or haar")->capture_default_str();
  simulate->add_option("--folds", sim.folds, "CV folds")->capture_default_str();
  simulate->add_option("--grid-points", sim.grid_points, "Grid points per axis on [0.01, 10]")
      ->capture_default_str();
  simulate->add_option("--methods", methods, "Methods, comma separated")->capture_default_str();
  simulate->add_option("--scale", scale, "Component normalization: unit-norm or unit-variance")
      ->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads")->capture_default_str();
  simulate->add_option("--tol", sim.fit.tolerance, "Solver tolerance")->capture_default_str();
  simulate->add_option("--out", out, "Per-replication CSV (default stdout)");
  simulate->add_option("--table", table, "Summary table file (default stdout)");

  SpamDemoOptions spam;
  std::string spam_path, mode = "holdout";
  auto* demo = app.add_subcommand("spam-demo", "Spambase benchmark: 300 training emails, rest for testing");
  demo->footer(kSpambaseHelp);
  demo->add_option("--data", spam_path, "spambase.data")->required();
  demo->add_option("--train-size", spam.train_size, "Training sample size")->capture_default_str();
  demo->add_option("--seed", spam.seed, "Split seed")->capture_default_str();
  demo->add_option("--mode", mode, "Tuning: holdout (test set) or cv (folds on train)")->capture_default_str();
  demo->add_option("--m", spam.m, "Basis functions per feature (0: min(n, 128))")->capture_default_str();
  demo->add_option("--basis", basis, "Basis: cosine or haar")->capture_default_str();
  demo->add_option("--grid-points", spam.grid_points, "Grid points per axis on [0.01, 10]")->capture_default_str();
  demo->add_option("--folds", spam.folds, "CV folds (cv mode)")->capture_default_str();
  demo->add_option("--threads", spam.threads, "Worker threads")->capture_default_str();
  demo->add_option("--tol", spam.fit.tolerance, "Solver tolerance")->capture_default_str();
  demo->add_option("--out", out, "Report table (default stdout)");
  demo->add_option("--csv", csv, "Report CSV");

  check::SelfcheckOptions check_opts;
  auto* selfcheck = app.add_subcommand("selfcheck", "Prox and gradient checks against brute-force oracles");
  selfcheck->add_option("--seed", check_opts.seed, "Instance seed")->capture_default_str();
  selfcheck->add_flag("--perturb", check_opts.perturb, "Corrupt implementation outputs (test hook)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*fit) return cmd_fit(data, model, c1, c2, out);
    if (*predict) return cmd_predict(model_path, data, labelled, out);
    if (*cv) return cmd_cv(data, model, grid, folds, seed, threads, out, model_out);
    if (*simulate) return cmd_simulate(sim, d_list, n_list, methods, scale, basis, out, table);
    if (*demo) return cmd_spam_demo(spam_path, spam, mode, basis, out, csv);
    if (*selfcheck) return cmd_selfcheck(check_opts);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
