#include "sgam/spambase.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "sgam/parallel.hpp"

namespace sgam {

std::string to_string(TuningMode mode) { return mode == TuningMode::Holdout ? "holdout" : "cv"; }

TuningMode parse_tuning_mode(const std::string& name) {
  if (name == "holdout") return TuningMode::Holdout;
  if (name == "cv") return TuningMode::CrossValidation;
  throw InputError("unknown tuning mode '" + name + "' (expected holdout or cv)");
}

const SpamDemoRow& SpamDemoReport::row(Method method) const {
  for (const auto& r : rows)
    if (r.method == method) return r;
  throw InputError("method " + to_string(method) + " not in report");
}

Dataset load_spambase(const std::string& path) {
  CsvOptions opts;
  opts.expected_columns = kSpambaseColumns;
  return load_csv(path, opts);
}

SpamDemoReport run_spam_demo(const Dataset& data, const SpamDemoOptions& options) {
  validate(options.fit);
  if (options.methods.empty()) throw InputError("no methods selected");
  const Split parts = split(data, options.train_size, options.seed);
  const ScalerFit scaling = fit_scaler(parts.train.X);
  const Eigen::MatrixXd X_train = apply_scaler(scaling.scaler, parts.train.X);
  const Eigen::MatrixXd X_test = apply_scaler(scaling.scaler, parts.test.X);

  SpamDemoReport report;
  report.mode = options.mode;
  report.train_size = parts.train.n();
  report.test_size = parts.test.n();
  report.m = options.m > 0 ? options.m : default_truncation(parts.train.n());
  report.dropped_columns = scaling.dropped;
  const BasisSpec basis{options.basis, report.m};
  const Design train = expand(X_train, basis);
  const Design test = expand(X_test, basis);

  CvOptions cv;
  cv.fit = options.fit;
  report.rows.resize(options.methods.size());
  parallel_for(options.methods.size(), options.threads, [&](std::size_t k) {
    const Method method = options.methods[k];
    const auto grid = default_grid(method, options.grid_points);
    const CvReport tuned =
        options.mode == TuningMode::Holdout
            ? holdout_select(X_train, parts.train.y, X_test, parts.test.y, basis, method, grid, cv)
            : cross_validate(X_train, parts.train.y, basis, method, grid, options.folds,
                             options.seed, cv);
    const GridPoint& best = tuned.chosen_point();
    const FitResult res = fit_method(train, parts.train.y, method, best.c1, best.c2, options.fit);

    SpamModel model{basis, scaling.scaler, res.coef, method};
    SpamDemoRow& row = report.rows[k];
    row.method = method;
    row.c1 = best.c1;
    row.c2 = best.c2;
    const Labels pred = (linear_predictor(res.coef, test).array() >= 0.0).cast<int>();
    row.test_error = error_rate(pred, parts.test.y);
    for (Index j : selected_features(model)) row.selected.push_back(j + 1);
    row.nonzero_coefficients = nonzero_coefficients(model);
  });
  return report;
}

std::string format_index_set(const std::vector<Index>& indices) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < indices.size();) {
    std::size_t end = k;
    while (end + 1 < indices.size() && indices[end + 1] == indices[end] + 1) ++end;
    if (k > 0) os << ',';
    os << indices[k];
    if (end > k) os << '-' << indices[end];
    k = end + 1;
  }
  os << '}';
  return os.str();
}

void write_table(const SpamDemoReport& report, std::ostream& out) {
  out << "train n = " << report.train_size << ", test n = " << report.test_size
      << ", m = " << report.m << ", tuning = " << to_string(report.mode) << '\n';
  out << std::left << std::setw(22) << "Method" << std::setw(10) << "Error" << std::setw(16)
      << "# Features" << std::setw(18) << "# Nonzero coeff." << "Selected features\n";
  for (const auto& r : report.rows) {
    std::ostringstream err;
    err << std::fixed << std::setprecision(4) << r.test_error;
    out << std::setw(22) << display_name(r.method) << std::setw(10) << err.str() << std::setw(16)
        << r.selected.size() << std::setw(18) << r.nonzero_coefficients
        << format_index_set(r.selected) << '\n';
  }
  out << std::right;
}

void write_csv(const SpamDemoReport& report, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "method,C1,C2,test_error,selected_features,nonzero_coefficients,selected_set\n";
  for (const auto& r : report.rows) {
    out << to_string(r.method) << ',' << r.c1 << ',' << r.c2 << ',' << r.test_error << ','
        << r.selected.size() << ',' << r.nonzero_coefficients << ',';
    for (std::size_t k = 0; k < r.selected.size(); ++k) out << (k ? ";" : "") << r.selected[k];
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace sgam
