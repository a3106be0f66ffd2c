#include "sgam/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include "sgam/parallel.hpp"

namespace sgam {

namespace {

void check_sizes(Index n, Index d, Index m) {
  if (n < 2) throw InputError("penalty schedule needs n >= 2");
  if (d < 1 || m < 1) throw InputError("penalty schedule needs d >= 1 and m >= 1");
}

void check_constant(double c, const char* name) {
  if (!(c > 0) || !std::isfinite(c))
    throw InputError(std::string(name) + " must be a positive finite constant");
}

double lasso_row_base(Index n, Index d) {
  return lasso_lambda(static_cast<double>(n), static_cast<double>(d), 1.0);
}

double lasso_entry_base(Index n) { return lasso_kappa(static_cast<double>(n), 1.0); }

Eigen::VectorXd slope_sequence(Index n, Index count, Index scale) {
  Eigen::VectorXd w(count);
  for (Index k = 1; k <= count; ++k)
    w(k - 1) = std::sqrt(std::log(static_cast<double>(scale) * std::numbers::e / static_cast<double>(k)) /
                         static_cast<double>(n));
  return w;
}

}  // namespace

double lasso_lambda(double n, double d, double C1) {
  return C1 * std::sqrt(std::max(std::log(d), 1.0) / n);
}

double lasso_kappa(double n, double C2) { return C2 * std::sqrt(std::log(n) / n); }

PenaltyWeights lasso_weights(Index n, Index d, Index m, double C1, double C2) {
  check_sizes(n, d, m);
  check_constant(C1, "C1");
  check_constant(C2, "C2");
  return PenaltyWeights::constant(d, m, C1 * lasso_row_base(n, d), C2 * lasso_entry_base(n));
}

PenaltyWeights slope_weights(Index n, Index d, Index m, double C1, double C2) {
  check_sizes(n, d, m);
  check_constant(C1, "C1");
  check_constant(C2, "C2");
  return {C1 * slope_sequence(n, d, d), C2 * slope_sequence(n, m, n)};
}

ScheduleKind schedule_for(Method method) {
  return method == Method::SparseGroupSlope ? ScheduleKind::SlopeDecaying
                                            : ScheduleKind::LassoConstant;
}

PenaltyWeights method_weights(Method method, Index n, Index d, Index m, double C1, double C2) {
  switch (method) {
    case Method::Lasso: {
      PenaltyWeights w = lasso_weights(n, d, m, 1.0, C2);
      w.row.setZero();
      return w;
    }
    case Method::GroupLasso: {
      PenaltyWeights w = lasso_weights(n, d, m, C1, 1.0);
      w.entry.setZero();
      return w;
    }
    case Method::SparseGroupLasso: return lasso_weights(n, d, m, C1, C2);
    case Method::SparseGroupSlope: return slope_weights(n, d, m, C1, C2);
  }
  throw InputError("unknown method");
}

std::vector<double> log_space(double lo, double hi, int points) {
  if (points < 1 || !(lo > 0) || !(hi >= lo)) throw InputError("invalid log-spaced grid");
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < points; ++k)
    out[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * k / (points - 1));
  return out;
}

std::vector<GridPoint> default_grid(Method method, int points, double lo, double hi) {
  const std::vector<double> values = log_space(lo, hi, points);
  std::vector<GridPoint> grid;
  switch (method) {
    case Method::Lasso:
      for (double c : values) grid.push_back({0.0, c});
      break;
    case Method::GroupLasso:
      for (double c : values) grid.push_back({c, 0.0});
      break;
    case Method::SparseGroupLasso:
    case Method::SparseGroupSlope:
      for (double c1 : values)
        for (double c2 : values) grid.push_back({c1, c2});
      break;
  }
  return grid;
}

std::vector<std::size_t> path_order(const std::vector<GridPoint>& grid, Index n, Index d) {
  const double row = lasso_row_base(std::max<Index>(n, 2), std::max<Index>(d, 1));
  const double entry = lasso_entry_base(std::max<Index>(n, 2));
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return grid[a].c1 * row + grid[a].c2 * entry > grid[b].c1 * row + grid[b].c2 * entry;
  });
  return order;
}

FitResult fit_method(const Design& design, const Labels& y, Method method, double C1, double C2,
                     const FitConfig& cfg, const std::optional<Coefficients>& start) {
  const PenaltyWeights w = method_weights(method, design.n(), design.d(), design.m(), C1, C2);
  return fit(design, y, w, cfg, start);
}

std::vector<int> assign_folds(const Labels& y, int folds, std::uint64_t seed, int max_resamples) {
  const auto n = static_cast<std::size_t>(y.size());
  if (folds < 2) throw InputError("need at least 2 folds");
  if (n < static_cast<std::size_t>(folds))
    throw InputError("fewer samples than folds");
  std::vector<std::size_t> perm(n);
  std::vector<int> fold_of(n);
  for (int attempt = 0; attempt <= max_resamples; ++attempt) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t k = 0; k < n; ++k) fold_of[perm[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));

    bool ok = true;
    for (int f = 0; f < folds && ok; ++f) {
      bool has0 = false, has1 = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (fold_of[i] == f) continue;
        (y(static_cast<Index>(i)) == 1 ? has1 : has0) = true;
      }
      ok = has0 && has1;
    }
    if (ok) return fold_of;
  }
  throw InputError("could not assign folds with both classes in every training fold");
}

namespace {

// Errors on (valid) along the warm-started path over `grid`, stored by grid index.
std::vector<double> path_errors(const Design& train, const Labels& y_train, const Design& valid,
                                const Labels& y_valid, Method method,
                                const std::vector<GridPoint>& grid, FitConfig cfg) {
  if (cfg.initial_step == 0.0) cfg.initial_step = estimate_step(train);
  std::vector<double> errors(grid.size());
  std::optional<Coefficients> warm;
  const GridPoint* previous = nullptr;
  double previous_error = 0.0;
  for (std::size_t k : path_order(grid, train.n(), train.d())) {
    if (previous && *previous == grid[k]) {
      errors[k] = previous_error;
      continue;
    }
    const FitResult res = fit_method(train, y_train, method, grid[k].c1, grid[k].c2, cfg, warm);
    const Eigen::VectorXd g = linear_predictor(res.coef, valid);
    const Labels pred = (g.array() >= 0.0).cast<int>();
    errors[k] = error_rate(pred, y_valid);
    warm = res.coef;
    previous = &grid[k];
    previous_error = errors[k];
  }
  return errors;
}

std::size_t choose(const std::vector<GridPoint>& grid, const std::vector<double>& mean_error,
                   Index n, Index d) {
  std::size_t best = grid.size();
  for (std::size_t k : path_order(grid, n, d))
    if (best == grid.size() || mean_error[k] < mean_error[best]) best = k;
  return best;
}

void check_grid(Method method, const std::vector<GridPoint>& grid) {
  if (grid.empty()) throw InputError("empty tuning grid");
  for (const GridPoint& p : grid) {
    if (method != Method::Lasso) check_constant(p.c1, "C1");
    if (method != Method::GroupLasso) check_constant(p.c2, "C2");
  }
}

}  // namespace

CvReport cross_validate(const Eigen::MatrixXd& X, const Labels& y, const BasisSpec& basis,
                        Method method, const std::vector<GridPoint>& grid, int folds,
                        std::uint64_t seed, const CvOptions& options) {
  check_grid(method, grid);
  if (X.rows() != y.size()) throw DimensionError("row count and label count differ");
  check_labels(y);
  validate(options.fit);

  CvReport report;
  report.method = method;
  report.grid = grid;
  report.folds = folds;
  report.seed = seed;
  report.fold_of = assign_folds(y, folds, seed, options.max_resamples);

  const Design design = expand(X, basis);
  std::vector<std::vector<double>> fold_errors(static_cast<std::size_t>(folds));
  parallel_for(static_cast<std::size_t>(folds), options.threads, [&](std::size_t f) {
    std::vector<Index> train_rows, valid_rows;
    for (Index i = 0; i < y.size(); ++i)
      (report.fold_of[static_cast<std::size_t>(i)] == static_cast<int>(f) ? valid_rows : train_rows)
          .push_back(i);
    Labels y_train(static_cast<Index>(train_rows.size())), y_valid(static_cast<Index>(valid_rows.size()));
    for (std::size_t k = 0; k < train_rows.size(); ++k) y_train(static_cast<Index>(k)) = y(train_rows[k]);
    for (std::size_t k = 0; k < valid_rows.size(); ++k) y_valid(static_cast<Index>(k)) = y(valid_rows[k]);
    fold_errors[f] = path_errors(design.subset(train_rows), y_train, design.subset(valid_rows),
                                 y_valid, method, grid, options.fit);
  });

  report.mean_error.assign(grid.size(), 0.0);
  report.se.assign(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double sum = 0.0;
    for (int f = 0; f < folds; ++f) sum += fold_errors[static_cast<std::size_t>(f)][k];
    const double mean = sum / folds;
    double ss = 0.0;
    for (int f = 0; f < folds; ++f) {
      const double dev = fold_errors[static_cast<std::size_t>(f)][k] - mean;
      ss += dev * dev;
    }
    report.mean_error[k] = mean;
    report.se[k] = std::sqrt(ss / (folds - 1)) / std::sqrt(static_cast<double>(folds));
  }
  report.chosen = choose(grid, report.mean_error, X.rows(), X.cols());
  return report;
}

CvReport holdout_select(const Eigen::MatrixXd& X_train, const Labels& y_train,
                        const Eigen::MatrixXd& X_valid, const Labels& y_valid,
                        const BasisSpec& basis, Method method, const std::vector<GridPoint>& grid,
                        const CvOptions& options) {
  check_grid(method, grid);
  if (X_train.rows() != y_train.size() || X_valid.rows() != y_valid.size())
    throw DimensionError("row count and label count differ");
  if (X_train.cols() != X_valid.cols()) throw DimensionError("train and validation widths differ");
  check_labels(y_valid);
  validate(options.fit);

  CvReport report;
  report.method = method;
  report.grid = grid;
  report.mean_error = path_errors(expand(X_train, basis), y_train, expand(X_valid, basis), y_valid,
                                  method, grid, options.fit);
  report.se.resize(grid.size());
  const auto nv = static_cast<double>(y_valid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    report.se[k] = std::sqrt(report.mean_error[k] * (1.0 - report.mean_error[k]) / nv);
  report.chosen = choose(grid, report.mean_error, X_train.rows(), X_train.cols());
  return report;
}

void write_csv(const CvReport& report, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "C1,C2,mean_error,se,chosen\n";
  for (std::size_t k = 0; k < report.grid.size(); ++k)
    out << report.grid[k].c1 << ',' << report.grid[k].c2 << ',' << report.mean_error[k] << ','
        << report.se[k] << ',' << (k == report.chosen ? 1 : 0) << '\n';
  out.precision(old_precision);
}

}  // namespace sgam
