#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sgam/basis.hpp"
#include "sgam/model.hpp"
#include "sgam/penalty.hpp"
#include "sgam/solver.hpp"

namespace sgam {

enum class ScheduleKind { LassoConstant, SlopeDecaying };

/// C1 sqrt(max(ln d, 1) / n); the guard keeps d = 1 from zeroing the penalty.
double lasso_lambda(double n, double d, double C1);
/// C2 sqrt(ln n / n).
double lasso_kappa(double n, double C2);

/// lambda = C1 sqrt(max(ln d, 1) / n), kappa = C2 sqrt(ln n / n), constant sequences.
PenaltyWeights lasso_weights(Index n, Index d, Index m, double C1, double C2);

/// lambda_j = C1 sqrt(ln(d e / j) / n), kappa_l = C2 sqrt(ln(n e / l) / n).
PenaltyWeights slope_weights(Index n, Index d, Index m, double C1, double C2);

ScheduleKind schedule_for(Method method);

/// Weights for a method. Lasso ignores C1 (row weights zero) and group Lasso
/// ignores C2 (entry weights zero); the remaining constant must be positive.
PenaltyWeights method_weights(Method method, Index n, Index d, Index m, double C1, double C2);

struct GridPoint {
  double c1 = 0.0;
  double c2 = 0.0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// `points` log-spaced values in [lo, hi].
std::vector<double> log_space(double lo, double hi, int points);

/// Default grid: the inactive constant of Lasso / group Lasso is fixed at 0 and the
/// active one (or both, for the sparse group methods) runs over log_space(lo, hi, points).
std::vector<GridPoint> default_grid(Method method, int points = 13, double lo = 1e-2,
                                    double hi = 1e1);

/// Order in which a regularization path visits `grid`: decreasing total penalty
/// C1 lambda_1 + C2 kappa_1 for sample size n, ties by grid position.
std::vector<std::size_t> path_order(const std::vector<GridPoint>& grid, Index n, Index d);

struct CvOptions {
  FitConfig fit;
  int threads = 1;
  /// Fold reassignments tried when a training fold holds a single class.
  int max_resamples = 100;
};

struct CvReport {
  Method method = Method::SparseGroupLasso;
  std::vector<GridPoint> grid;
  std::vector<double> mean_error;
  std::vector<double> se;
  std::size_t chosen = 0;
  int folds = 0;  // 0 for hold-out selection
  std::uint64_t seed = 0;
  /// Fold index of every training sample (empty for hold-out selection).
  std::vector<int> fold_of;

  const GridPoint& chosen_point() const { return grid.at(chosen); }
};

/// Deterministic K-fold assignment; every training fold holds both classes.
std::vector<int> assign_folds(const Labels& y, int folds, std::uint64_t seed, int max_resamples);

/// K-fold cross-validated misclassification over the grid. `X` must already lie in
/// [0,1]. Each fold walks the grid along path_order with warm starts.
CvReport cross_validate(const Eigen::MatrixXd& X, const Labels& y, const BasisSpec& basis,
                        Method method, const std::vector<GridPoint>& grid, int folds,
                        std::uint64_t seed, const CvOptions& options = {});

/// Chooses the grid point with the smallest error on a separate validation set.
CvReport holdout_select(const Eigen::MatrixXd& X_train, const Labels& y_train,
                        const Eigen::MatrixXd& X_valid, const Labels& y_valid,
                        const BasisSpec& basis, Method method, const std::vector<GridPoint>& grid,
                        const CvOptions& options = {});

/// Fits `method` at constants (C1, C2) on an expanded design.
FitResult fit_method(const Design& design, const Labels& y, Method method, double C1, double C2,
                     const FitConfig& cfg = {},
                     const std::optional<Coefficients>& start = std::nullopt);

/// CSV with columns C1,C2,mean_error,se,chosen.
void write_csv(const CvReport& report, std::ostream& out);

}  // namespace sgam
