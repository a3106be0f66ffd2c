#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "sgam/basis.hpp"
#include "sgam/penalty.hpp"

namespace sgam {

/// Binary class labels in {0, 1}.
using Labels = Eigen::VectorXi;

struct FitConfig {
  int max_iterations = 5000;
  /// Stop when |F_t - F_{t-1}| / max(1, |F_{t-1}|) falls below this.
  double tolerance = 1e-8;
  double backtracking = 0.5;
  /// Initial proximal step; 0 means 4n / |[1 Psi]|_op^2 from power iteration.
  double initial_step = 0.0;
  bool acceleration = true;
};

void validate(const FitConfig& cfg);

struct FitResult {
  Coefficients coef;
  /// Objective at the starting point followed by one entry per iteration.
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
};

struct LogisticGradient {
  RowMajorMatrix<double> B;
  double mu = 0.0;
};

/// ln(1 + e^x) without overflow.
double softplus(double x);
/// 1 / (1 + e^-x) without overflow.
double sigmoid(double x);

/// Linear predictor mu + sum_{j,l} Psi_ijl B_jl for every sample.
Eigen::VectorXd linear_predictor(const Coefficients& coef, const Design& design);

/// Mean logistic loss (1/n) sum softplus(eta_i) - y_i eta_i.
double logistic_loss(const Coefficients& coef, const Design& design, const Labels& y);

LogisticGradient logistic_gradient(const Coefficients& coef, const Design& design,
                                   const Labels& y);

/// Mean logistic loss plus the sparse group Slope penalty on B.
double penalized_objective(const Coefficients& coef, const Design& design, const Labels& y,
                           const PenaltyWeights& w);

/// 4n / sigma_max([1 Psi])^2 estimated with 20 power-iteration steps.
double estimate_step(const Design& design);

/// Accelerated proximal gradient with backtracking and function-value restart.
/// The intercept takes a plain gradient step; only B is penalized.
FitResult fit(const Design& design, const Labels& y, const PenaltyWeights& w,
              const FitConfig& cfg = {}, const std::optional<Coefficients>& start = std::nullopt);

void check_labels(const Labels& y);

}  // namespace sgam
