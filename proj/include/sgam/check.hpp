#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sgam/basis.hpp"
#include "sgam/penalty.hpp"
#include "sgam/solver.hpp"

// Brute-force references used by the self-check command and the test suites.
// Nothing here calls the prox or gradient code it is meant to verify.
namespace sgam::check {

/// Minimizes f over the box [lo, hi] on grids of decreasing spacing. The first
/// spacing covers the whole box; each later spacing searches +-2 cells of the
/// previous spacing around the incumbent. A single spacing is a plain dense grid.
Eigen::VectorXd grid_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                              const std::vector<double>& spacings);

/// Grid minimizer of 1/2 |x - v|^2 + sum w_k |x|_(k).
Eigen::VectorXd grid_prox_sorted_l1(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                    double half_width, const std::vector<double>& spacings);

/// Grid minimizer of 1/2 |Z - B|_F^2 + step (lambda sum_j |Z_j|_2 + kappa sum |Z_jl|),
/// one row at a time (the objective separates over rows for constant weights).
RowMajorMatrix<double> grid_prox_sparse_group(const RowMajorMatrix<double>& B, double lambda,
                                              double kappa, double step, double half_width,
                                              const std::vector<double>& spacings);

/// Mean logistic loss summed in long double, independent of the solver's path.
long double reference_loss(const Coefficients& coef, const Design& design, const Labels& y);

/// Central differences of reference_loss with step h in every coordinate.
LogisticGradient finite_difference_gradient(const Coefficients& coef, const Design& design,
                                            const Labels& y, double h);

/// Gradient-descent fit of the unpenalized model with a fixed step.
Coefficients gradient_descent_fit(const Design& design, const Labels& y, int iterations);

struct Outcome {
  std::string property;
  bool passed = false;
  std::string detail;
};

struct SelfcheckOptions {
  std::uint64_t seed = 20240601;
  int prox_instances = 200;
  int gradient_instances = 50;
  /// Test hook: corrupts the implementation outputs so the checks must fail.
  bool perturb = false;
};

std::vector<Outcome> run_selfcheck(const SelfcheckOptions& options = {});

}  // namespace sgam::check
