#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sgam/basis.hpp"
#include "sgam/model.hpp"
#include "sgam/solver.hpp"
#include "sgam/tuning.hpp"

namespace sgam {

/// How the three true component vectors are normalized on the training design.
enum class ComponentScale {
  UnitNorm,      // centred, Euclidean norm 1
  UnitVariance,  // centred, Euclidean norm sqrt(n)
};

std::string to_string(ComponentScale scale);
ComponentScale parse_component_scale(const std::string& name);

struct SimConfig {
  Index d = 10;
  Index n = 100;
  int replications = 10;
  Index test_size = 100;
  std::uint64_t seed = 1;
  /// Basis truncation; 0 selects default_truncation(n).
  Index m = 0;
  BasisKind basis = BasisKind::Cosine;
  int folds = 10;
  /// Log-spaced values per grid axis over [1e-2, 1e1].
  int grid_points = 13;
  int threads = 1;
  FitConfig fit;
  ComponentScale scale = ComponentScale::UnitNorm;
  std::vector<Method> methods = {Method::GroupLasso, Method::Lasso, Method::SparseGroupLasso};
};

void validate(const SimConfig& cfg);

/// X_ij = (W_ij + U_i) / 2 with W, U iid uniform on [0,1].
Eigen::MatrixXd gen_design(Index n, Index d, std::uint64_t seed);

/// Raw additive components: |x - 0.6|, (2x - 1)^2, sin(2 pi x) / (2 - sin(2 pi x)).
double raw_component(int k, double x);

/// Affine maps (x - center) / scale applied to each raw component vector.
struct ComponentMaps {
  std::array<double, 3> center{};
  std::array<double, 3> scale{1.0, 1.0, 1.0};
};

struct TrueLogit {
  Eigen::VectorXd g;
  std::array<Eigen::VectorXd, 3> components;
  ComponentMaps maps;
};

/// Evaluates the components on columns 0..2 and centres/scales them on this design.
TrueLogit true_logit(const Eigen::MatrixXd& X, ComponentScale scale = ComponentScale::UnitNorm);
/// Evaluates the components with maps fitted elsewhere (test data).
TrueLogit true_logit(const Eigen::MatrixXd& X, const ComponentMaps& maps);

/// Independent Bernoulli(sigmoid(g_i)) draws.
Labels gen_labels(const Eigen::VectorXd& g, std::uint64_t seed);

/// Bayes rule I{g >= 0}.
Labels bayes_classify(const Eigen::VectorXd& g);

struct ReplicationRecord {
  int replication = 0;
  Method method = Method::SparseGroupLasso;
  double c1 = 0.0;
  double c2 = 0.0;
  double test_error = 0.0;
  double oracle_error = 0.0;
  double excess_risk = 0.0;
  Index selected_features = 0;
  Index nonzero_coefficients = 0;
};

struct MethodSummary {
  Method method = Method::SparseGroupLasso;
  double excess_risk = 0.0;
  double selected_features = 0.0;
  double nonzero_coefficients = 0.0;
};

struct ExperimentReport {
  Index d = 0;
  Index n = 0;
  std::vector<Method> methods;
  /// Ordered by replication, then by position in `methods`.
  std::vector<ReplicationRecord> records;

  MethodSummary summary(Method method) const;
};

/// Train on n samples with per-replication K-fold CV for each method, then
/// compare test misclassification with the Bayes rule on fresh test samples.
ExperimentReport run_experiment(const SimConfig& cfg);

void write_csv(const std::vector<ExperimentReport>& reports, std::ostream& out);
/// Aligned table: one block per d, two lines per n (excess risk, then
/// "(features; coefficients)").
void write_table(const std::vector<ExperimentReport>& reports, std::ostream& out);

}  // namespace sgam
