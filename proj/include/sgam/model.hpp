#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <string>
#include <vector>

#include "sgam/basis.hpp"
#include "sgam/penalty.hpp"
#include "sgam/solver.hpp"

namespace sgam {

inline constexpr const char* kLibraryVersion = "0.1.0";

enum class Method { Lasso, GroupLasso, SparseGroupLasso, SparseGroupSlope };

std::string to_string(Method method);
/// Accepts lasso, grouplasso, sparsegrouplasso, sparsegroupslope.
Method parse_method(const std::string& name);
/// Human-readable name used in report tables ("sparse group Lasso").
std::string display_name(Method method);

/// Maps raw feature columns to [0,1]: divide by the training column norm, then
/// min-max with the training range. Constant training columns are dropped;
/// `columns` lists the raw indices that survive.
struct Scaler {
  Index input_dim = 0;
  std::vector<Index> columns;
  Eigen::VectorXd norm;
  Eigen::VectorXd min;
  Eigen::VectorXd max;

  static Scaler identity(Index d);

  Index features() const { return static_cast<Index>(columns.size()); }
  /// Transform raw value of kept feature k, clamped to [0,1].
  double transform(Index k, double raw) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

void validate(const Scaler& scaler);

/// A fitted additive logistic classifier.
struct SpamModel {
  BasisSpec basis;
  Scaler scaler;
  Coefficients coef;
  Method method = Method::SparseGroupLasso;
};

double predict_logit(const SpamModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
/// Indicator of predict_logit >= 0.
int classify(const SpamModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
double predict_proba(const SpamModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Logits for every row of a raw feature matrix, through basis expansion.
Eigen::VectorXd predict_logits(const SpamModel& model, const Eigen::MatrixXd& X);
Labels classify_all(const SpamModel& model, const Eigen::MatrixXd& X);

/// Raw feature indices whose coefficient row has l2 norm above `threshold`.
std::vector<Index> selected_features(const SpamModel& model, double threshold = 0.0);
Index nonzero_coefficients(const SpamModel& model);

double misclassification_rate(const SpamModel& model, const Eigen::MatrixXd& X, const Labels& y);
/// Fraction of positions where the two label vectors differ.
double error_rate(const Labels& predicted, const Labels& truth);

nlohmann::json to_json(const SpamModel& model);
SpamModel model_from_json(const nlohmann::json& doc);
void save_model(const SpamModel& model, const std::string& path);
SpamModel load_model(const std::string& path);

}  // namespace sgam
