#include "sgam/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sgam {

std::string to_string(Method method) {
  switch (method) {
    case Method::Lasso: return "lasso";
    case Method::GroupLasso: return "grouplasso";
    case Method::SparseGroupLasso: return "sparsegrouplasso";
    case Method::SparseGroupSlope: return "sparsegroupslope";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "lasso") return Method::Lasso;
  if (name == "grouplasso") return Method::GroupLasso;
  if (name == "sparsegrouplasso") return Method::SparseGroupLasso;
  if (name == "sparsegroupslope") return Method::SparseGroupSlope;
  throw InputError("unknown method '" + name +
                   "' (expected lasso, grouplasso, sparsegrouplasso or sparsegroupslope)");
}

std::string display_name(Method method) {
  switch (method) {
    case Method::Lasso: return "Lasso";
    case Method::GroupLasso: return "group Lasso";
    case Method::SparseGroupLasso: return "sparse group Lasso";
    case Method::SparseGroupSlope: return "sparse group Slope";
  }
  return "unknown";
}

Scaler Scaler::identity(Index d) {
  Scaler s;
  s.input_dim = d;
  s.columns.resize(static_cast<std::size_t>(d));
  for (Index j = 0; j < d; ++j) s.columns[static_cast<std::size_t>(j)] = j;
  s.norm = Eigen::VectorXd::Ones(d);
  s.min = Eigen::VectorXd::Zero(d);
  s.max = Eigen::VectorXd::Ones(d);
  return s;
}

double Scaler::transform(Index k, double raw) const {
  const double u = (raw / norm(k) - min(k)) / (max(k) - min(k));
  return std::clamp(u, 0.0, 1.0);
}

Eigen::MatrixXd Scaler::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != input_dim)
    throw DimensionError("expected " + std::to_string(input_dim) + " feature columns, got " +
                         std::to_string(X.cols()));
  Eigen::MatrixXd out(X.rows(), features());
  for (Index k = 0; k < features(); ++k) {
    const Index col = columns[static_cast<std::size_t>(k)];
    for (Index i = 0; i < X.rows(); ++i) {
      const double raw = X(i, col);
      if (!std::isfinite(raw))
        throw InputError("non-finite feature value at (row " + std::to_string(i) + ", column " +
                         std::to_string(col) + ")");
      out(i, k) = transform(k, raw);
    }
  }
  return out;
}

void validate(const Scaler& s) {
  const Index d = s.features();
  if (s.norm.size() != d || s.min.size() != d || s.max.size() != d)
    throw DimensionError("scaler arrays must have one entry per kept feature");
  for (Index k = 0; k < d; ++k) {
    const Index col = s.columns[static_cast<std::size_t>(k)];
    if (col < 0 || col >= s.input_dim) throw InputError("scaler column index out of range");
    if (!(s.norm(k) > 0)) throw InputError("scaler norm must be positive");
    if (!(s.min(k) < s.max(k))) throw InputError("scaler requires min < max for every feature");
  }
}

namespace {

void check_input(const SpamModel& model, Index length) {
  if (length != model.scaler.input_dim)
    throw DimensionError("feature vector has length " + std::to_string(length) + ", model expects " +
                         std::to_string(model.scaler.input_dim));
}

}  // namespace

double predict_logit(const SpamModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_input(model, x.size());
  double g = model.coef.mu;
  const auto& B = model.coef.B;
  for (Index k = 0; k < model.scaler.features(); ++k) {
    const double raw = x(model.scaler.columns[static_cast<std::size_t>(k)]);
    if (!std::isfinite(raw)) throw InputError("non-finite feature value");
    if (B.row(k).isZero(0.0)) continue;
    const double u = model.scaler.transform(k, raw);
    for (Index l = 0; l < B.cols(); ++l) g += B(k, l) * eval_basis(model.basis.kind, l + 1, u);
  }
  return g;
}

int classify(const SpamModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return predict_logit(model, x) >= 0.0 ? 1 : 0;
}

double predict_proba(const SpamModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return sigmoid(predict_logit(model, x));
}

Eigen::VectorXd predict_logits(const SpamModel& model, const Eigen::MatrixXd& X) {
  const Design design = expand(model.scaler.apply(X), model.basis);
  return linear_predictor(model.coef, design);
}

Labels classify_all(const SpamModel& model, const Eigen::MatrixXd& X) {
  const Eigen::VectorXd g = predict_logits(model, X);
  return (g.array() >= 0.0).cast<int>();
}

std::vector<Index> selected_features(const SpamModel& model, double threshold) {
  if (!(threshold >= 0)) throw InputError("selection threshold must be nonnegative");
  std::vector<Index> out;
  for (Index k = 0; k < model.coef.B.rows(); ++k)
    if (model.coef.B.row(k).norm() > threshold)
      out.push_back(model.scaler.columns[static_cast<std::size_t>(k)]);
  return out;
}

Index nonzero_coefficients(const SpamModel& model) {
  return (model.coef.B.array() != 0.0).count();
}

double error_rate(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) throw DimensionError("label vectors differ in length");
  if (truth.size() == 0) throw InputError("empty label vector");
  return static_cast<double>((predicted.array() != truth.array()).count()) /
         static_cast<double>(truth.size());
}

double misclassification_rate(const SpamModel& model, const Eigen::MatrixXd& X, const Labels& y) {
  if (X.rows() != y.size()) throw DimensionError("row count and label count differ");
  return error_rate(classify_all(model, X), y);
}

nlohmann::json to_json(const SpamModel& model) {
  nlohmann::json doc;
  doc["library_version"] = kLibraryVersion;
  doc["method"] = to_string(model.method);
  doc["basis"] = {{"kind", to_string(model.basis.kind)}, {"m", model.basis.m}};
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  doc["scaler"] = {{"input_dim", model.scaler.input_dim},
                   {"columns", model.scaler.columns},
                   {"norm", vec(model.scaler.norm)},
                   {"min", vec(model.scaler.min)},
                   {"max", vec(model.scaler.max)}};
  doc["mu"] = model.coef.mu;
  nlohmann::json rows = nlohmann::json::array();
  for (Index j = 0; j < model.coef.B.rows(); ++j) {
    std::vector<double> row(static_cast<std::size_t>(model.coef.B.cols()));
    for (Index l = 0; l < model.coef.B.cols(); ++l) row[static_cast<std::size_t>(l)] = model.coef.B(j, l);
    rows.push_back(row);
  }
  doc["B"] = rows;
  return doc;
}

SpamModel model_from_json(const nlohmann::json& doc) {
  try {
    SpamModel model;
    model.method = parse_method(doc.at("method").get<std::string>());
    model.basis.kind = parse_basis_kind(doc.at("basis").at("kind").get<std::string>());
    model.basis.m = doc.at("basis").at("m").get<Index>();
    validate(model.basis);

    const auto& sc = doc.at("scaler");
    model.scaler.input_dim = sc.at("input_dim").get<Index>();
    model.scaler.columns = sc.at("columns").get<std::vector<Index>>();
    auto vec = [](const nlohmann::json& a) {
      const auto v = a.get<std::vector<double>>();
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size())));
    };
    model.scaler.norm = vec(sc.at("norm"));
    model.scaler.min = vec(sc.at("min"));
    model.scaler.max = vec(sc.at("max"));
    validate(model.scaler);

    const Index d = model.scaler.features();
    const auto& rows = doc.at("B");
    if (static_cast<Index>(rows.size()) != d) throw DimensionError("B row count != feature count");
    model.coef = Coefficients(d, model.basis.m);
    for (Index j = 0; j < d; ++j) {
      const auto row = rows.at(static_cast<std::size_t>(j)).get<std::vector<double>>();
      if (static_cast<Index>(row.size()) != model.basis.m) throw DimensionError("B row length != m");
      for (Index l = 0; l < model.basis.m; ++l) model.coef.B(j, l) = row[static_cast<std::size_t>(l)];
    }
    model.coef.mu = doc.at("mu").get<double>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const SpamModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file " + path);
  out << to_json(model).dump(2) << '\n';
}

SpamModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("cannot parse model file " + path + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace sgam
