#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgam/data_io.hpp"
#include "sgam/model.hpp"
#include "sgam/tuning.hpp"

namespace sgam {

/// Spambase layout: 57 numeric features followed by the 0/1 spam label.
inline constexpr Index kSpambaseColumns = 58;
inline constexpr Index kSpambaseRows = 4601;

enum class TuningMode {
  Holdout,  // choose constants by error on the test split
  CrossValidation,
};

std::string to_string(TuningMode mode);
TuningMode parse_tuning_mode(const std::string& name);

struct SpamDemoOptions {
  Index train_size = 300;
  std::uint64_t seed = 1;
  TuningMode mode = TuningMode::Holdout;
  BasisKind basis = BasisKind::Cosine;
  /// 0 selects default_truncation(train_size).
  Index m = 0;
  int grid_points = 13;
  int folds = 10;
  int threads = 1;
  FitConfig fit;
  std::vector<Method> methods = {Method::Lasso, Method::GroupLasso, Method::SparseGroupLasso};
};

struct SpamDemoRow {
  Method method = Method::SparseGroupLasso;
  double c1 = 0.0;
  double c2 = 0.0;
  double test_error = 0.0;
  /// 1-based raw feature indices.
  std::vector<Index> selected;
  Index nonzero_coefficients = 0;
};

struct SpamDemoReport {
  TuningMode mode = TuningMode::Holdout;
  Index train_size = 0;
  Index test_size = 0;
  Index m = 0;
  std::vector<Index> dropped_columns;
  std::vector<SpamDemoRow> rows;

  const SpamDemoRow& row(Method method) const;
};

Dataset load_spambase(const std::string& path);

/// Random train/test split, scaler fitted on the training part, one tuned fit per method.
SpamDemoReport run_spam_demo(const Dataset& data, const SpamDemoOptions& options);

/// "{1-3,5,7}" style list of 1-based indices.
std::string format_index_set(const std::vector<Index>& indices);

void write_table(const SpamDemoReport& report, std::ostream& out);
void write_csv(const SpamDemoReport& report, std::ostream& out);

}  // namespace sgam
