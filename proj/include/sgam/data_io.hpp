#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sgam/model.hpp"
#include "sgam/solver.hpp"

namespace sgam {

struct Dataset {
  Eigen::MatrixXd X;
  Labels y;
  std::vector<std::string> feature_names;
  std::string label_name = "label";
  /// Original label spellings for classes 0 and 1.
  std::array<std::string, 2> label_values{"0", "1"};

  Index n() const { return X.rows(); }
  Index d() const { return X.cols(); }
};

struct CsvOptions {
  bool header = false;
  /// Label column by position (negative counts from the end) or by header name.
  Index label_index = -1;
  std::optional<std::string> label_name;
  /// Reject files whose width differs (0 accepts any consistent width).
  Index expected_columns = 0;
};

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source = "<stream>");
Dataset load_csv(const std::string& path, const CsvOptions& options = {});

/// Header row, features then the label column; round-trips through load_csv with header=true.
void write_csv(const Dataset& ds, std::ostream& out);

Dataset select_rows(const Dataset& ds, const std::vector<Index>& rows);

struct Split {
  Dataset train;
  Dataset test;
  std::vector<Index> train_rows;
  std::vector<Index> test_rows;
};

/// Uniform random subset of `train_size` rows without replacement; the rest is the test set.
Split split(const Dataset& ds, Index train_size, std::uint64_t seed);

struct ScalerFit {
  Scaler scaler;
  /// Raw columns dropped because they are constant on the training data.
  std::vector<Index> dropped;
};

/// Per column: divide by the training Euclidean norm, then min-max to [0,1].
ScalerFit fit_scaler(const Eigen::MatrixXd& X);
/// Applies a fitted scaler; values outside the training range clamp to [0,1].
Eigen::MatrixXd apply_scaler(const Scaler& scaler, const Eigen::MatrixXd& X);

}  // namespace sgam
