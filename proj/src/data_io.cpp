#include "sgam/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace sgam {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (options.header && header.empty()) {
      header = std::move(fields);
      width = header.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw InputError(source + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " + std::to_string(width));
    rows.push_back(std::move(fields));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw InputError(source + ": no data rows");
  if (width < 2) throw InputError(source + ": need at least one feature and a label column");
  if (options.expected_columns > 0 && static_cast<Index>(width) != options.expected_columns)
    throw InputError(source + ": has " + std::to_string(width) + " columns, expected " +
                     std::to_string(options.expected_columns));

  Index label_col = options.label_index < 0 ? static_cast<Index>(width) + options.label_index
                                            : options.label_index;
  if (options.label_name) {
    const auto it = std::find(header.begin(), header.end(), *options.label_name);
    if (it == header.end()) throw InputError(source + ": no column named '" + *options.label_name + "'");
    label_col = it - header.begin();
  }
  if (label_col < 0 || label_col >= static_cast<Index>(width))
    throw InputError(source + ": label column out of range");

  Dataset ds;
  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(width) - 1;
  ds.X.resize(n, d);
  ds.y.resize(n);
  for (Index c = 0, k = 0; c < static_cast<Index>(width); ++c) {
    if (c == label_col) {
      ds.label_name = header.empty() ? "label" : header[static_cast<std::size_t>(c)];
      continue;
    }
    ds.feature_names.push_back(header.empty() ? "x" + std::to_string(k + 1)
                                              : header[static_cast<std::size_t>(c)]);
    for (Index i = 0; i < n; ++i) {
      const auto& cell = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      const auto v = parse_number(cell);
      if (!v)
        throw InputError(source + ": non-numeric value '" + cell + "' at line " +
                         std::to_string(line_numbers[static_cast<std::size_t>(i)]) + ", column " +
                         std::to_string(c + 1));
      ds.X(i, k) = *v;
    }
    ++k;
  }

  // Labels: numeric 0/1, otherwise two strings mapped by first appearance.
  bool numeric = true;
  for (const auto& r : rows) {
    const auto v = parse_number(r[static_cast<std::size_t>(label_col)]);
    if (!v || (*v != 0.0 && *v != 1.0)) {
      numeric = false;
      break;
    }
  }
  std::vector<std::string> seen;
  for (Index i = 0; i < n; ++i) {
    const auto& cell = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(label_col)];
    if (numeric) {
      ds.y(i) = *parse_number(cell) == 1.0 ? 1 : 0;
      continue;
    }
    auto it = std::find(seen.begin(), seen.end(), cell);
    if (it == seen.end()) {
      if (seen.size() == 2)
        throw InputError(source + ": label column has more than two distinct values (line " +
                         std::to_string(line_numbers[static_cast<std::size_t>(i)]) + ")");
      seen.push_back(cell);
      it = seen.end() - 1;
    }
    ds.y(i) = static_cast<int>(it - seen.begin());
  }
  if (!numeric) {
    ds.label_values[0] = seen[0];
    ds.label_values[1] = seen.size() > 1 ? seen[1] : "";
  }
  return ds;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file " + path);
  return parse_csv(in, options, path);
}

void write_csv(const Dataset& ds, std::ostream& out) {
  const auto old_precision = out.precision(17);
  for (const auto& name : ds.feature_names) out << name << ',';
  out << ds.label_name << '\n';
  for (Index i = 0; i < ds.n(); ++i) {
    for (Index j = 0; j < ds.d(); ++j) out << ds.X(i, j) << ',';
    out << ds.y(i) << '\n';
  }
  out.precision(old_precision);
}

Dataset select_rows(const Dataset& ds, const std::vector<Index>& rows) {
  Dataset out;
  out.feature_names = ds.feature_names;
  out.label_name = ds.label_name;
  out.label_values = ds.label_values;
  out.X.resize(static_cast<Index>(rows.size()), ds.d());
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.X.row(static_cast<Index>(k)) = ds.X.row(rows[k]);
    out.y(static_cast<Index>(k)) = ds.y(rows[k]);
  }
  return out;
}

Split split(const Dataset& ds, Index train_size, std::uint64_t seed) {
  if (train_size < 1 || train_size >= ds.n())
    throw InputError("train size " + std::to_string(train_size) + " must lie in [1, " +
                     std::to_string(ds.n() - 1) + "]");
  std::vector<Index> perm(static_cast<std::size_t>(ds.n()));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  Split s;
  s.train_rows.assign(perm.begin(), perm.begin() + train_size);
  s.test_rows.assign(perm.begin() + train_size, perm.end());
  std::sort(s.train_rows.begin(), s.train_rows.end());
  std::sort(s.test_rows.begin(), s.test_rows.end());
  s.train = select_rows(ds, s.train_rows);
  s.test = select_rows(ds, s.test_rows);
  return s;
}

ScalerFit fit_scaler(const Eigen::MatrixXd& X) {
  if (X.rows() < 1) throw InputError("cannot fit a scaler on an empty matrix");
  ScalerFit out;
  out.scaler.input_dim = X.cols();
  std::vector<double> norms, mins, maxs;
  for (Index j = 0; j < X.cols(); ++j) {
    if (!X.col(j).allFinite()) throw InputError("non-finite value in column " + std::to_string(j));
    const double norm = X.col(j).norm();
    const double lo = norm > 0 ? X.col(j).minCoeff() / norm : 0.0;
    const double hi = norm > 0 ? X.col(j).maxCoeff() / norm : 0.0;
    if (!(norm > 0) || !(lo < hi)) {
      out.dropped.push_back(j);
      continue;
    }
    out.scaler.columns.push_back(j);
    norms.push_back(norm);
    mins.push_back(lo);
    maxs.push_back(hi);
  }
  const auto k = static_cast<Index>(norms.size());
  out.scaler.norm = Eigen::Map<Eigen::VectorXd>(norms.data(), k);
  out.scaler.min = Eigen::Map<Eigen::VectorXd>(mins.data(), k);
  out.scaler.max = Eigen::Map<Eigen::VectorXd>(maxs.data(), k);
  if (k == 0) throw InputError("every feature column is constant on the training data");
  return out;
}

Eigen::MatrixXd apply_scaler(const Scaler& scaler, const Eigen::MatrixXd& X) { return scaler.apply(X); }

}  // namespace sgam
