#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sgam/errors.hpp"

namespace sgam {

using Eigen::Index;

template <typename Scalar>
using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Basis coefficients B (d x m, feature rows) and the unpenalized intercept.
struct Coefficients {
  RowMajorMatrix<double> B;
  double mu = 0.0;

  Coefficients() = default;
  Coefficients(Index d, Index m) : B(RowMajorMatrix<double>::Zero(d, m)) {}
};

/// Row weights (lambda, one per feature rank) and entry weights (kappa, one per
/// within-row rank). Both sequences are nonincreasing; a constant sequence is the
/// sparse group Lasso, an all-zero sequence switches that penalty part off.
struct PenaltyWeights {
  Vector<double> row;
  Vector<double> entry;

  static PenaltyWeights constant(Index d, Index m, double lambda, double kappa) {
    return {Vector<double>::Constant(d, lambda), Vector<double>::Constant(m, kappa)};
  }
};

namespace detail {

template <typename Derived>
void check_weights(const Eigen::MatrixBase<Derived>& w, const char* what) {
  for (Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(static_cast<double>(w(i))) || w(i) < 0)
      throw InputError(std::string(what) + " weights must be finite and nonnegative");
    if (i > 0 && w(i) > w(i - 1))
      throw InputError(std::string(what) + " weights must be nonincreasing");
  }
}

template <typename Derived>
bool is_constant(const Eigen::MatrixBase<Derived>& w) {
  return w.size() == 0 || (w.array() == w(0)).all();
}

// Permutation that orders |v| decreasingly; ties keep ascending index order.
template <typename Derived>
std::vector<Index> order_by_magnitude(const Eigen::MatrixBase<Derived>& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });
  return order;
}

}  // namespace detail

inline void validate(const PenaltyWeights& w) {
  detail::check_weights(w.row, "row");
  detail::check_weights(w.entry, "entry");
}

inline bool is_lasso_type(const PenaltyWeights& w) {
  return detail::is_constant(w.row) && detail::is_constant(w.entry);
}

/// Sorted-l1 norm: sum_k w_k |v|_(k) with |v| in decreasing order.
template <typename DerivedV, typename DerivedW>
typename DerivedV::Scalar sorted_l1_norm(const Eigen::MatrixBase<DerivedV>& v,
                                         const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedV::Scalar;
  if (v.size() != w.size()) throw DimensionError("sorted l1: length mismatch");
  Vector<Scalar> mags = v.cwiseAbs();
  std::sort(mags.data(), mags.data() + mags.size(), std::greater<Scalar>());
  return mags.dot(w.template cast<Scalar>());
}

template <typename Derived>
typename Derived::Scalar sparse_group_slope_norm(const Eigen::MatrixBase<Derived>& B,
                                                 const PenaltyWeights& w) {
  using Scalar = typename Derived::Scalar;
  if (B.rows() != w.row.size() || B.cols() != w.entry.size())
    throw DimensionError("penalty weights do not match coefficient dimensions");
  Vector<Scalar> norms = B.rowwise().norm();
  Scalar total = sorted_l1_norm(norms, w.row);
  for (Index j = 0; j < B.rows(); ++j) total += sorted_l1_norm(B.row(j).transpose(), w.entry);
  return total;
}

template <typename Derived>
Vector<typename Derived::Scalar> soft_threshold(const Eigen::MatrixBase<Derived>& v,
                                                typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  if (t < 0) throw InputError("soft threshold must be nonnegative");
  Vector<Scalar> out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const Scalar a = std::abs(v(i)) - t;
    out(i) = a > Scalar(0) ? std::copysign(a, v(i)) : Scalar(0);
  }
  return out;
}

/// argmin_x 1/2 |x - v|^2 + sum_k w_k |x|_(k). Pool-adjacent-violators on the
/// magnitudes sorted decreasingly, clipped at zero, then mapped back.
template <typename DerivedV, typename DerivedW>
Vector<typename DerivedV::Scalar> prox_sorted_l1(const Eigen::MatrixBase<DerivedV>& v,
                                                 const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedV::Scalar;
  if (v.size() != w.size()) throw DimensionError("sorted l1 prox: length mismatch");
  detail::check_weights(w, "sorted l1");

  const Index n = v.size();
  const std::vector<Index> order = detail::order_by_magnitude(v);

  struct Block {
    Index begin;
    Index end;  // exclusive
    Scalar sum;
    Scalar mean() const { return sum / Scalar(end - begin); }
  };
  std::vector<Block> stack;
  stack.reserve(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    stack.push_back({k, k + 1, std::abs(v(order[k])) - Scalar(w(k))});
    while (stack.size() > 1 && stack.back().mean() >= stack[stack.size() - 2].mean()) {
      const Block top = stack.back();
      stack.pop_back();
      stack.back().end = top.end;
      stack.back().sum += top.sum;
    }
  }

  Vector<Scalar> out(n);
  for (const Block& b : stack) {
    const Scalar value = std::max(b.mean(), Scalar(0));
    for (Index k = b.begin; k < b.end; ++k) {
      const Index i = order[k];
      out(i) = value > Scalar(0) ? std::copysign(value, v(i)) : Scalar(0);
    }
  }
  return out;
}

/// Block soft-thresholding max(1 - t/|row|, 0) row.
template <typename Derived>
Vector<typename Derived::Scalar> prox_group_l2(const Eigen::MatrixBase<Derived>& row,
                                               typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  if (t < 0) throw InputError("group threshold must be nonnegative");
  const Scalar norm = row.norm();
  if (norm <= t) return Vector<Scalar>::Zero(row.size());
  return (Scalar(1) - t / norm) * row;
}

/// Proximal map of step * sparse_group_slope_norm. Entries are shrunk within each
/// row first, then the resulting row norms are shrunk across rows. Exact when both
/// weight sequences are constant.
template <typename Derived>
RowMajorMatrix<typename Derived::Scalar> prox_sparse_group(const Eigen::MatrixBase<Derived>& B,
                                                           const PenaltyWeights& w,
                                                           typename Derived::Scalar step) {
  using Scalar = typename Derived::Scalar;
  if (!(step > 0)) throw InputError("prox step must be positive");
  if (B.rows() != w.row.size() || B.cols() != w.entry.size())
    throw DimensionError("penalty weights do not match coefficient dimensions");
  validate(w);

  const Index d = B.rows();
  const bool constant_entry = detail::is_constant(w.entry);
  const bool constant_row = detail::is_constant(w.row);
  const Vector<Scalar> entry_w = step * w.entry.template cast<Scalar>();

  RowMajorMatrix<Scalar> Z(B.rows(), B.cols());
  Vector<Scalar> norms(d);
  for (Index j = 0; j < d; ++j) {
    if (constant_entry) {
      Z.row(j) = soft_threshold(B.row(j).transpose(), entry_w.size() ? entry_w(0) : Scalar(0));
    } else {
      Z.row(j) = prox_sorted_l1(B.row(j).transpose(), entry_w);
    }
    norms(j) = Z.row(j).norm();
  }

  Vector<Scalar> shrunk(d);
  if (constant_row) {
    const Scalar t = d ? step * Scalar(w.row(0)) : Scalar(0);
    for (Index j = 0; j < d; ++j) shrunk(j) = std::max(norms(j) - t, Scalar(0));
  } else {
    shrunk = prox_sorted_l1(norms, (step * w.row.template cast<Scalar>()).eval());
  }

  for (Index j = 0; j < d; ++j) {
    if (shrunk(j) > Scalar(0))
      Z.row(j) *= shrunk(j) / norms(j);
    else
      Z.row(j).setZero();
  }
  return Z;
}

}  // namespace sgam
