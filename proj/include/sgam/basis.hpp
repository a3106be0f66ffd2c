#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "sgam/errors.hpp"

namespace sgam {

using Eigen::Index;

enum class BasisKind { Cosine, Haar };

/// Orthonormal basis on [0,1] truncated to the first `m` non-constant functions.
/// The constant function is never part of the expansion; the intercept absorbs it.
struct BasisSpec {
  BasisKind kind = BasisKind::Cosine;
  Index m = 1;
};

inline Index default_truncation(Index n) { return std::min<Index>(n, 128); }

std::string to_string(BasisKind kind);
BasisKind parse_basis_kind(const std::string& name);

void validate(const BasisSpec& spec);

/// Haar functions are indexed by l = 2^level + shift, 0 <= shift < 2^level.
struct HaarIndex {
  int level = 0;
  Index shift = 0;

  friend bool operator==(const HaarIndex&, const HaarIndex&) = default;
};

inline HaarIndex haar_index(Index l) {
  if (l < 1) throw DomainError("haar index must be >= 1, got " + std::to_string(l));
  int level = 0;
  while ((Index{1} << (level + 1)) <= l) ++level;
  return {level, l - (Index{1} << level)};
}

inline Index haar_linear(const HaarIndex& hk) {
  if (hk.level < 0 || hk.shift < 0 || hk.shift >= (Index{1} << hk.level))
    throw DomainError("invalid haar (level, shift)");
  return (Index{1} << hk.level) + hk.shift;
}

namespace detail {

template <typename Scalar>
void check_unit_interval(Scalar x) {
  if (!(x >= Scalar(0) && x <= Scalar(1))) {
    std::ostringstream os;
    os << "basis argument " << x << " outside [0,1]";
    throw DomainError(os.str());
  }
}

}  // namespace detail

/// psi_0 = 1, psi_l(x) = sqrt(2) cos(pi l x).
template <typename Scalar>
Scalar eval_cosine(Index l, Scalar x) {
  detail::check_unit_interval(x);
  if (l < 0) throw DomainError("cosine index must be >= 0");
  if (l == 0) return Scalar(1);
  using std::cos;
  return std::numbers::sqrt2_v<Scalar> * cos(std::numbers::pi_v<Scalar> * Scalar(l) * x);
}

/// Haar wavelet 2^{h/2} psi(2^h x - k). The point x = 1 takes the value of the
/// interval to its left.
template <typename Scalar>
Scalar eval_haar(Index l, Scalar x) {
  detail::check_unit_interval(x);
  const HaarIndex hk = haar_index(l);
  using std::ldexp;
  using std::sqrt;
  const Scalar height = ldexp(hk.level % 2 == 0 ? Scalar(1) : std::numbers::sqrt2_v<Scalar>,
                              hk.level / 2);
  const Index count = Index{1} << hk.level;
  if (x == Scalar(1)) return hk.shift == count - 1 ? -height : Scalar(0);
  const Scalar t = ldexp(x, hk.level) - Scalar(hk.shift);
  if (t < Scalar(0) || t >= Scalar(1)) return Scalar(0);
  return t < Scalar(0.5) ? height : -height;
}

template <typename Scalar>
Scalar eval_basis(BasisKind kind, Index l, Scalar x) {
  return kind == BasisKind::Cosine ? eval_cosine(l, x) : eval_haar(l, x);
}

/// Basis evaluations stacked as an n x (d*m) matrix; column j*m + (l-1) holds
/// psi_l applied to feature j.
template <typename Scalar>
class ExpandedDesign {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  ExpandedDesign() = default;
  ExpandedDesign(Matrix psi, Index features, Index truncation)
      : psi_(std::move(psi)), d_(features), m_(truncation) {
    if (psi_.cols() != d_ * m_) throw DimensionError("design width != d*m");
  }

  Index n() const { return psi_.rows(); }
  Index d() const { return d_; }
  Index m() const { return m_; }

  Scalar operator()(Index i, Index j, Index l) const { return psi_(i, j * m_ + l); }

  const Matrix& matrix() const { return psi_; }

  /// Rows selected by `rows`, in the given order.
  template <typename IndexRange>
  ExpandedDesign subset(const IndexRange& rows) const {
    Matrix out(static_cast<Index>(rows.size()), psi_.cols());
    Index r = 0;
    for (auto i : rows) out.row(r++) = psi_.row(static_cast<Index>(i));
    return ExpandedDesign(std::move(out), d_, m_);
  }

 private:
  Matrix psi_;
  Index d_ = 0;
  Index m_ = 0;
};

template <typename Derived>
ExpandedDesign<typename Derived::Scalar> expand(const Eigen::MatrixBase<Derived>& X,
                                                const BasisSpec& spec) {
  using Scalar = typename Derived::Scalar;
  validate(spec);
  const Index n = X.rows();
  const Index d = X.cols();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) {
      const Scalar x = X(i, j);
      if (!(x >= Scalar(0) && x <= Scalar(1))) {
        std::ostringstream os;
        os << "feature value " << x << " at (row " << i << ", column " << j
           << ") outside [0,1]";
        throw DomainError(os.str());
      }
    }
  }
  typename ExpandedDesign<Scalar>::Matrix psi(n, d * spec.m);
  for (Index j = 0; j < d; ++j)
    for (Index l = 0; l < spec.m; ++l)
      for (Index i = 0; i < n; ++i)
        psi(i, j * spec.m + l) = eval_basis(spec.kind, l + 1, Scalar(X(i, j)));
  return ExpandedDesign<Scalar>(std::move(psi), d, spec.m);
}

using Design = ExpandedDesign<double>;

}  // namespace sgam
