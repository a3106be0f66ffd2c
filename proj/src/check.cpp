#include "sgam/check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace sgam::check {

Eigen::VectorXd grid_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                              const std::vector<double>& spacings) {
  const Index dim = lo.size();
  if (hi.size() != dim || spacings.empty()) throw InputError("grid_minimize: bad arguments");
  Eigen::VectorXd best = lo;
  double best_value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd point(dim);
  std::vector<long long> first(static_cast<std::size_t>(dim)), last(first), idx(first);

  for (std::size_t level = 0; level < spacings.size(); ++level) {
    const double s = spacings[level];
    for (Index k = 0; k < dim; ++k) {
      double a = lo(k), b = hi(k);
      if (level > 0) {
        const double window = 3.0 * spacings[level - 1];
        a = std::max(a, best(k) - window);
        b = std::min(b, best(k) + window);
      }
      // Points are integer multiples of s, so 0 is always on the grid.
      first[static_cast<std::size_t>(k)] = static_cast<long long>(std::ceil(a / s - 1e-9));
      last[static_cast<std::size_t>(k)] = static_cast<long long>(std::floor(b / s + 1e-9));
      if (last[static_cast<std::size_t>(k)] < first[static_cast<std::size_t>(k)])
        last[static_cast<std::size_t>(k)] = first[static_cast<std::size_t>(k)];
    }
    idx = first;
    for (;;) {
      for (Index k = 0; k < dim; ++k) point(k) = static_cast<double>(idx[static_cast<std::size_t>(k)]) * s;
      const double value = f(point);
      if (value < best_value) {
        best_value = value;
        best = point;
      }
      Index k = 0;
      for (; k < dim; ++k) {
        auto ku = static_cast<std::size_t>(k);
        if (++idx[ku] <= last[ku]) break;
        idx[ku] = first[ku];
      }
      if (k == dim) break;
    }
  }
  return best;
}

namespace {

// The minimizer of 1/2|x - v|^2 + P(x), with P sign-symmetric and nondecreasing in
// every |x_i|, lies coordinatewise between 0 and v.
void sign_box(const Eigen::VectorXd& v, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  lo = v.cwiseMin(0.0);
  hi = v.cwiseMax(0.0);
}

double reference_sorted_l1(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  std::vector<double> mags(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double total = 0.0;
  for (Index i = 0; i < x.size(); ++i) total += w(i) * mags[static_cast<std::size_t>(i)];
  return total;
}

}  // namespace

Eigen::VectorXd grid_prox_sorted_l1(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                    double half_width, const std::vector<double>& spacings) {
  Eigen::VectorXd lo, hi;
  if (half_width > 0) {
    lo = Eigen::VectorXd::Constant(v.size(), -half_width);
    hi = Eigen::VectorXd::Constant(v.size(), half_width);
  } else {
    sign_box(v, lo, hi);
  }
  auto f = [&](const Eigen::VectorXd& x) {
    return 0.5 * (x - v).squaredNorm() + reference_sorted_l1(x, w);
  };
  return grid_minimize(f, lo, hi, spacings);
}

RowMajorMatrix<double> grid_prox_sparse_group(const RowMajorMatrix<double>& B, double lambda,
                                              double kappa, double step, double half_width,
                                              const std::vector<double>& spacings) {
  RowMajorMatrix<double> Z(B.rows(), B.cols());
  for (Index j = 0; j < B.rows(); ++j) {
    const Eigen::VectorXd b = B.row(j).transpose();
    Eigen::VectorXd lo, hi;
    if (half_width > 0) {
      lo = Eigen::VectorXd::Constant(b.size(), -half_width);
      hi = Eigen::VectorXd::Constant(b.size(), half_width);
    } else {
      sign_box(b, lo, hi);
    }
    auto f = [&](const Eigen::VectorXd& z) {
      return 0.5 * (z - b).squaredNorm() + step * (lambda * z.norm() + kappa * z.cwiseAbs().sum());
    };
    Z.row(j) = grid_minimize(f, lo, hi, spacings).transpose();
  }
  return Z;
}

long double reference_loss(const Coefficients& coef, const Design& design, const Labels& y) {
  long double total = 0.0L;
  for (Index i = 0; i < design.n(); ++i) {
    long double eta = coef.mu;
    for (Index j = 0; j < design.d(); ++j)
      for (Index l = 0; l < design.m(); ++l)
        eta += static_cast<long double>(design(i, j, l)) * static_cast<long double>(coef.B(j, l));
    const long double sp = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
    total += sp - static_cast<long double>(y(i)) * eta;
  }
  return total / static_cast<long double>(design.n());
}

LogisticGradient finite_difference_gradient(const Coefficients& coef, const Design& design,
                                            const Labels& y, double h) {
  LogisticGradient g;
  g.B.resize(coef.B.rows(), coef.B.cols());
  Coefficients probe = coef;
  for (Index j = 0; j < coef.B.rows(); ++j) {
    for (Index l = 0; l < coef.B.cols(); ++l) {
      probe.B(j, l) = coef.B(j, l) + h;
      const long double up = reference_loss(probe, design, y);
      probe.B(j, l) = coef.B(j, l) - h;
      const long double down = reference_loss(probe, design, y);
      probe.B(j, l) = coef.B(j, l);
      g.B(j, l) = static_cast<double>((up - down) / (2.0L * h));
    }
  }
  probe.mu = coef.mu + h;
  const long double up = reference_loss(probe, design, y);
  probe.mu = coef.mu - h;
  const long double down = reference_loss(probe, design, y);
  g.mu = static_cast<double>((up - down) / (2.0L * h));
  return g;
}

Coefficients gradient_descent_fit(const Design& design, const Labels& y, int iterations) {
  const Index n = design.n();
  const Index p = design.d() * design.m();
  // Augmented design [1 Psi]; Lipschitz bound of the mean loss is |A|_2^2 / (4n).
  Eigen::MatrixXd A(n, p + 1);
  A.col(0).setOnes();
  A.rightCols(p) = design.matrix();
  const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
  const double step = 4.0 * static_cast<double>(n) / (sigma * sigma);
  const Eigen::VectorXd yd = y.cast<double>();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd eta = A * beta;
    Eigen::VectorXd r(n);
    for (Index i = 0; i < n; ++i) r(i) = 1.0 / (1.0 + std::exp(-eta(i))) - yd(i);
    beta -= step * (A.transpose() * r) / static_cast<double>(n);
  }
  Coefficients c(design.d(), design.m());
  c.mu = beta(0);
  for (Index k = 0; k < p; ++k) c.B(k / design.m(), k % design.m()) = beta(k + 1);
  return c;
}

namespace {

std::string describe(double worst, double tol) {
  std::ostringstream os;
  os << "max deviation " << worst << " (tolerance " << tol << ")";
  return os.str();
}

}  // namespace

std::vector<Outcome> run_selfcheck(const SelfcheckOptions& options) {
  std::vector<Outcome> outcomes;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> entry(-3.0, 3.0);
  std::uniform_real_distribution<double> weight(0.05, 1.5);
  std::uniform_int_distribution<int> small(1, 3);
  const double corrupt = options.perturb ? 0.1 : 0.0;

  {
    double worst = 0.0;
    for (int t = 0; t < options.prox_instances; ++t) {
      const Index d = small(rng), m = small(rng);
      RowMajorMatrix<double> B(d, m);
      for (Index k = 0; k < B.size(); ++k) B.data()[k] = entry(rng);
      const double lambda = weight(rng), kappa = weight(rng), step = weight(rng);
      RowMajorMatrix<double> Z = prox_sparse_group(B, PenaltyWeights::constant(d, m, lambda, kappa), step);
      Z.array() += corrupt;
      const auto ref = grid_prox_sparse_group(B, lambda, kappa, step, 0.0, {0.1, 0.01});
      worst = std::max(worst, (Z - ref).cwiseAbs().maxCoeff());
    }
    outcomes.push_back({"prox_sparse_group matches grid oracle", worst <= 2e-2, describe(worst, 2e-2)});
  }

  {
    double worst = 0.0;
    for (int t = 0; t < options.prox_instances; ++t) {
      Eigen::VectorXd v(2);
      v << entry(rng), entry(rng);
      Eigen::VectorXd w(2);
      w << weight(rng), weight(rng);
      if (w(1) > w(0)) std::swap(w(0), w(1));
      Eigen::VectorXd x = prox_sorted_l1(v, w);
      x.array() += corrupt;
      const auto ref = grid_prox_sorted_l1(v, w, 0.0, {0.1, 0.01, 0.001});
      worst = std::max(worst, (x - ref).cwiseAbs().maxCoeff());
    }
    outcomes.push_back({"prox_sorted_l1 matches grid oracle", worst <= 2e-3, describe(worst, 2e-3)});
  }

  {
    double worst = 0.0;
    for (int t = 0; t < options.prox_instances; ++t) {
      const Index m = small(rng) + 2;
      Eigen::VectorXd v(m);
      for (Index k = 0; k < m; ++k) v(k) = entry(rng);
      const double c = weight(rng);
      Eigen::VectorXd x = prox_sorted_l1(v, Eigen::VectorXd::Constant(m, c));
      x.array() += corrupt;
      Eigen::VectorXd st(m);
      for (Index k = 0; k < m; ++k) st(k) = std::copysign(std::max(std::abs(v(k)) - c, 0.0), v(k));
      worst = std::max(worst, (x - st).cwiseAbs().maxCoeff());
    }
    outcomes.push_back({"sorted l1 prox with equal weights is soft thresholding", worst <= 1e-12,
                        describe(worst, 1e-12)});
  }

  {
    double worst_excess = 0.0;
    bool ok = true;
    std::uniform_real_distribution<double> eps(-0.01, 0.01);
    for (int t = 0; t < options.prox_instances; ++t) {
      const Index d = small(rng), m = small(rng);
      RowMajorMatrix<double> B(d, m);
      for (Index k = 0; k < B.size(); ++k) B.data()[k] = entry(rng);
      Eigen::VectorXd lam(d), kap(m);
      for (Index k = 0; k < d; ++k) lam(k) = weight(rng);
      for (Index k = 0; k < m; ++k) kap(k) = weight(rng);
      std::sort(lam.data(), lam.data() + d, std::greater<>());
      std::sort(kap.data(), kap.data() + m, std::greater<>());
      const PenaltyWeights w{lam, kap};
      const double step = weight(rng);
      RowMajorMatrix<double> Z = prox_sparse_group(B, w, step);
      Z.array() += corrupt;
      auto obj = [&](const RowMajorMatrix<double>& X) {
        return 0.5 * (X - B).squaredNorm() + step * sparse_group_slope_norm(X, w);
      };
      const double base = obj(Z);
      for (int k = 0; k < 20; ++k) {
        RowMajorMatrix<double> P = Z;
        for (Index q = 0; q < P.size(); ++q) P.data()[q] += eps(rng);
        const double excess = base - obj(P);
        worst_excess = std::max(worst_excess, excess);
        if (excess > 1e-12) ok = false;
      }
    }
    outcomes.push_back({"sparse group Slope prox beats local perturbations", ok,
                        describe(worst_excess, 1e-12)});
  }

  {
    double worst = 0.0;
    bool ok = true;
    for (int t = 0; t < options.gradient_instances; ++t) {
      const Index n = std::uniform_int_distribution<Index>(5, 30)(rng);
      const Index d = small(rng);
      const Index m = std::uniform_int_distribution<Index>(1, 4)(rng);
      Eigen::MatrixXd X(n, d);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (Index k = 0; k < X.size(); ++k) X.data()[k] = unit(rng);
      const Design design = expand(X, {t % 2 ? BasisKind::Haar : BasisKind::Cosine, m});
      Labels y(n);
      for (Index i = 0; i < n; ++i) y(i) = unit(rng) < 0.5 ? 1 : 0;
      Coefficients coef(d, m);
      for (Index k = 0; k < coef.B.size(); ++k) coef.B.data()[k] = 0.5 * entry(rng);
      coef.mu = 0.3 * entry(rng);
      LogisticGradient g = logistic_gradient(coef, design, y);
      g.B.array() += corrupt;
      g.mu += corrupt;
      const LogisticGradient fd = finite_difference_gradient(coef, design, y, 1e-5);
      auto compare = [&](double a, double b) {
        const double diff = std::abs(a - b);
        worst = std::max(worst, diff);
        if (diff > std::max(1e-5 * std::abs(b), 1e-8)) ok = false;
      };
      for (Index k = 0; k < g.B.size(); ++k) compare(g.B.data()[k], fd.B.data()[k]);
      compare(g.mu, fd.mu);
    }
    outcomes.push_back({"logistic_gradient matches central differences", ok, describe(worst, 1e-5)});
  }
  return outcomes;
}

}  // namespace sgam::check
