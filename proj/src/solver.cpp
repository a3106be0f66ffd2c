#include "sgam/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sgam {

namespace {

Eigen::Map<const Eigen::VectorXd> flat(const RowMajorMatrix<double>& B) {
  return {B.data(), B.size()};
}

void check_problem(const Design& design, const Labels& y) {
  if (y.size() != design.n())
    throw DimensionError("label count " + std::to_string(y.size()) + " != sample count " +
                         std::to_string(design.n()));
  check_labels(y);
}

void check_coef(const Coefficients& coef, const Design& design) {
  if (coef.B.rows() != design.d() || coef.B.cols() != design.m())
    throw DimensionError("coefficient matrix is " + std::to_string(coef.B.rows()) + "x" +
                         std::to_string(coef.B.cols()) + ", design expects " +
                         std::to_string(design.d()) + "x" + std::to_string(design.m()));
}

double mean_loss(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  double total = 0.0;
  for (Index i = 0; i < eta.size(); ++i) total += softplus(eta(i)) - y(i) * eta(i);
  return total / static_cast<double>(eta.size());
}

// Residual sigma(eta) - y scaled by 1/n.
Eigen::VectorXd scaled_residual(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  Eigen::VectorXd r(eta.size());
  for (Index i = 0; i < eta.size(); ++i) r(i) = sigmoid(eta(i)) - y(i);
  return r / static_cast<double>(eta.size());
}

}  // namespace

void validate(const FitConfig& cfg) {
  if (cfg.max_iterations < 1) throw InputError("max_iterations must be positive");
  if (!(cfg.tolerance > 0)) throw InputError("tolerance must be positive");
  if (!(cfg.backtracking > 0 && cfg.backtracking < 1))
    throw InputError("backtracking factor must lie in (0,1)");
  if (!(cfg.initial_step >= 0)) throw InputError("initial step must be nonnegative");
}

void check_labels(const Labels& y) {
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) != 0 && y(i) != 1)
      throw InputError("label " + std::to_string(y(i)) + " at index " + std::to_string(i) +
                       " is not binary");
}

double softplus(double x) {
  if (x > 30.0) return x + std::exp(-x);
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::VectorXd linear_predictor(const Coefficients& coef, const Design& design) {
  check_coef(coef, design);
  Eigen::VectorXd eta = design.matrix() * flat(coef.B);
  eta.array() += coef.mu;
  return eta;
}

double logistic_loss(const Coefficients& coef, const Design& design, const Labels& y) {
  check_problem(design, y);
  return mean_loss(linear_predictor(coef, design), y.cast<double>());
}

LogisticGradient logistic_gradient(const Coefficients& coef, const Design& design,
                                   const Labels& y) {
  check_problem(design, y);
  const Eigen::VectorXd r = scaled_residual(linear_predictor(coef, design), y.cast<double>());
  LogisticGradient g;
  g.B.resize(design.d(), design.m());
  Eigen::Map<Eigen::VectorXd>(g.B.data(), g.B.size()) = design.matrix().transpose() * r;
  g.mu = r.sum();
  return g;
}

double penalized_objective(const Coefficients& coef, const Design& design, const Labels& y,
                           const PenaltyWeights& w) {
  return logistic_loss(coef, design, y) + sparse_group_slope_norm(coef.B, w);
}

double estimate_step(const Design& design) {
  const auto& psi = design.matrix();
  const Index p = psi.cols();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(p + 1).normalized();
  double sigma2 = 0.0;
  for (int it = 0; it < 20; ++it) {
    Eigen::VectorXd av = psi * v.tail(p);
    av.array() += v(0);
    sigma2 = av.squaredNorm();
    Eigen::VectorXd next(p + 1);
    next(0) = av.sum();
    next.tail(p) = psi.transpose() * av;
    const double norm = next.norm();
    if (norm == 0.0) break;
    v = next / norm;
  }
  if (!(sigma2 > 0)) return 1.0;
  return 4.0 * static_cast<double>(design.n()) / sigma2;
}

FitResult fit(const Design& design, const Labels& y, const PenaltyWeights& w, const FitConfig& cfg,
              const std::optional<Coefficients>& start) {
  validate(cfg);
  check_problem(design, y);
  validate(w);
  if (w.row.size() != design.d() || w.entry.size() != design.m())
    throw DimensionError("penalty weights do not match the design dimensions");
  const Index n = design.n();
  if (n < 2) throw InputError("need at least two samples");
  const Eigen::VectorXd yd = y.cast<double>();
  const double ybar = yd.mean();
  if (ybar == 0.0 || ybar == 1.0)
    throw InputError("labels contain a single class; the intercept has no finite minimizer");

  const auto& psi = design.matrix();
  auto eta_of = [&](const RowMajorMatrix<double>& B, double mu) {
    Eigen::VectorXd eta = psi * flat(B);
    eta.array() += mu;
    return eta;
  };
  auto penalty = [&](const RowMajorMatrix<double>& B) { return sparse_group_slope_norm(B, w); };

  Coefficients x;
  if (start) {
    check_coef(*start, design);
    x = *start;
  } else {
    x = Coefficients(design.d(), design.m());
    const double p = std::clamp(ybar, 0.01, 0.99);
    x.mu = std::log(p / (1.0 - p));
  }

  Eigen::VectorXd eta_x = eta_of(x.B, x.mu);
  double F_x = mean_loss(eta_x, yd) + penalty(x.B);

  FitResult result;
  result.objective.reserve(static_cast<std::size_t>(cfg.max_iterations) + 1);
  result.objective.push_back(F_x);

  double step = cfg.initial_step > 0 ? cfg.initial_step : estimate_step(design);
  Coefficients yk = x;
  Eigen::VectorXd eta_y = eta_x;
  bool at_x = true;  // momentum point coincides with the current iterate
  double theta = 1.0;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    result.iterations = it;
    const double f_y = mean_loss(eta_y, yd);
    const Eigen::VectorXd r = scaled_residual(eta_y, yd);
    RowMajorMatrix<double> grad(design.d(), design.m());
    Eigen::Map<Eigen::VectorXd>(grad.data(), grad.size()) = psi.transpose() * r;
    const double grad_mu = r.sum();

    Coefficients cand;
    Eigen::VectorXd eta_c;
    double f_c = 0.0;
    for (;;) {
      cand.B = prox_sparse_group(yk.B - step * grad, w, step);
      cand.mu = yk.mu - step * grad_mu;
      eta_c = eta_of(cand.B, cand.mu);
      f_c = mean_loss(eta_c, yd);
      const RowMajorMatrix<double> dB = cand.B - yk.B;
      const double dmu = cand.mu - yk.mu;
      const double model = f_y + (grad.array() * dB.array()).sum() + grad_mu * dmu +
                           (dB.squaredNorm() + dmu * dmu) / (2.0 * step);
      if (f_c <= model + 1e-14 * std::max(1.0, std::abs(f_y))) break;
      step *= cfg.backtracking;
      if (step < 1e-30) throw NumericError("backtracking step underflow");
    }
    const double F_c = f_c + penalty(cand.B);

    if (F_c > F_x) {
      if (at_x) {
        // A plain proximal step from the iterate no longer decreases F.
        result.objective.push_back(F_x);
        result.converged = true;
        break;
      }
      theta = 1.0;
      yk = x;
      eta_y = eta_x;
      at_x = true;
      result.objective.push_back(F_x);
      continue;
    }

    const double change = std::abs(F_x - F_c) / std::max(1.0, std::abs(F_x));
    Coefficients prev = std::move(x);
    Eigen::VectorXd eta_prev = std::move(eta_x);
    x = std::move(cand);
    eta_x = std::move(eta_c);
    F_x = F_c;
    result.objective.push_back(F_x);

    if (change < cfg.tolerance) {
      result.converged = true;
      break;
    }

    if (cfg.acceleration) {
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      const double beta = (theta - 1.0) / theta_next;
      theta = theta_next;
      yk.B = x.B + beta * (x.B - prev.B);
      yk.mu = x.mu + beta * (x.mu - prev.mu);
      eta_y = eta_x + beta * (eta_x - eta_prev);
      at_x = beta == 0.0;
    } else {
      yk = x;
      eta_y = eta_x;
      at_x = true;
    }
  }

  result.coef = std::move(x);
  return result;
}

}  // namespace sgam
