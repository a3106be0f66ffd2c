#include "sgam/sim.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "sgam/parallel.hpp"
#include "sgam/random.hpp"

namespace sgam {

std::string to_string(ComponentScale scale) {
  return scale == ComponentScale::UnitNorm ? "unit-norm" : "unit-variance";
}

ComponentScale parse_component_scale(const std::string& name) {
  if (name == "unit-norm") return ComponentScale::UnitNorm;
  if (name == "unit-variance") return ComponentScale::UnitVariance;
  throw InputError("unknown component scale '" + name + "' (expected unit-norm or unit-variance)");
}

void validate(const SimConfig& cfg) {
  if (cfg.d < 3) throw InputError("simulation needs d >= 3 (three active components)");
  if (cfg.n < 10) throw InputError("simulation needs n >= 10");
  if (cfg.replications < 1) throw InputError("replications must be positive");
  if (cfg.test_size < 1) throw InputError("test size must be positive");
  if (cfg.m < 0) throw InputError("truncation must be nonnegative");
  if (cfg.folds < 2 || cfg.folds > cfg.n) throw InputError("folds must lie in [2, n]");
  if (cfg.grid_points < 1) throw InputError("grid needs at least one point per axis");
  if (cfg.methods.empty()) throw InputError("no methods selected");
  validate(cfg.fit);
}

Eigen::MatrixXd gen_design(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd X(n, d);
  for (Index i = 0; i < n; ++i) {
    const double u = unif(rng);
    for (Index j = 0; j < d; ++j) X(i, j) = 0.5 * (unif(rng) + u);
  }
  return X;
}

double raw_component(int k, double x) {
  switch (k) {
    case 0: return std::abs(x - 0.6);
    case 1: return (2.0 * x - 1.0) * (2.0 * x - 1.0);
    case 2: {
      const double s = std::sin(2.0 * std::numbers::pi * x);
      return s / (2.0 - s);
    }
  }
  throw InputError("component index must be 0, 1 or 2");
}

namespace {

Eigen::VectorXd raw_vector(const Eigen::MatrixXd& X, int k) {
  Eigen::VectorXd v(X.rows());
  for (Index i = 0; i < X.rows(); ++i) v(i) = raw_component(k, X(i, k));
  return v;
}

}  // namespace

TrueLogit true_logit(const Eigen::MatrixXd& X, const ComponentMaps& maps) {
  if (X.cols() < 3) throw InputError("true logit needs d >= 3");
  TrueLogit out;
  out.maps = maps;
  out.g = Eigen::VectorXd::Zero(X.rows());
  for (int k = 0; k < 3; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    out.components[ku] = (raw_vector(X, k).array() - maps.center[ku]) / maps.scale[ku];
    out.g += out.components[ku];
  }
  return out;
}

TrueLogit true_logit(const Eigen::MatrixXd& X, ComponentScale scale) {
  if (X.cols() < 3) throw InputError("true logit needs d >= 3");
  ComponentMaps maps;
  const double target = scale == ComponentScale::UnitNorm ? 1.0 : std::sqrt(static_cast<double>(X.rows()));
  for (int k = 0; k < 3; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::VectorXd v = raw_vector(X, k);
    maps.center[ku] = v.mean();
    const double norm = (v.array() - maps.center[ku]).matrix().norm();
    if (!(norm > 0)) throw NumericError("component vector is constant on this design");
    maps.scale[ku] = norm / target;
  }
  return true_logit(X, maps);
}

Labels gen_labels(const Eigen::VectorXd& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Labels y(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g(i))) throw InputError("non-finite logit");
    y(i) = unif(rng) < sigmoid(g(i)) ? 1 : 0;
  }
  return y;
}

Labels bayes_classify(const Eigen::VectorXd& g) { return (g.array() >= 0.0).cast<int>(); }

MethodSummary ExperimentReport::summary(Method method) const {
  MethodSummary s;
  s.method = method;
  int count = 0;
  for (const auto& r : records) {
    if (r.method != method) continue;
    s.excess_risk += r.excess_risk;
    s.selected_features += static_cast<double>(r.selected_features);
    s.nonzero_coefficients += static_cast<double>(r.nonzero_coefficients);
    ++count;
  }
  if (count == 0) throw InputError("method " + to_string(method) + " not in report");
  s.excess_risk /= count;
  s.selected_features /= count;
  s.nonzero_coefficients /= count;
  return s;
}

namespace {

std::vector<ReplicationRecord> run_replication(const SimConfig& cfg, int rep, std::uint64_t seed) {
  const Index m = cfg.m > 0 ? cfg.m : default_truncation(cfg.n);
  const BasisSpec basis{cfg.basis, m};

  const Eigen::MatrixXd X_train = gen_design(cfg.n, cfg.d, derive_seed(seed, 0));
  const TrueLogit truth_train = true_logit(X_train, cfg.scale);
  const Labels y_train = gen_labels(truth_train.g, derive_seed(seed, 1));

  const Eigen::MatrixXd X_test = gen_design(cfg.test_size, cfg.d, derive_seed(seed, 2));
  const TrueLogit truth_test = true_logit(X_test, truth_train.maps);
  const Labels y_test = gen_labels(truth_test.g, derive_seed(seed, 3));
  const double oracle_error = error_rate(bayes_classify(truth_test.g), y_test);

  const Design train = expand(X_train, basis);
  const Design test = expand(X_test, basis);

  CvOptions cv;
  cv.fit = cfg.fit;
  std::vector<ReplicationRecord> out;
  for (Method method : cfg.methods) {
    const auto grid = default_grid(method, cfg.grid_points);
    const CvReport report = cross_validate(X_train, y_train, basis, method, grid, cfg.folds,
                                           derive_seed(seed, 4), cv);
    const GridPoint& best = report.chosen_point();
    const FitResult res = fit_method(train, y_train, method, best.c1, best.c2, cfg.fit);
    const Labels pred = (linear_predictor(res.coef, test).array() >= 0.0).cast<int>();

    ReplicationRecord rec;
    rec.replication = rep;
    rec.method = method;
    rec.c1 = best.c1;
    rec.c2 = best.c2;
    rec.test_error = error_rate(pred, y_test);
    rec.oracle_error = oracle_error;
    rec.excess_risk = rec.test_error - oracle_error;
    for (Index j = 0; j < res.coef.B.rows(); ++j)
      if (!res.coef.B.row(j).isZero(0.0)) ++rec.selected_features;
    rec.nonzero_coefficients = (res.coef.B.array() != 0.0).count();
    out.push_back(rec);
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const SimConfig& cfg) {
  validate(cfg);
  constexpr int kMaxRetries = 3;
  std::vector<std::vector<ReplicationRecord>> slots(static_cast<std::size_t>(cfg.replications));
  parallel_for(slots.size(), cfg.threads, [&](std::size_t r) {
    const auto rep = static_cast<int>(r);
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t seed =
          derive_seed(cfg.seed, (static_cast<std::uint64_t>(rep) << 8) | static_cast<std::uint64_t>(attempt));
      try {
        slots[r] = run_replication(cfg, rep, seed);
        return;
      } catch (const std::exception& e) {
        if (attempt >= kMaxRetries)
          throw NumericError("replication " + std::to_string(rep) + " failed after " +
                             std::to_string(kMaxRetries) + " retries: " + e.what());
      }
    }
  });

  ExperimentReport report;
  report.d = cfg.d;
  report.n = cfg.n;
  report.methods = cfg.methods;
  for (auto& slot : slots) report.records.insert(report.records.end(), slot.begin(), slot.end());
  return report;
}

void write_csv(const std::vector<ExperimentReport>& reports, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "d,n,replication,method,C1,C2,test_error,oracle_error,excess_risk,selected_features,"
         "nonzero_coefficients\n";
  for (const auto& rep : reports)
    for (const auto& r : rep.records)
      out << rep.d << ',' << rep.n << ',' << r.replication << ',' << to_string(r.method) << ','
          << r.c1 << ',' << r.c2 << ',' << r.test_error << ',' << r.oracle_error << ','
          << r.excess_risk << ',' << r.selected_features << ',' << r.nonzero_coefficients << '\n';
  out.precision(old_precision);
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// 9.8 -> "9.8", 9800 -> "9800", 75.4 -> "75.4"
std::string count(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << std::round(v * 10.0) / 10.0;
  return os.str();
}

}  // namespace

void write_table(const std::vector<ExperimentReport>& reports, std::ostream& out) {
  if (reports.empty()) return;
  constexpr int kCol = 20;
  const auto& methods = reports.front().methods;
  out << std::left << std::setw(6) << "n";
  for (Method m : methods) out << std::setw(kCol) << display_name(m);
  out << '\n';

  std::map<Index, std::vector<const ExperimentReport*>> by_d;
  for (const auto& r : reports) by_d[r.d].push_back(&r);
  bool first = true;
  for (const auto& [d, block] : by_d) {
    if (!first) out << '\n';
    first = false;
    out << std::setw(6) << "" << "d=" << d << '\n';
    for (const ExperimentReport* r : block) {
      out << std::setw(6) << r->n;
      for (Method m : methods) out << std::setw(kCol) << fixed(r->summary(m).excess_risk, 3);
      out << '\n' << std::setw(6) << "";
      for (Method m : methods) {
        const MethodSummary s = r->summary(m);
        out << std::setw(kCol)
            << "(" + count(s.selected_features) + "; " + count(s.nonzero_coefficients) + ")";
      }
      out << '\n';
    }
  }
  out << std::right;
}

}  // namespace sgam
