// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance                 all criteria
//   acceptance 1 3 7           selected criteria
//
// Criteria 5 and 6b need spambase.data, looked up in $SGAM_SPAMBASE and then
// <source>/data/spambase.data. When it is absent they print FAIL with the reason
// and, if nothing else failed, the process exits with kSkipCode so ctest reports
// the run as skipped rather than passed.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "sgam/check.hpp"
#include "sgam/sim.hpp"
#include "sgam/spambase.hpp"

using namespace sgam;
namespace fs = std::filesystem;

namespace {

constexpr int kSkipCode = 77;

struct Verdict {
  bool passed = false;
  std::string detail;
  bool missing_data = false;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

std::mt19937_64 stream(std::uint64_t seed) { return std::mt19937_64(seed); }

// ---------------------------------------------------------------- criterion 1

Verdict prox_oracle() {
  auto rng = stream(101);
  std::uniform_real_distribution<double> entry(-3.0, 3.0);
  std::uniform_real_distribution<double> weight(0.05, 1.5);
  std::uniform_int_distribution<int> small(1, 3);

  double worst_group = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Index d = small(rng), m = small(rng);
    RowMajorMatrix<double> B(d, m);
    for (Index k = 0; k < B.size(); ++k) B.data()[k] = entry(rng);
    const double lambda = weight(rng), kappa = weight(rng), step = weight(rng);
    const auto Z = prox_sparse_group(B, PenaltyWeights::constant(d, m, lambda, kappa), step);
    const auto ref = check::grid_prox_sparse_group(B, lambda, kappa, step, 0.0, {0.1, 0.01});
    worst_group = std::max(worst_group, (Z - ref).cwiseAbs().maxCoeff());
  }

  double worst_sorted = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd v(2), w(2);
    v << entry(rng), entry(rng);
    w << weight(rng), weight(rng);
    if (w(1) > w(0)) std::swap(w(0), w(1));
    const auto ref = check::grid_prox_sorted_l1(v, w, 0.0, {0.1, 0.01, 0.001});
    worst_sorted = std::max(worst_sorted, (prox_sorted_l1(v, w) - ref).cwiseAbs().maxCoeff());
  }
  return {worst_group <= 2e-2 && worst_sorted <= 2e-3,
          "sparse group max dev " + fmt(worst_group) + " (tol 2e-2), sorted l1 max dev " +
              fmt(worst_sorted) + " (tol 2e-3)"};
}

// ---------------------------------------------------------------- criterion 2

Verdict gradient_check() {
  auto rng = stream(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index n = std::uniform_int_distribution<Index>(5, 30)(rng);
    const Index d = std::uniform_int_distribution<Index>(1, 3)(rng);
    const Index m = std::uniform_int_distribution<Index>(1, 4)(rng);
    Eigen::MatrixXd X(n, d);
    for (Index k = 0; k < X.size(); ++k) X.data()[k] = unit(rng);
    const Design design = expand(X, {t % 2 ? BasisKind::Haar : BasisKind::Cosine, m});
    Labels y(n);
    for (Index i = 0; i < n; ++i) y(i) = unit(rng) < 0.5 ? 1 : 0;
    Coefficients c(d, m);
    for (Index k = 0; k < c.B.size(); ++k) c.B.data()[k] = coef(rng);
    c.mu = coef(rng);
    const LogisticGradient g = logistic_gradient(c, design, y);
    const LogisticGradient fd = check::finite_difference_gradient(c, design, y, 1e-5);
    auto cmp = [&](double a, double b) {
      const double diff = std::abs(a - b);
      worst = std::max(worst, diff);
      if (diff > std::max(1e-5 * std::abs(b), 1e-8)) ++bad;
    };
    for (Index k = 0; k < g.B.size(); ++k) cmp(g.B.data()[k], fd.B.data()[k]);
    cmp(g.mu, fd.mu);
  }
  return {bad == 0, std::to_string(bad) + " entries outside max(1e-5 rel, 1e-8 abs); max abs dev " + fmt(worst)};
}

// ---------------------------------------------------------------- criterion 3

Verdict solver_consistency() {
  auto rng = stream(303);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> wt(0.001, 0.1);
  auto problem = [&](Index n, Index d, Index m, BasisKind kind) {
    Eigen::MatrixXd X(n, d);
    for (Index k = 0; k < X.size(); ++k) X.data()[k] = unit(rng);
    Labels y(n);
    for (Index i = 0; i < n; ++i) y(i) = unit(rng) < 1.0 / (1.0 + std::exp(-6.0 * (X(i, 0) - 0.5))) ? 1 : 0;
    if (y.sum() == 0) y(0) = 1;
    if (y.sum() == n) y(0) = 0;
    return std::make_pair(expand(X, {kind, m}), y);
  };

  // (a) monotone objective trace
  int increases = 0;
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + t % 5, m = 1 + t % 7;
    const auto [design, y] = problem(30 + 3 * t, d, m, t % 2 ? BasisKind::Haar : BasisKind::Cosine);
    PenaltyWeights w{Eigen::VectorXd(d), Eigen::VectorXd(m)};
    for (Index k = 0; k < d; ++k) w.row(k) = wt(rng);
    for (Index k = 0; k < m; ++k) w.entry(k) = wt(rng);
    std::sort(w.row.data(), w.row.data() + d, std::greater<>());
    std::sort(w.entry.data(), w.entry.data() + m, std::greater<>());
    if (t % 3 == 0) w = PenaltyWeights::constant(d, m, w.row(0), w.entry(0));
    const FitResult r = fit(design, y, w);
    for (std::size_t k = 1; k < r.objective.size(); ++k)
      if (r.objective[k] > r.objective[k - 1]) ++increases;
  }

  // (b) unpenalized fit vs long-run plain gradient descent
  const auto [d50, y50] = problem(50, 2, 2, BasisKind::Cosine);
  FitConfig tight;
  tight.tolerance = 1e-15;
  tight.max_iterations = 200000;
  const FitResult free_fit = fit(d50, y50, PenaltyWeights::constant(2, 2, 0.0, 0.0), tight);
  const Coefficients gd = check::gradient_descent_fit(d50, y50, 400000);
  const double dev_b = std::max((free_fit.coef.B - gd.B).cwiseAbs().maxCoeff(), std::abs(free_fit.coef.mu - gd.mu));

  // (c) constant-weight Slope vs sparse group Lasso along a short path. The Slope fit
  // runs with the leading weights nudged up one ulp so it goes through the sorted-l1
  // prox; objectives are compared under the common constant weights.
  double dev_c = 0.0;
  const auto [dc, yc] = problem(100, 4, 5, BasisKind::Cosine);
  FitConfig cfg;
  cfg.tolerance = 1e-13;
  cfg.max_iterations = 100000;
  for (double scale : {0.05, 0.02, 0.01, 0.005}) {
    const PenaltyWeights w = PenaltyWeights::constant(4, 5, scale, scale / 2);
    PenaltyWeights tilted = w;
    tilted.row(0) = std::nextafter(w.row(0), 1.0);
    tilted.entry(0) = std::nextafter(w.entry(0), 1.0);
    const FitResult sgl = fit(dc, yc, w, cfg);
    const FitResult sgs = fit(dc, yc, tilted, cfg);
    const double lasso_obj = logistic_loss(sgl.coef, dc, yc) +
                             w.row(0) * sgl.coef.B.rowwise().norm().sum() +
                             w.entry(0) * sgl.coef.B.cwiseAbs().sum();
    dev_c = std::max(dev_c, std::abs(lasso_obj - penalized_objective(sgs.coef, dc, yc, w)));
  }

  return {increases == 0 && dev_b <= 1e-4 && dev_c <= 1e-8,
          "(a) " + std::to_string(increases) + " trace increases over 50 fits; (b) max coef dev " +
              fmt(dev_b) + " (tol 1e-4); (c) objective gap " + fmt(dev_c) + " (tol 1e-8)"};
}

// ---------------------------------------------------------------- criterion 4

SimConfig sim_config(Index d, Index n, int threads) {
  SimConfig cfg;
  cfg.d = d;
  cfg.n = n;
  cfg.replications = 10;
  cfg.test_size = 100;
  cfg.seed = 20240611;
  cfg.folds = 10;
  cfg.grid_points = 5;
  cfg.threads = threads;
  cfg.methods = {Method::SparseGroupLasso};
  return cfg;
}

std::vector<ExperimentReport> run_simulation_study(int threads) {
  std::vector<ExperimentReport> reports;
  for (Index d : {10, 30})
    for (Index n : {30, 1000}) reports.push_back(run_experiment(sim_config(d, n, threads)));
  return reports;
}

std::string csv_text(const std::vector<ExperimentReport>& reports) {
  std::ostringstream os;
  write_csv(reports, os);
  return os.str();
}

void save(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::vector<ExperimentReport>> g_sim;  // threads = 1 run, reused by 6a

Verdict simulation() {
  g_sim = run_simulation_study(1);
  save("acceptance_sim_threads1.csv", csv_text(*g_sim));
  std::ostringstream table;
  write_table(*g_sim, table);
  save("acceptance_sim_threads1.txt", table.str());
  auto excess = [&](Index d, Index n) {
    for (const auto& r : *g_sim)
      if (r.d == d && r.n == n) return r.summary(Method::SparseGroupLasso).excess_risk;
    return std::nan("");
  };
  const double e10s = excess(10, 30), e10l = excess(10, 1000), e30s = excess(30, 30), e30l = excess(30, 1000);
  const bool a = e10l <= 0.12, b = e30l <= 0.10, c = e10l < e10s && e30l < e30s;
  return {a && b && c, "(a) d=10 n=1000 " + fmt(e10l, 3) + (a ? " <= " : " > ") + "0.12; (b) d=30 n=1000 " +
                           fmt(e30l, 3) + (b ? " <= " : " > ") + "0.10; (c) n=30 -> n=1000: d=10 " +
                           fmt(e10s, 3) + " -> " + fmt(e10l, 3) + ", d=30 " + fmt(e30s, 3) + " -> " +
                           fmt(e30l, 3) + (c ? "" : " (trend not strictly decreasing)")};
}

// ---------------------------------------------------------------- criterion 5

std::optional<fs::path> spambase_path() {
  if (const char* env = std::getenv("SGAM_SPAMBASE"); env && *env) {
    if (fs::exists(env)) return fs::path(env);
    return std::nullopt;
  }
  const fs::path local = fs::path(SGAM_SOURCE_DIR) / "data" / "spambase.data";
  if (fs::exists(local)) return local;
  return std::nullopt;
}

const char* kMissing =
    "spambase.data not found (set SGAM_SPAMBASE or place it at data/spambase.data)";

SpamDemoOptions spam_options(int threads) {
  SpamDemoOptions opts;
  opts.train_size = 300;
  opts.seed = 1;
  opts.mode = TuningMode::Holdout;
  opts.threads = threads;
  return opts;
}

std::string spam_csv(const SpamDemoReport& report) {
  std::ostringstream os;
  write_csv(report, os);
  return os.str();
}

std::optional<SpamDemoReport> g_spam;

Verdict spambase() {
  const auto path = spambase_path();
  if (!path) return {false, kMissing, true};
  const Dataset data = load_spambase(path->string());
  if (data.n() != kSpambaseRows)
    return {false, "expected 4601 rows, found " + std::to_string(data.n())};
  g_spam = run_spam_demo(data, spam_options(1));
  save("acceptance_spam_threads1.csv", spam_csv(*g_spam));
  const SpamDemoRow& sgl = g_spam->row(Method::SparseGroupLasso);
  const SpamDemoRow& gl = g_spam->row(Method::GroupLasso);
  const auto features = static_cast<Index>(sgl.selected.size());
  const bool err = sgl.test_error <= 0.12;
  const bool count = features >= 10 && features <= 40;
  const bool order = sgl.nonzero_coefficients <= gl.nonzero_coefficients;
  return {err && count && order,
          "test n " + std::to_string(g_spam->test_size) + ", sparse group Lasso error " +
              fmt(sgl.test_error) + " (<= 0.12), " + std::to_string(features) +
              " features (in [10,40]), nonzero " + std::to_string(sgl.nonzero_coefficients) +
              " vs group Lasso " + std::to_string(gl.nonzero_coefficients)};
}

// ---------------------------------------------------------------- criterion 6

Verdict determinism_simulation() {
  if (!g_sim) g_sim = run_simulation_study(1);
  const std::string one = csv_text(*g_sim);
  save("acceptance_sim_threads1.csv", one);
  save("acceptance_sim_threads2.csv", csv_text(run_simulation_study(2)));
  const bool same = slurp("acceptance_sim_threads1.csv") == slurp("acceptance_sim_threads2.csv");
  return {same, std::string("simulation report files ") + (same ? "identical" : "differ") +
                    " for threads 1 and 2"};
}

Verdict determinism_spambase() {
  const auto path = spambase_path();
  if (!path) return {false, kMissing, true};
  const Dataset data = load_spambase(path->string());
  if (!g_spam) g_spam = run_spam_demo(data, spam_options(1));
  save("acceptance_spam_threads1.csv", spam_csv(*g_spam));
  save("acceptance_spam_threads2.csv", spam_csv(run_spam_demo(data, spam_options(2))));
  const bool same = slurp("acceptance_spam_threads1.csv") == slurp("acceptance_spam_threads2.csv");
  return {same, std::string("spambase report files ") + (same ? "identical" : "differ") +
                    " for threads 1 and 2"};
}

// ---------------------------------------------------------------- criterion 7

Verdict orthonormality() {
  const Index N = 100000;
  Eigen::MatrixXd X(N, 1);
  for (Index i = 0; i < N; ++i) X(i, 0) = (static_cast<double>(i) + 0.5) / static_cast<double>(N);
  std::string detail;
  bool ok = true;
  for (BasisKind kind : {BasisKind::Cosine, BasisKind::Haar}) {
    const Design D = expand(X, {kind, 32});
    // Append psi_0 = 1 so orthogonality to the constant is checked too.
    Eigen::MatrixXd A(N, 33);
    A.col(0).setOnes();
    A.rightCols(32) = D.matrix();
    const Eigen::MatrixXd G = A.transpose() * A / static_cast<double>(N);
    const double dev = (G - Eigen::MatrixXd::Identity(33, 33)).cwiseAbs().maxCoeff();
    ok = ok && dev <= 1e-2;
    detail += (detail.empty() ? "" : ", ") + to_string(kind) + " max Gram dev " + fmt(dev);
  }
  return {ok, detail + " (tol 1e-2, indices 0..32)"};
}

struct Criterion {
  std::string id;
  std::string title;
  std::function<Verdict()> run;
  int group;  // selection key on the command line
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"1", "prox oracle equivalence", prox_oracle, 1},
      {"2", "gradient vs central differences", gradient_check, 2},
      {"3", "solver consistency", solver_consistency, 3},
      {"4", "simulation excess risk", simulation, 4},
      {"5", "spambase reproduction", spambase, 5},
      {"6a", "determinism: simulation reports", determinism_simulation, 6},
      {"6b", "determinism: spambase reports", determinism_spambase, 6},
      {"7", "basis orthonormality", orthonormality, 7},
  };
  std::set<std::string> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(argv[k]);

  int failed = 0, missing = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id) && !wanted.count(std::to_string(c.group))) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.passed ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << "  ["
              << v.detail << "; " << fmt(secs, 3) << " s]" << std::endl;
    if (!v.passed) (v.missing_data ? missing : failed) += 1;
  }
  if (failed > 0) return 1;
  if (missing > 0) return kSkipCode;
  return 0;
}
