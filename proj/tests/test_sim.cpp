#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sgam/random.hpp"
#include "sgam/sim.hpp"

using namespace sgam;

namespace {

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd ca = a.array() - a.mean();
  const Eigen::ArrayXd cb = b.array() - b.mean();
  return (ca * cb).sum() / std::sqrt(ca.square().sum() * cb.square().sum());
}

SimConfig small_config() {
  SimConfig cfg;
  cfg.d = 5;
  cfg.n = 60;
  cfg.replications = 3;
  cfg.test_size = 50;
  cfg.seed = 7;
  cfg.m = 6;
  cfg.folds = 3;
  cfg.grid_points = 2;
  cfg.methods = {Method::GroupLasso, Method::Lasso, Method::SparseGroupLasso, Method::SparseGroupSlope};
  return cfg;
}

}  // namespace

TEST_CASE("design lies in the unit cube and is reproducible") {
  const Eigen::MatrixXd X = gen_design(500, 7, 3);
  CHECK(X.minCoeff() >= 0.0);
  CHECK(X.maxCoeff() <= 1.0);
  CHECK(gen_design(500, 7, 3) == X);
  CHECK(gen_design(500, 7, 4) != X);
}

TEST_CASE("design features have pairwise correlation one half") {
  const Eigen::MatrixXd X = gen_design(100000, 5, 11);
  for (Index a = 0; a < 5; ++a)
    for (Index b = a + 1; b < 5; ++b) CHECK(std::abs(correlation(X.col(a), X.col(b)) - 0.5) < 0.02);
}

TEST_CASE("raw components") {
  CHECK(raw_component(0, 0.6) == 0.0);
  CHECK(raw_component(0, 0.1) == doctest::Approx(0.5));
  CHECK(raw_component(1, 0.5) == 0.0);
  CHECK(raw_component(1, 1.0) == 1.0);
  CHECK(raw_component(2, 0.25) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(raw_component(2, 0.75) == doctest::Approx(-1.0 / 3.0));
  CHECK_THROWS_AS(raw_component(3, 0.5), InputError);
}

TEST_CASE("true logit components are centred and normalized") {
  const Eigen::MatrixXd X = gen_design(300, 4, 5);
  const TrueLogit t = true_logit(X);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(300);
  for (const auto& c : t.components) {
    CHECK(std::abs(c.mean()) < 1e-12);
    CHECK(std::abs(c.norm() - 1.0) < 1e-12);
    sum += c;
  }
  CHECK((sum - t.g).cwiseAbs().maxCoeff() < 1e-15);

  const TrueLogit v = true_logit(X, ComponentScale::UnitVariance);
  for (const auto& c : v.components) CHECK(std::abs(c.norm() - std::sqrt(300.0)) < 1e-9);

  // Applying the training maps to the training design reproduces it.
  const TrueLogit again = true_logit(X, t.maps);
  CHECK((again.g - t.g).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(true_logit(Eigen::MatrixXd::Constant(10, 2, 0.5)), InputError);
}

TEST_CASE("test-set logit uses training maps") {
  const TrueLogit train = true_logit(gen_design(200, 3, 1));
  const Eigen::MatrixXd Xt = gen_design(50, 3, 2);
  const TrueLogit test = true_logit(Xt, train.maps);
  for (Index i = 0; i < 50; ++i) {
    double g = 0.0;
    for (int k = 0; k < 3; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      g += (raw_component(k, Xt(i, k)) - train.maps.center[ku]) / train.maps.scale[ku];
    }
    CHECK(test.g(i) == doctest::Approx(g).epsilon(1e-14));
  }
}

TEST_CASE("labels") {
  CHECK(gen_labels(Eigen::VectorXd::Constant(1000, 40.0), 1) == Labels::Ones(1000));
  const Labels coin = gen_labels(Eigen::VectorXd::Zero(100000), 2);
  CHECK(std::abs(coin.cast<double>().mean() - 0.5) < 0.01);
  CHECK(gen_labels(Eigen::VectorXd::Zero(100), 3) == gen_labels(Eigen::VectorXd::Zero(100), 3));
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(3);
  bad(1) = NAN;
  CHECK_THROWS_AS(gen_labels(bad, 1), InputError);
}

TEST_CASE("bayes rule") {
  CHECK(bayes_classify(Eigen::VectorXd::Zero(1)) == Labels::Ones(1));
  const Eigen::Vector2d g(-1.0, 2.0);
  CHECK(bayes_classify(g) == Eigen::Vector2i(0, 1));
  CHECK(bayes_classify(7.5 * g) == bayes_classify(g));
  const Labels y = bayes_classify(g);
  CHECK(error_rate(bayes_classify(g), y) == 0.0);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
}

TEST_CASE("experiment report shape and invariants") {
  const SimConfig cfg = small_config();
  const ExperimentReport r = run_experiment(cfg);
  CHECK(r.d == 5);
  CHECK(r.n == 60);
  REQUIRE(r.records.size() == 12);
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    const auto& rec = r.records[k];
    CHECK(rec.replication == static_cast<int>(k / 4));
    CHECK(rec.method == cfg.methods[k % 4]);
    CHECK(rec.excess_risk == rec.test_error - rec.oracle_error);
    CHECK(rec.selected_features <= 5);
    CHECK(rec.nonzero_coefficients <= 5 * 6);
    CHECK(rec.nonzero_coefficients >= rec.selected_features);
    if (rec.method == Method::GroupLasso && rec.selected_features > 0)
      CHECK(rec.nonzero_coefficients == 6 * rec.selected_features);
  }
  for (Method m : cfg.methods) {
    double sum = 0.0;
    for (const auto& rec : r.records)
      if (rec.method == m) sum += rec.excess_risk;
    CHECK(r.summary(m).excess_risk == doctest::Approx(sum / 3.0));
  }
  CHECK_THROWS_AS(ExperimentReport{}.summary(Method::Lasso), InputError);
}

TEST_CASE("experiment is bit-identical across runs and thread counts") {
  SimConfig cfg = small_config();
  std::ostringstream a, b, c;
  write_csv({run_experiment(cfg)}, a);
  write_csv({run_experiment(cfg)}, b);
  cfg.threads = 3;
  write_csv({run_experiment(cfg)}, c);
  CHECK(a.str() == b.str());
  CHECK(a.str() == c.str());
  cfg.seed = 8;
  std::ostringstream other;
  write_csv({run_experiment(cfg)}, other);
  CHECK(other.str() != a.str());
}

TEST_CASE("report formats") {
  SimConfig cfg = small_config();
  cfg.methods = {Method::GroupLasso, Method::SparseGroupLasso};
  cfg.replications = 2;
  const ExperimentReport r = run_experiment(cfg);
  std::ostringstream csv;
  write_csv({r}, csv);
  std::istringstream lines(csv.str());
  std::string header, row;
  std::getline(lines, header);
  CHECK(header ==
        "d,n,replication,method,C1,C2,test_error,oracle_error,excess_risk,selected_features,"
        "nonzero_coefficients");
  int rows = 0;
  while (std::getline(lines, row)) ++rows;
  CHECK(rows == 4);

  std::ostringstream table;
  write_table({r}, table);
  CHECK(table.str().find("d=5") != std::string::npos);
  CHECK(table.str().find("sparse group Lasso") != std::string::npos);
  CHECK(table.str().find("; ") != std::string::npos);
}

TEST_CASE("configuration validation") {
  SimConfig cfg;
  cfg.d = 2;
  CHECK_THROWS_AS(run_experiment(cfg), InputError);
  cfg = SimConfig{};
  cfg.n = 5;
  CHECK_THROWS_AS(validate(cfg), InputError);
  cfg = SimConfig{};
  cfg.methods.clear();
  CHECK_THROWS_AS(validate(cfg), InputError);
  CHECK(parse_component_scale("unit-variance") == ComponentScale::UnitVariance);
  CHECK_THROWS_AS(parse_component_scale("unit"), InputError);
}
