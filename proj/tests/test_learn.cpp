#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "ladderkit/gp.hpp"
#include "ladderkit/learn.hpp"
#include "ladderkit/stats.hpp"
#include "ladderkit/synthetic.hpp"

using namespace ladder;

namespace {

GpOptions exact_gp() {
  GpOptions o;
  o.fitNoise = false;
  o.fixedNoiseVariance = 0.0;
  return o;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("perfect predictions") {
    const std::vector<double> y{1, 4, 2, 8, 5};
    const auto m = regression_metrics(y, y);
    CHECK(m.lcc == doctest::Approx(1.0));
    CHECK(m.srocc == doctest::Approx(1.0));
    CHECK(m.r2 == doctest::Approx(1.0));
    CHECK(m.mae == 0.0);
    CHECK(m.rmse == 0.0);
  }

  TEST_CASE("negated zero-mean predictions") {
    const std::vector<double> y{-2, -1, 0, 1, 2}, p{2, 1, 0, -1, -2};
    const auto m = regression_metrics(y, p);
    CHECK(m.lcc == doctest::Approx(-1.0));
    CHECK(m.srocc == doctest::Approx(-1.0));
  }

  TEST_CASE("hand-ranked Spearman") {
    // Rank differences are all +-1: rho = 1 - 6 * 4 / (4 * 15).
    const std::vector<double> a{1, 2, 3, 4}, b{2, 1, 4, 3};
    CHECK(spearman(a, b) == doctest::Approx(0.6));
    CHECK(spearman(a, b) == doctest::Approx(pearson(average_ranks(a), average_ranks(b))));
  }

  TEST_CASE("zero variance is flagged") {
    const std::vector<double> y{3, 3, 3}, p{1, 2, 3};
    const auto m = regression_metrics(y, p);
    CHECK(std::isnan(m.lcc));
    CHECK(std::isnan(m.srocc));
    CHECK_FALSE(m.undefinedReason.empty());
  }

  TEST_CASE("ties share their average rank") {
    const std::vector<double> v{10, 20, 20, 5};
    const auto r = average_ranks(v);
    CHECK(r[0] == 2.0);
    CHECK(r[1] == 3.5);
    CHECK(r[2] == 3.5);
    CHECK(r[3] == 1.0);
  }
}

TEST_SUITE("gp") {
  TEST_CASE("nelder-mead finds a quadratic minimum") {
    const auto x = nelder_mead([](const Eigen::VectorXd& v) { return (v[0] - 1.5) * (v[0] - 1.5) + 3.0 * (v[1] + 2.0) * (v[1] + 2.0); },
                               Eigen::Vector2d(0.0, 0.0), 0.5, 500, 1e-12);
    CHECK(x[0] == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(x[1] == doctest::Approx(-2.0).epsilon(1e-4));
  }

  TEST_CASE("noise-free fit interpolates its training points") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd x(15, 3);
    Eigen::VectorXd y(15);
    for (int i = 0; i < 15; ++i) {
      for (int j = 0; j < 3; ++j) x(i, j) = n(rng);
      y[i] = std::sin(x(i, 0)) + x(i, 1) * x(i, 2);
    }
    GaussianProcess gp;
    gp.fit(x, y, exact_gp());
    CHECK((gp.predict_rows(x) - y).cwiseAbs().maxCoeff() < 1e-4);
    CHECK(gp.noiseVariance() == 0.0);
  }

  TEST_CASE("sin(x) from twenty points") {
    Eigen::MatrixXd x(20, 1);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) {
      x(i, 0) = 2.0 * std::numbers::pi * i / 19.0;
      y[i] = std::sin(x(i, 0));
    }
    GaussianProcess gp;
    gp.fit(x, y, GpOptions{});
    double worst = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double t = 0.2 + (2.0 * std::numbers::pi - 0.4) * k / 200.0;
      worst = std::max(worst, std::abs(gp.predict(Eigen::RowVectorXd::Constant(1, t)) - std::sin(t)));
    }
    CHECK(worst < 0.05);
  }

  TEST_CASE("constant targets predict the constant") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 2);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(10, 31.0);
    GaussianProcess gp;
    gp.fit(x, y, GpOptions{});
    CHECK(gp.predict(Eigen::RowVector2d(0.3, -0.7)) == doctest::Approx(31.0));
    CHECK(gp.predict(Eigen::RowVector2d(5.0, 5.0)) == doctest::Approx(31.0));
  }

  TEST_CASE("state round-trip gives identical predictions") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(12, 2);
    Eigen::VectorXd y = x.col(0) * 2.0 - x.col(1);
    GaussianProcess gp;
    gp.fit(x, y, GpOptions{});
    const auto copy = GaussianProcess::from_state(gp.state());
    const Eigen::MatrixXd probe = Eigen::MatrixXd::Random(5, 2);
    CHECK((copy.predict_rows(probe) - gp.predict_rows(probe)).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("fitting is seed-reproducible") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(12, 2);
    Eigen::VectorXd y = x.col(0).array().sin().matrix();
    GaussianProcess a, b;
    a.fit(x, y, GpOptions{});
    b.fit(x, y, GpOptions{});
    CHECK(a.hyper().logLength == b.hyper().logLength);
    CHECK(a.negLogMarginal() == b.negLogMarginal());
  }
}

TEST_SUITE("cross-validation") {
  TEST_CASE("ten folds are disjoint, exhaustive and balanced") {
    const auto f = cv_fold_assignment(53, 10, 7);
    std::vector<int> sizes(10, 0);
    for (int k : f) {
      REQUIRE(k >= 0);
      REQUIRE(k < 10);
      ++sizes[static_cast<std::size_t>(k)];
    }
    for (int s : sizes) CHECK((s == 5 || s == 6));
    CHECK(f == cv_fold_assignment(53, 10, 7));
    CHECK(f != cv_fold_assignment(53, 10, 8));
    CHECK_THROWS_AS(cv_fold_assignment(5, 10, 1), LadderError);
  }

  TEST_CASE("rfe keeps the informative column") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd x(40, 9);
    Eigen::VectorXd y(40);
    for (int i = 0; i < 40; ++i) {
      for (int j = 0; j < 9; ++j) x(i, j) = u(rng);
      y[i] = 20.0 + 10.0 * x(i, 1);
    }
    RfeOptions o;
    o.gp.restarts = 2;
    const auto r = rfe_select(x, y, o);
    CHECK(std::find(r.selected.begin(), r.selected.end(), 1) != r.selected.end());
    CHECK(r.selected.size() < 9);
    CHECK(r.cvMae < 0.5);
    CHECK(r.maeHistory.front() >= r.cvMae);
  }

  TEST_CASE("rfe on constant targets has zero error") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(20, 4);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 30.0);
    RfeOptions o;
    o.gp.restarts = 1;
    const auto r = rfe_select(x, y, o);
    CHECK_FALSE(r.selected.empty());
    CHECK(r.cvMae == doctest::Approx(0.0));
  }
}

TEST_SUITE("cross-over predictor") {
  TEST_CASE("a corpus with one QP everywhere predicts that QP") {
    OracleOptions o;
    o.count = 20;
    const auto corpus = make_oracle_corpus(o);
    std::vector<FeatureVector> fv;
    std::vector<std::vector<double>> truth;
    for (const auto& s : corpus) {
      fv.push_back(s.features);
      truth.push_back(std::vector<double>(6, 33.0));
    }
    TrainOptions t;
    t.selectFeatures = false;
    t.rfe.gp.restarts = 1;
    const auto r = train_crossover_predictor(fv, truth, crossover_names(default_resolutions()), t);
    for (const auto& s : corpus)
      for (int q : r.predictor.predict(s.features)) CHECK(q == 33);
    CHECK(r.report[0].metrics.mae == 0.0);
  }

  TEST_CASE("the chain feeds earlier predictions forward") {
    OracleOptions o;
    o.count = 40;
    o.seed = 5;
    const auto corpus = make_oracle_corpus(o);
    std::vector<FeatureVector> fv;
    std::vector<std::vector<double>> truth;
    for (const auto& s : corpus) {
      fv.push_back(s.features);
      std::vector<double> t;
      for (double q : s.crossQp) t.push_back(std::round(q));
      truth.push_back(t);
    }
    TrainOptions t;
    t.selectFeatures = false;
    t.rfe.gp.restarts = 2;
    const auto r = train_crossover_predictor(fv, truth, crossover_names(default_resolutions()), t);
    REQUIRE(r.predictor.models.size() == 6);
    CHECK(r.predictor.models[0].features.size() == 23);
    CHECK(r.predictor.models[5].features.size() == 28);
    CHECK(r.predictor.models[5].features.back() == 28);
    for (const auto& row : r.report) CHECK(row.metrics.lcc > 0.9);
    const auto p = r.predictor.predict(corpus[0].features);
    for (int q : p) CHECK(QpRange{}.contains(q));
  }
}

TEST_SUITE("qp-lograte model") {
  TEST_CASE("two exact points give the line") {
    const Resolution r{1920, 1080, "1080p"};
    const auto m = fit_qp_lograte({r}, {{{30.0, 10.0}, {40.0, 8.0}}}, false);
    CHECK(m.lines[0].alpha == doctest::Approx(-5.0));
    CHECK(m.lines[0].beta == doctest::Approx(80.0));
    CHECK(m.at(r).log_rate(30.0) == doctest::Approx(10.0));
  }

  TEST_CASE("the last resolution shares alpha") {
    const ResolutionSet rs{{1280, 720, "720p"}, {960, 540, "540p"}};
    const auto m = fit_qp_lograte(rs, {{{30.0, 10.0}, {40.0, 8.0}}, {{35.0, 9.0}}}, true);
    CHECK(m.lines[1].alpha == doctest::Approx(-5.0));
    CHECK(m.lines[1].beta == doctest::Approx(80.0));
    CHECK_THROWS_AS(fit_qp_lograte(rs, {{{30.0, 10.0}, {40.0, 8.0}}, {{35.0, 9.0}}}, false), LadderError);
  }

  TEST_CASE("paired cross-over QPs on a line") {
    const std::vector<double> x{30, 32, 35, 38}, y{25, 27, 30, 33};
    const auto r = fit_cross_relation(x, y);
    CHECK(r.slope == doctest::Approx(1.0));
    CHECK(r.intercept == doctest::Approx(-5.0));
    CHECK(r.lcc == doctest::Approx(1.0));
  }
}
