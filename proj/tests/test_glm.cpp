#include <doctest.h>

#include <cmath>
#include <random>

#include "mnss/errors.hpp"
#include "mnss/glm.hpp"
#include "mnss/rng.hpp"
#include "mnss/rsq.hpp"
#include "mnss/scenarios.hpp"
#include "mnss/simstudy.hpp"

using namespace mnss;

namespace {

Dataset two_group_dataset() {
  // 100 subjects: x = 0 with 10/50 events, x = 1 with 40/50 events
  Dataset d;
  d.x.resize(100, 1);
  d.y.resize(100);
  for (int i = 0; i < 100; ++i) {
    const bool high = i >= 50;
    d.x(i, 0) = high ? 1.0 : 0.0;
    const int idx = i % 50;
    const bool event = high ? (idx < 40) : (idx < 10);
    d.y[i] = event ? 2 : 1;
  }
  return d;
}

// central finite differences of the binary log-likelihood at the fit
double binary_lnl_at(const Eigen::MatrixXd& x, const Eigen::VectorXd& y01,
                     const Eigen::VectorXd& beta) {
  Eigen::MatrixXd design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  const Eigen::ArrayXd eta = (design * beta).array();
  return (y01.array() * eta - (eta.max(0.0) + (-eta.abs()).exp().log1p())).sum();
}

}  // namespace

TEST_CASE("binary fit: intercept-only closed form") {
  Dataset d;
  d.x.resize(100, 0);
  d.y.resize(100);
  for (int i = 0; i < 100; ++i) d.y[i] = (i < 30) ? 2 : 1;
  const auto fit = fit_binary(d);
  CHECK(fit.converged);
  CHECK(fit.coefficients[0] == doctest::Approx(-0.84729786).epsilon(1e-7));
  CHECK(fit.lnl == doctest::Approx(-61.08643021).epsilon(1e-9));
  CHECK(fit.lnl == doctest::Approx(fit.lnl_null).epsilon(1e-12));
}

TEST_CASE("binary fit: saturated two-group log-odds") {
  const auto fit = fit_binary(two_group_dataset());
  CHECK(fit.converged);
  CHECK(fit.coefficients[0] == doctest::Approx(-1.38629436).epsilon(1e-7));
  CHECK(fit.coefficients[1] == doctest::Approx(2.77258872).epsilon(1e-7));
}

TEST_CASE("binary fit: score vanishes and matches finite differences") {
  RandomStream stream(414);
  const Eigen::Index n = 2000;
  const int q = 5;
  Dataset d;
  d.x.resize(n, q);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double lp = -0.3;
    for (int j = 0; j < q; ++j) {
      d.x(i, j) = stream.normal();
      lp += 0.4 * (j % 2 == 0 ? 1.0 : -1.0) * d.x(i, j);
    }
    d.y[i] = (stream.uniform() < 1.0 / (1.0 + std::exp(-lp))) ? 2 : 1;
  }
  const auto fit = fit_binary(d);
  REQUIRE(fit.converged);

  Eigen::VectorXd y01(n);
  for (Eigen::Index i = 0; i < n; ++i) y01[i] = d.y[i] == 2 ? 1.0 : 0.0;
  const double h = 1e-6;
  for (int j = 0; j <= q; ++j) {
    Eigen::VectorXd up = fit.coefficients, dn = fit.coefficients;
    up[j] += h;
    dn[j] -= h;
    const double grad =
        (binary_lnl_at(d.x, y01, up) - binary_lnl_at(d.x, y01, dn)) / (2 * h);
    CHECK(std::fabs(grad) < 1e-3);  // score ~ 0 at the MLE
  }
  CHECK(fit.lnl > fit.lnl_null);
}

TEST_CASE("binary fit: separation is detected") {
  Dataset d;
  d.x.resize(40, 1);
  d.y.resize(40);
  for (int i = 0; i < 40; ++i) {
    d.x(i, 0) = (i < 20) ? -1.0 - 0.01 * i : 1.0 + 0.01 * i;
    d.y[i] = (i < 20) ? 1 : 2;  // perfectly separated
  }
  const auto fit = fit_binary(d);
  CHECK(fit.separation);
  CHECK_FALSE(fit.converged);
}

TEST_CASE("binary fit input validation") {
  Dataset d;
  d.x.resize(10, 1);
  d.x.setOnes();
  d.y = Eigen::VectorXi::Constant(10, 1);
  CHECK_THROWS_AS(fit_binary(d), std::invalid_argument);  // one class only
  d.y[0] = 2;
  CHECK_THROWS_AS(fit_binary(d), SingularHessianError);  // x collinear with 1
}

TEST_CASE("multinomial fit: intercept-only closed form") {
  Dataset d;
  d.x.resize(100, 0);
  d.y.resize(100);
  for (int i = 0; i < 100; ++i) d.y[i] = (i < 50) ? 1 : (i < 80) ? 2 : 3;
  const auto fit = fit_multinomial(d);
  CHECK(fit.converged);
  CHECK(fit.coefficients(0, 0) == doctest::Approx(-0.51082562).epsilon(1e-7));
  CHECK(fit.coefficients(1, 0) == doctest::Approx(-0.91629073).epsilon(1e-7));

  const auto closed = fit_intercept_only(d);
  CHECK(closed.coefficients(0, 0) ==
        doctest::Approx(-0.51082562376599072).epsilon(1e-12));
  CHECK(closed.coefficients(1, 0) ==
        doctest::Approx(-0.91629073187415511).epsilon(1e-12));
  CHECK(closed.lnl ==
        doctest::Approx(lnl_null_multinomial(
                            OutcomeDistribution::from_counts({50, 30, 20})))
            .epsilon(1e-12));
  CHECK(fit.lnl == doctest::Approx(closed.lnl).epsilon(1e-10));
}

TEST_CASE("multinomial fit with K = 2 equals the binary fit") {
  const auto data = two_group_dataset();
  const auto bin = fit_binary(data);
  const auto mn = fit_multinomial(data);
  REQUIRE(mn.converged);
  CHECK(mn.coefficients(0, 0) == doctest::Approx(bin.coefficients[0]).epsilon(1e-6));
  CHECK(mn.coefficients(0, 1) == doctest::Approx(bin.coefficients[1]).epsilon(1e-6));
  CHECK(mn.lnl == doctest::Approx(bin.lnl).epsilon(1e-9));
  CHECK(mn.lnl_null == doctest::Approx(bin.lnl_null).epsilon(1e-12));
}

TEST_CASE("multinomial fit recovers generating coefficients on a large cohort") {
  RandomStream stream(7117);
  const auto& scenario = scenario_by_id(1);
  const auto data = generate_dataset(scenario, 200'000, stream);
  const auto fit = fit_multinomial(data);
  REQUIRE(fit.converged);
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 6; ++j) {
      CHECK(std::fabs(fit.coefficients(k, j) - scenario.beta(k, j)) < 0.03);
    }
  }
}

TEST_CASE("Begg-Gray equivalence: sub-model vs distinct logistic coefficients") {
  RandomStream stream(880);
  const auto& scenario = scenario_by_id(1);
  const auto data = generate_dataset(scenario, 100'000, stream);
  const auto mn = fit_multinomial(data);
  REQUIRE(mn.converged);
  for (int k = 2; k <= 3; ++k) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < data.y.size(); ++i) {
      if (data.y[i] == 1 || data.y[i] == k) keep.push_back(i);
    }
    Eigen::MatrixXd x_sub(static_cast<Eigen::Index>(keep.size()), 5);
    Eigen::VectorXd y01(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
      x_sub.row(static_cast<Eigen::Index>(j)) = data.x.row(keep[j]);
      y01[static_cast<Eigen::Index>(j)] = data.y[keep[j]] == k ? 1.0 : 0.0;
    }
    const auto dl = fit_binary_logistic(x_sub, y01);
    REQUIRE(dl.converged);
    for (int j = 0; j <= 5; ++j) {
      CHECK(std::fabs(dl.coefficients[j] - mn.coefficients(k - 2, j)) < 0.05);
    }
  }
}

TEST_CASE("multinomial fit validation") {
  Dataset d;
  d.x.resize(10, 1);
  d.x.setRandom();
  d.y.resize(10);
  for (int i = 0; i < 10; ++i) d.y[i] = (i % 2) ? 1 : 3;  // category 2 absent
  CHECK_THROWS_AS(fit_multinomial(d), std::invalid_argument);
}

TEST_CASE("LR statistic") {
  CHECK(lr_statistic(-100.0, -100.0) == 0.0);
  CHECK(lr_statistic(-100.0, -90.0) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(lr_statistic(-100.0, -100.0 - 1e-10) == 0.0);  // clamped round-off
  CHECK_THROWS_AS(lr_statistic(-100.0, -110.0), std::invalid_argument);
}

TEST_CASE("heuristic shrinkage") {
  CHECK(heuristic_shrinkage(10, 100.0).value == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(heuristic_shrinkage(10, 20.0).value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(heuristic_shrinkage(10, 5.0).value < 0.0);  // negative values reported
  CHECK_THROWS_AS(heuristic_shrinkage(10, 0.0), std::domain_error);
  CHECK_THROWS_AS(heuristic_shrinkage(0, 10.0), std::invalid_argument);
}

TEST_CASE("apparent R2 pipeline on a generated cohort") {
  // 1 - exp(-LR/n) stays in [0, max R2) and the adjusted value below it
  RandomStream stream(5150);
  const auto data = generate_dataset(scenario_by_id(1), 50'000, stream);
  const auto fit = fit_multinomial(data);
  REQUIRE(fit.converged);
  const double lr = lr_statistic(fit.lnl_null, fit.lnl);
  const double r2_app = 1.0 - std::exp(-lr / 50'000.0);
  const double s_vh = heuristic_shrinkage(10, lr).value;
  const double r2_adj = adjust_apparent(r2_app, s_vh);
  CHECK(r2_app > 0.0);
  CHECK(r2_adj > 0.0);
  CHECK(r2_adj <= r2_app);
  std::vector<std::int64_t> counts(3, 0);
  for (Eigen::Index i = 0; i < data.y.size(); ++i) ++counts[data.y[i] - 1];
  CHECK(r2_app < max_rcs(OutcomeDistribution::from_counts(counts)));
}
