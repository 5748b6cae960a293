#include <doctest.h>

#include <cmath>

#include "mnss/calibration.hpp"
#include "mnss/rng.hpp"
#include "mnss/scenarios.hpp"
#include "mnss/simstudy.hpp"

using namespace mnss;

namespace {

// binary cohort with lp scaled by `scale` relative to the generating log-odds
void binary_cohort(Eigen::Index n, double scale, std::uint64_t seed,
                   Eigen::VectorXd& lp, Eigen::VectorXd& y01) {
  RandomStream stream(seed);
  lp.resize(n);
  y01.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double true_lp = -0.4 + 1.3 * stream.normal();
    lp[i] = scale * true_lp;
    y01[i] = stream.uniform() < 1.0 / (1.0 + std::exp(-true_lp)) ? 1.0 : 0.0;
  }
}

}  // namespace

TEST_CASE("binary calibration slope: well calibrated model has slope 1") {
  Eigen::VectorXd lp, y01;
  binary_cohort(400'000, 1.0, 99, lp, y01);
  const auto cal = binary_calibration_slope(lp, y01);
  REQUIRE(cal.converged);
  CHECK(cal.slope == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("binary calibration slope: doubled predictor halves the slope") {
  Eigen::VectorXd lp, y01;
  binary_cohort(400'000, 2.0, 99, lp, y01);
  const auto cal = binary_calibration_slope(lp, y01);
  REQUIRE(cal.converged);
  CHECK(cal.slope == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("binary calibration slope: constant predictor is rejected") {
  Eigen::VectorXd lp = Eigen::VectorXd::Zero(100);
  Eigen::VectorXd y01(100);
  for (int i = 0; i < 100; ++i) y01[i] = i % 2;
  CHECK_THROWS_AS(binary_calibration_slope(lp, y01), std::invalid_argument);
}

TEST_CASE("multinomial recalibration: true linear predictors give unit slopes") {
  RandomStream stream(321);
  const auto& scenario = scenario_by_id(1);
  const auto data = generate_dataset(scenario, 300'000, stream);
  LinearPredictorSet lps;
  lps.lp = data.x * scenario.beta.rightCols<5>().transpose();
  lps.y = data.y;
  const auto recal = multinomial_recalibration(lps);
  REQUIRE(recal.converged);
  CHECK(recal.slopes[0] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(recal.slopes[1] == doctest::Approx(1.0).epsilon(0.02));

  // halving every linear predictor doubles every slope
  LinearPredictorSet halved;
  halved.lp = 0.5 * lps.lp;
  halved.y = lps.y;
  const auto recal2 = multinomial_recalibration(halved);
  REQUIRE(recal2.converged);
  CHECK(recal2.slopes[0] == doctest::Approx(2.0 * recal.slopes[0]).epsilon(1e-6));
  CHECK(recal2.slopes[1] == doctest::Approx(2.0 * recal.slopes[1]).epsilon(1e-6));
}

TEST_CASE("rescaling contract: slope times scale is invariant") {
  RandomStream stream(808);
  const auto data = generate_dataset(scenario_by_id(3), 50'000, stream);
  LinearPredictorSet lps;
  lps.lp = data.x * scenario_by_id(3).beta.rightCols<5>().transpose();
  lps.y = data.y;
  const auto base = multinomial_recalibration(lps);
  REQUIRE(base.converged);
  for (double c : {0.25, 0.5, 2.0, 4.0}) {
    LinearPredictorSet scaled;
    scaled.lp = c * lps.lp;
    scaled.y = lps.y;
    const auto recal = multinomial_recalibration(scaled);
    REQUIRE(recal.converged);
    for (int k = 0; k < 2; ++k) {
      CHECK(recal.slopes[k] * c == doctest::Approx(base.slopes[k]).epsilon(1e-6));
    }
  }
}

TEST_CASE("multinomial recalibration with K = 2 equals the binary slope") {
  RandomStream stream(606);
  const Eigen::Index n = 50'000;
  Eigen::VectorXd lp(n), y01(n);
  Eigen::VectorXi y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double true_lp = 0.2 + 0.9 * stream.normal();
    lp[i] = 1.7 * true_lp;  // deliberately miscalibrated
    const bool event = stream.uniform() < 1.0 / (1.0 + std::exp(-true_lp));
    y01[i] = event ? 1.0 : 0.0;
    y[i] = event ? 2 : 1;
  }
  const auto bin = binary_calibration_slope(lp, y01);
  LinearPredictorSet lps;
  lps.lp = lp;
  lps.y = y;
  const auto recal = multinomial_recalibration(lps);
  REQUIRE(bin.converged);
  REQUIRE(recal.converged);
  CHECK(recal.slopes[0] == doctest::Approx(bin.slope).epsilon(1e-6));
  CHECK(recal.intercepts[0] == doctest::Approx(bin.intercept).epsilon(1e-6));
}

TEST_CASE("binary slopes concentrate at one as n grows") {
  double previous_error = 1e9;
  for (Eigen::Index n : {10'000, 100'000, 1'000'000}) {
    Eigen::VectorXd lp, y01;
    binary_cohort(n, 1.0, 4242, lp, y01);
    const auto cal = binary_calibration_slope(lp, y01);
    REQUIRE(cal.converged);
    const double err = std::fabs(cal.slope - 1.0);
    CHECK(err < previous_error + 0.01);  // shrinking error bands
    previous_error = err;
  }
  CHECK(previous_error < 0.01);
}

TEST_CASE("pairwise C-statistic: frozen small cases") {
  // category-k scores {0.8, 0.6} vs category-r scores {0.7, 0.1}: 3 of the 4
  // case-control pairs are concordant
  Eigen::MatrixXd risks(4, 3);
  Eigen::VectorXi y(4);
  // rows: P(1), P(2), P(3); scores for pair {3,2} = P3/(P2+P3)
  const double s[] = {0.8, 0.6, 0.7, 0.1};
  const int lab[] = {3, 3, 2, 2};
  for (int i = 0; i < 4; ++i) {
    const double p3 = s[i] * 0.5, p2 = 0.5 - p3;
    risks.row(i) << 0.5, p2, p3;
    y[i] = lab[i];
  }
  CHECK(pairwise_cstat(risks, y, 3, 2) == doctest::Approx(0.75).epsilon(1e-12));

  // constant risks: no discrimination
  Eigen::MatrixXd flat(6, 3);
  flat.setConstant(1.0 / 3.0);
  Eigen::VectorXi y2(6);
  for (int i = 0; i < 6; ++i) y2[i] = (i % 2) ? 3 : 2;
  CHECK(pairwise_cstat(flat, y2, 3, 2) == doctest::Approx(0.5).epsilon(1e-12));

  // perfectly separated scores
  Eigen::MatrixXd sep(4, 2);
  Eigen::VectorXi y3(4);
  for (int i = 0; i < 4; ++i) {
    const bool case_k = i < 2;
    sep.row(i) << (case_k ? 0.1 : 0.9), (case_k ? 0.9 : 0.1);
    y3[i] = case_k ? 2 : 1;
  }
  CHECK(pairwise_cstat(sep, y3, 2, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pairwise C-statistic: invariant to monotone transforms of scores") {
  RandomStream stream(11);
  const Eigen::Index n = 500;
  Eigen::MatrixXd risks(n, 3);
  Eigen::VectorXi y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double a = std::exp(stream.normal()), b = std::exp(stream.normal()),
           c = std::exp(stream.normal());
    const double t = a + b + c;
    risks.row(i) << a / t, b / t, c / t;
    y[i] = 1 + static_cast<int>(stream.engine()() % 3);
  }
  const double base = pairwise_cstat(risks, y, 3, 1);

  // squash P(3) via a monotone map of the conditional score, keeping rows
  // normalised: s' = s^3 on the conditional scale
  Eigen::MatrixXd warped = risks;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p1 = risks(i, 0), p3 = risks(i, 2);
    const double s = p3 / (p1 + p3);
    const double s2 = s * s * s;
    // rebuild p1', p3' with the same pair mass and warped conditional score
    const double mass = p1 + p3;
    warped(i, 2) = mass * s2;
    warped(i, 0) = mass * (1.0 - s2);
  }
  CHECK(pairwise_cstat(warped, y, 3, 1) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("pairwise C-statistic validation") {
  Eigen::MatrixXd risks(3, 2);
  risks << 0.5, 0.5, 0.4, 0.6, 0.9, 0.2;  // last row sums to 1.1
  Eigen::VectorXi y(3);
  y << 1, 2, 1;
  CHECK_THROWS_AS(pairwise_cstat(risks, y, 2, 1), std::invalid_argument);

  Eigen::MatrixXd ok(3, 2);
  ok << 0.5, 0.5, 0.4, 0.6, 0.8, 0.2;
  Eigen::VectorXi one_sided(3);
  one_sided << 1, 1, 1;
  CHECK_THROWS_AS(pairwise_cstat(ok, one_sided, 2, 1), std::invalid_argument);
}

TEST_CASE("recalibration input validation") {
  LinearPredictorSet lps;
  lps.lp = Eigen::MatrixXd::Zero(10, 2);
  lps.y.resize(10);
  for (int i = 0; i < 10; ++i) lps.y[i] = 1 + (i % 3);
  CHECK_THROWS_AS(multinomial_recalibration(lps), std::invalid_argument);

  lps.lp.setRandom();
  lps.y[0] = 7;  // out of range
  CHECK_THROWS_AS(multinomial_recalibration(lps), std::invalid_argument);
}
