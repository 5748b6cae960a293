#include "mnss/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnss {

BinaryCalibration binary_calibration_slope(const Eigen::VectorXd& lp,
                                           const Eigen::VectorXd& y01,
                                           const FitOptions& options) {
  if (lp.size() != y01.size() || lp.size() == 0) {
    throw std::invalid_argument("binary_calibration_slope: size mismatch");
  }
  if (lp.maxCoeff() - lp.minCoeff() <= 0.0) {
    throw std::invalid_argument(
        "binary_calibration_slope: linear predictor is constant");
  }
  const auto fit = fit_binary_logistic(lp, y01, Eigen::VectorXd(), options);
  BinaryCalibration cal;
  cal.intercept = fit.coefficients[0];
  cal.slope = fit.coefficients[1];
  cal.converged = fit.converged && !fit.separation;
  return cal;
}

RecalibrationResult multinomial_recalibration(const LinearPredictorSet& lps,
                                              const FitOptions& options) {
  const Eigen::Index n = lps.y.size();
  const Eigen::Index km1 = lps.lp.cols();
  if (km1 < 1 || lps.lp.rows() != n || n == 0) {
    throw std::invalid_argument("multinomial_recalibration: shape mismatch");
  }
  const int k_categories = static_cast<int>(km1) + 1;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k_categories), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lps.y[i] < 1 || lps.y[i] > k_categories) {
      throw std::invalid_argument("multinomial_recalibration: label " +
                                  std::to_string(lps.y[i]) + " outside 1.." +
                                  std::to_string(k_categories));
    }
    ++counts[static_cast<std::size_t>(lps.y[i] - 1)];
  }
  for (int k = 0; k < k_categories; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      throw std::invalid_argument("multinomial_recalibration: category " +
                                  std::to_string(k + 1) + " absent");
    }
  }

  std::vector<Eigen::MatrixXd> designs_storage;
  designs_storage.reserve(static_cast<std::size_t>(km1));
  std::vector<const Eigen::MatrixXd*> designs;
  for (Eigen::Index k = 0; k < km1; ++k) {
    if (lps.lp.col(k).maxCoeff() - lps.lp.col(k).minCoeff() <= 0.0) {
      throw std::invalid_argument(
          "multinomial_recalibration: linear predictor column " +
          std::to_string(k + 1) + " is constant");
    }
    Eigen::MatrixXd d(n, 2);
    d.col(0).setOnes();
    d.col(1) = lps.lp.col(k);
    designs_storage.push_back(std::move(d));
  }
  for (const auto& d : designs_storage) designs.push_back(&d);

  const auto fit =
      detail::fit_multinomial_designs(designs, lps.y, k_categories, options);

  RecalibrationResult out;
  out.intercepts.resize(km1);
  out.slopes.resize(km1);
  for (Eigen::Index k = 0; k < km1; ++k) {
    out.intercepts[k] = fit.theta[2 * k];
    out.slopes[k] = fit.theta[2 * k + 1];
  }
  out.converged = fit.converged && !fit.separation;
  return out;
}

double concordance_index(Eigen::Ref<const Eigen::VectorXd> scores,
                         Eigen::Ref<const Eigen::VectorXd> is_case01) {
  const Eigen::Index m = scores.size();
  if (m != is_case01.size() || m == 0) {
    throw std::invalid_argument("concordance_index: size mismatch");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return scores[a] < scores[b];
  });

  double case_rank_sum = 0.0;
  std::int64_t n_case = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           scores[order[j + 1]] == scores[order[i]]) {
      ++j;
    }
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) +
                                   static_cast<double>(j + 1));
    for (std::size_t t = i; t <= j; ++t) {
      if (is_case01[order[t]] != 0.0) {
        case_rank_sum += avg_rank;
        ++n_case;
      }
    }
    i = j + 1;
  }
  const std::int64_t n_control = m - n_case;
  if (n_case == 0 || n_control == 0) {
    throw std::invalid_argument(
        "concordance_index: need at least one case and one control");
  }
  const double n1 = static_cast<double>(n_case);
  return (case_rank_sum - n1 * (n1 + 1.0) / 2.0) /
         (n1 * static_cast<double>(n_control));
}

double pairwise_cstat(const Eigen::MatrixXd& risks, const Eigen::VectorXi& y,
                      int k, int r) {
  const Eigen::Index n = y.size();
  const int k_categories = static_cast<int>(risks.cols());
  if (risks.rows() != n) {
    throw std::invalid_argument("pairwise_cstat: shape mismatch");
  }
  if (k == r || k < 1 || r < 1 || k > k_categories || r > k_categories) {
    throw std::invalid_argument("pairwise_cstat: invalid categories");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::fabs(risks.row(i).sum() - 1.0) > 1e-6) {
      throw std::invalid_argument("pairwise_cstat: risk row " +
                                  std::to_string(i + 1) + " does not sum to 1");
    }
  }
  std::vector<double> score_vals;
  std::vector<double> case_flags;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] != k && y[i] != r) continue;
    const double pk = risks(i, k - 1);
    const double pr = risks(i, r - 1);
    score_vals.push_back(pk / (pk + pr));
    case_flags.push_back(y[i] == k ? 1.0 : 0.0);
  }
  if (score_vals.empty()) {
    throw std::invalid_argument("pairwise_cstat: no subjects in categories");
  }
  const Eigen::Map<const Eigen::VectorXd> s(score_vals.data(),
                                            static_cast<Eigen::Index>(score_vals.size()));
  const Eigen::Map<const Eigen::VectorXd> c(case_flags.data(),
                                            static_cast<Eigen::Index>(case_flags.size()));
  return concordance_index(s, c);
}

}  // namespace mnss
