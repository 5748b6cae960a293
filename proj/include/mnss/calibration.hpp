#pragma once

#include <Eigen/Core>

#include "mnss/glm.hpp"

namespace mnss {

// Per-subject sub-model linear predictors (column k-2 belongs to sub-model
// k, typically sum_q beta_{q,k} X_q without the intercept) plus observed
// categories.
struct LinearPredictorSet {
  Eigen::MatrixXd lp;  // n x (K-1)
  Eigen::VectorXi y;   // labels in 1..K
};

struct BinaryCalibration {
  double slope = 0.0;      // the shrinkage factor
  double intercept = 0.0;
  bool converged = false;
};

struct RecalibrationResult {
  Eigen::VectorXd slopes;      // S_MN,k for k = 2..K
  Eigen::VectorXd intercepts;  // re-estimated alpha*_{0,k}
  bool converged = false;
};

// Calibration slope of a binary model on validation data: logistic MLE of
// y on {intercept, lp}; the fitted slope is the shrinkage factor. y01 holds
// 0/1 outcomes.
BinaryCalibration binary_calibration_slope(const Eigen::VectorXd& lp,
                                           const Eigen::VectorXd& y01,
                                           const FitOptions& options = FitOptions());

// Sub-model specific recalibration: constrained multinomial MLE where
// sub-model k's linear predictor is alpha_k + s_k * lp_k (lp_j enters only
// sub-model j), fitted jointly by Newton on the full multinomial likelihood.
RecalibrationResult multinomial_recalibration(const LinearPredictorSet& lps,
                                              const FitOptions& options = FitOptions());

// Concordance probability of `scores` between cases and controls, ties
// counted one half; O(m log m) by ranking.
double concordance_index(Eigen::Ref<const Eigen::VectorXd> scores,
                         Eigen::Ref<const Eigen::VectorXd> is_case01);

// Pairwise C-statistic via the conditional risk method: restrict to
// subjects with outcome k or r, score each by P(k)/(P(k)+P(r)), and return
// the concordance of category-k subjects over category-r subjects. `risks`
// holds predicted probabilities per category (rows summing to one).
double pairwise_cstat(const Eigen::MatrixXd& risks, const Eigen::VectorXi& y,
                      int k, int r);

}  // namespace mnss
