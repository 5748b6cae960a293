#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "mnss/outcome.hpp"
#include "mnss/quantile.hpp"

namespace mnss {

// Margin of error and simultaneous error rate for the overall-risk criterion.
struct PrecisionSpec {
  double delta = 0.05;
  double alpha = 0.05;
};

// One distinct logistic pair {k,r}, k > r, with its adjusted Cox-Snell
// R-squared, share of the whole cohort, and shrinkage target.
struct PairEstimate {
  int k = 0;
  int r = 0;
  double r2_adj = 0.0;
  double p_pair = 0.0;
  double s_target = 0.9;
};

struct PairRequirement {
  int k = 0, r = 0;
  double r2_adj = 0.0, p_pair = 0.0, s_target = 0.9;
  double events_raw = 0.0;      // m_{k,r} before rounding
  std::int64_t events = 0;      // ceil(m_{k,r})
  double n_raw = 0.0;           // m_{k,r} / p_{k,r}
  std::int64_t n = 0;           // ceil
};

struct CriterionOneReport {
  std::vector<PairRequirement> pairs;
  int binding_k = 0, binding_r = 0;
  double n_raw = 0.0;
  std::int64_t n = 0;
};

// Direct application of the shrinkage formula to the multinomial model as a
// whole. Kept for comparison only: it does not guarantee the target level of
// shrinkage in every sub-model, so reports must label it diagnostic.
struct CriterionOneDirect {
  double n_raw = 0.0;
  std::int64_t n = 0;
  bool diagnostic = true;
};

struct CriterionTwoReport {
  double n_raw = 0.0;
  std::int64_t n = 0;
  double shrinkage_bound = 0.0;  // implied lower bound on S_VH_MN
};

struct CriterionThreeReport {
  double chi2 = 0.0;
  Eigen::VectorXd n_raw;                       // per category
  std::vector<std::int64_t> n_per_category;    // ceil per category
  std::vector<int> degenerate_categories;      // zero-variance (p_k in {0,1})
  double n_raw_max = 0.0;
  std::int64_t n = 0;
};

struct SampleSizeReport {
  std::int64_t n1 = 0, n2 = 0, n3 = 0;
  double n1_raw = 0.0, n2_raw = 0.0, n3_raw = 0.0;
  std::int64_t n_final = 0;
  int binding_criterion = 0;                    // 1, 2 or 3
  std::vector<std::int64_t> expected_events;    // ceil(n_final * p_k)
  std::vector<double> expected_events_raw;
};

// Events m required in a pair to target shrinkage s with q predictor
// parameters: q / ((s-1) ln(1 - r2_adj/s)), rounded up. r2_adj >= s is
// infeasible (no finite sample size can hit the target).
double pair_events_required_raw(int q, double r2_adj, double s);
std::int64_t pair_events_required(int q, double r2_adj, double s);

// Pairwise criterion: every pair {k,r}, k > r, for the declared K must be
// present exactly once. n_{k,r} = m_{k,r}/p_{k,r} rounded up (the division
// uses the unrounded m so a single ceiling is applied). Returns the binding
// pair and max.
CriterionOneReport criterion_one(std::span<const PairEstimate> pairs, int q,
                                 int k_categories);

CriterionOneDirect criterion_one_direct(int q, int k_categories,
                                        double r2_adj_mn, double s);

// Nagelkerke-optimism criterion for the overall multinomial model, plus the
// shrinkage bound it implies.
CriterionTwoReport criterion_two(int q, int k_categories, double r2_adj,
                                 double max_r2_app, double delta = 0.05);

// Overall-risk precision via simultaneous confidence intervals:
// n_k = chi2_{alpha/K,1} p_k (1-p_k) / delta^2, rounded up, max over k.
// Categories with p_k in {0,1} contribute zero and are flagged.
CriterionThreeReport criterion_three(const OutcomeDistribution& dist,
                                     const PrecisionSpec& spec);

SampleSizeReport final_sample_size(const CriterionOneReport& c1,
                                   const CriterionTwoReport& c2,
                                   const CriterionThreeReport& c3,
                                   const OutcomeDistribution& dist);

}  // namespace mnss
