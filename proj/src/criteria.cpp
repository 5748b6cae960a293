#include "mnss/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mnss/errors.hpp"

namespace mnss {

namespace {

std::int64_t ceil_count(double x) {
  return static_cast<std::int64_t>(std::ceil(x - 1e-9));
}

std::string pair_name(int k, int r) {
  return "{" + std::to_string(k) + "," + std::to_string(r) + "}";
}

}  // namespace

double pair_events_required_raw(int q, double r2_adj, double s) {
  if (q < 1) throw std::invalid_argument("pair_events_required: q must be >= 1");
  if (!(r2_adj > 0.0 && r2_adj < 1.0)) {
    throw std::domain_error("pair_events_required: R2 must lie in (0,1)");
  }
  if (!(s > 0.0 && s < 1.0)) {
    throw std::domain_error("pair_events_required: shrinkage target must lie in (0,1)");
  }
  if (r2_adj >= s) {
    throw InfeasibleError("shrinkage target " + std::to_string(s) +
                          " is not attainable with adjusted R2 " +
                          std::to_string(r2_adj) + " (needs R2 < S)");
  }
  return static_cast<double>(q) / ((s - 1.0) * std::log(1.0 - r2_adj / s));
}

std::int64_t pair_events_required(int q, double r2_adj, double s) {
  return ceil_count(pair_events_required_raw(q, r2_adj, s));
}

CriterionOneReport criterion_one(std::span<const PairEstimate> pairs, int q,
                                 int k_categories) {
  if (k_categories < 2) {
    throw std::invalid_argument("criterion_one: K must be >= 2");
  }
  const std::size_t expected =
      static_cast<std::size_t>(k_categories) * (k_categories - 1) / 2;
  std::vector<std::vector<bool>> seen(
      static_cast<std::size_t>(k_categories) + 1,
      std::vector<bool>(static_cast<std::size_t>(k_categories) + 1, false));

  CriterionOneReport report;
  report.pairs.reserve(pairs.size());
  for (const PairEstimate& pe : pairs) {
    if (pe.k <= pe.r || pe.r < 1 || pe.k > k_categories) {
      throw std::invalid_argument("criterion_one: pair " + pair_name(pe.k, pe.r) +
                                  " must satisfy 1 <= r < k <= K");
    }
    if (seen[pe.k][pe.r]) {
      throw std::invalid_argument("criterion_one: pair " + pair_name(pe.k, pe.r) +
                                  " given twice");
    }
    seen[pe.k][pe.r] = true;
    if (!(pe.p_pair > 0.0 && pe.p_pair <= 1.0)) {
      throw std::domain_error("criterion_one: pair " + pair_name(pe.k, pe.r) +
                              " has p_pair outside (0,1]");
    }
    PairRequirement pr;
    pr.k = pe.k;
    pr.r = pe.r;
    pr.r2_adj = pe.r2_adj;
    pr.p_pair = pe.p_pair;
    pr.s_target = pe.s_target;
    try {
      pr.events_raw = pair_events_required_raw(q, pe.r2_adj, pe.s_target);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("pair " + pair_name(pe.k, pe.r) + ": " + e.what(),
                            pe.k, pe.r);
    }
    pr.events = ceil_count(pr.events_raw);
    pr.n_raw = pr.events_raw / pe.p_pair;
    pr.n = ceil_count(pr.n_raw);
    report.pairs.push_back(pr);
  }
  if (report.pairs.size() != expected) {
    for (int k = 2; k <= k_categories; ++k) {
      for (int r = 1; r < k; ++r) {
        if (!seen[k][r]) {
          throw std::invalid_argument("criterion_one: pair " + pair_name(k, r) +
                                      " missing (need all " +
                                      std::to_string(expected) + " pairs)");
        }
      }
    }
  }
  const auto binding = std::max_element(
      report.pairs.begin(), report.pairs.end(),
      [](const PairRequirement& a, const PairRequirement& b) { return a.n < b.n; });
  report.binding_k = binding->k;
  report.binding_r = binding->r;
  report.n_raw = binding->n_raw;
  report.n = binding->n;
  return report;
}

CriterionOneDirect criterion_one_direct(int q, int k_categories,
                                        double r2_adj_mn, double s) {
  if (k_categories < 2) {
    throw std::invalid_argument("criterion_one_direct: K must be >= 2");
  }
  CriterionOneDirect out;
  out.n_raw = pair_events_required_raw((k_categories - 1) * q, r2_adj_mn, s);
  out.n = ceil_count(out.n_raw);
  return out;
}

CriterionTwoReport criterion_two(int q, int k_categories, double r2_adj,
                                 double max_r2_app, double delta) {
  if (q < 1 || k_categories < 2) {
    throw std::invalid_argument("criterion_two: need q >= 1 and K >= 2");
  }
  if (!(max_r2_app > 0.0 && max_r2_app < 1.0)) {
    throw std::domain_error("criterion_two: max R2 must lie in (0,1)");
  }
  if (!(r2_adj > 0.0 && r2_adj < max_r2_app)) {
    throw std::domain_error("criterion_two: adjusted R2 must lie in (0, max R2)");
  }
  if (!(delta > 0.0)) {
    throw std::domain_error("criterion_two: delta must be positive");
  }
  const double slack = r2_adj + delta * max_r2_app;
  if (slack >= 1.0) {
    throw InfeasibleError(
        "criterion_two: R2_adj + delta * max(R2) = " + std::to_string(slack) +
        " >= 1; no sample size satisfies the bound");
  }
  CriterionTwoReport out;
  out.shrinkage_bound = r2_adj / slack;
  out.n_raw = static_cast<double>((k_categories - 1) * q) /
              ((out.shrinkage_bound - 1.0) * std::log(1.0 - slack));
  out.n = ceil_count(out.n_raw);
  return out;
}

CriterionThreeReport criterion_three(const OutcomeDistribution& dist,
                                     const PrecisionSpec& spec) {
  if (!(spec.delta > 0.0 && spec.delta < 0.5)) {
    throw std::domain_error("criterion_three: delta must lie in (0,0.5)");
  }
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw std::domain_error("criterion_three: alpha must lie in (0,1)");
  }
  const int k_categories = dist.categories();
  CriterionThreeReport out;
  out.chi2 = chi2_quantile_1df(spec.alpha / k_categories);
  out.n_raw.resize(k_categories);
  out.n_per_category.resize(static_cast<std::size_t>(k_categories));
  for (int k = 1; k <= k_categories; ++k) {
    const double p = dist.proportion(k);
    if (p == 0.0 || p == 1.0) out.degenerate_categories.push_back(k);
    out.n_raw[k - 1] = out.chi2 * p * (1.0 - p) / (spec.delta * spec.delta);
    out.n_per_category[static_cast<std::size_t>(k - 1)] =
        ceil_count(out.n_raw[k - 1]);
  }
  out.n_raw_max = out.n_raw.maxCoeff();
  out.n = *std::max_element(out.n_per_category.begin(), out.n_per_category.end());
  return out;
}

SampleSizeReport final_sample_size(const CriterionOneReport& c1,
                                   const CriterionTwoReport& c2,
                                   const CriterionThreeReport& c3,
                                   const OutcomeDistribution& dist) {
  if (c1.n < 0 || c2.n < 0 || c3.n < 0) {
    throw std::invalid_argument("final_sample_size: criterion outputs must be >= 0");
  }
  SampleSizeReport report;
  report.n1 = c1.n;
  report.n2 = c2.n;
  report.n3 = c3.n;
  report.n1_raw = c1.n_raw;
  report.n2_raw = c2.n_raw;
  report.n3_raw = c3.n_raw_max;
  report.n_final = std::max({c1.n, c2.n, c3.n});
  report.binding_criterion = (report.n_final == c1.n)   ? 1
                             : (report.n_final == c2.n) ? 2
                                                        : 3;
  const int k_categories = dist.categories();
  report.expected_events.resize(static_cast<std::size_t>(k_categories));
  report.expected_events_raw.resize(static_cast<std::size_t>(k_categories));
  for (int k = 1; k <= k_categories; ++k) {
    const double raw = static_cast<double>(report.n_final) * dist.proportion(k);
    report.expected_events_raw[static_cast<std::size_t>(k - 1)] = raw;
    report.expected_events[static_cast<std::size_t>(k - 1)] = ceil_count(raw);
  }
  return report;
}

}  // namespace mnss
