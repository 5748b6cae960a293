#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace mnss {

// Outcome proportion of category k among subjects whose outcome is k or r.
// Strictly inside (0,1); a pair with a zero-probability member has no
// prevalence.
class PairPrevalence {
 public:
  explicit PairPrevalence(double phi);
  static PairPrevalence from_counts(std::int64_t e_k, std::int64_t e_r);
  double phi() const noexcept { return phi_; }

 private:
  double phi_;
};

// The K-category outcome distribution every criterion consumes. Built either
// from per-category event counts (exact proportions, totals available) or
// from anticipated proportions alone. Proportions are normalised to sum to
// one; inputs are accepted when their sum is within 1e-3 of one so that
// published prevalences rounded to three decimals remain usable.
//
// Categories are indexed 1..K throughout the public API.
//
// Zero-probability categories are representable; operations that take logs
// of p_k reject them at call time.
class OutcomeDistribution {
 public:
  // Empty distribution; use the factories to build a usable one.
  OutcomeDistribution() = default;

  static OutcomeDistribution from_counts(const std::vector<std::int64_t>& counts);
  static OutcomeDistribution from_proportions(const Eigen::VectorXd& proportions);

  int categories() const noexcept { return static_cast<int>(p_.size()); }
  const Eigen::VectorXd& proportions() const noexcept { return p_; }
  double proportion(int k) const;

  bool has_counts() const noexcept { return !counts_.empty(); }
  const std::vector<std::int64_t>& counts() const;
  std::int64_t count(int k) const;
  std::int64_t total() const;

  // Proportion of the cohort with outcome in {k, r}.
  double pair_proportion(int k, int r) const;
  // phi_{k,r} = p_k / (p_k + p_r).
  PairPrevalence pair_prevalence(int k, int r) const;

 private:
  void check_category(int k) const;

  Eigen::VectorXd p_;
  std::vector<std::int64_t> counts_;  // empty when proportions-only
  std::int64_t total_ = 0;
};

}  // namespace mnss
