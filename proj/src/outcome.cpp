#include "mnss/outcome.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mnss {

PairPrevalence::PairPrevalence(double phi) : phi_(phi) {
  if (!(phi > 0.0 && phi < 1.0)) {
    throw std::domain_error("PairPrevalence: phi must lie strictly in (0,1), got " +
                            std::to_string(phi));
  }
}

PairPrevalence PairPrevalence::from_counts(std::int64_t e_k, std::int64_t e_r) {
  if (e_k < 1 || e_r < 1) {
    throw std::invalid_argument(
        "PairPrevalence: both categories need at least one event");
  }
  return PairPrevalence(static_cast<double>(e_k) /
                        static_cast<double>(e_k + e_r));
}

OutcomeDistribution OutcomeDistribution::from_counts(
    const std::vector<std::int64_t>& counts) {
  if (counts.size() < 2) {
    throw std::invalid_argument("OutcomeDistribution: need at least 2 categories");
  }
  std::int64_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) {
      throw std::invalid_argument("OutcomeDistribution: count for category " +
                                  std::to_string(i + 1) + " is negative");
    }
    total += counts[i];
  }
  if (total <= 0) {
    throw std::invalid_argument("OutcomeDistribution: total count must be positive");
  }
  OutcomeDistribution d;
  d.counts_ = counts;
  d.total_ = total;
  d.p_.resize(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d.p_[static_cast<Eigen::Index>(i)] =
        static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return d;
}

OutcomeDistribution OutcomeDistribution::from_proportions(
    const Eigen::VectorXd& proportions) {
  if (proportions.size() < 2) {
    throw std::invalid_argument("OutcomeDistribution: need at least 2 categories");
  }
  for (Eigen::Index i = 0; i < proportions.size(); ++i) {
    if (!(proportions[i] >= 0.0 && proportions[i] < 1.0) ||
        !std::isfinite(proportions[i])) {
      throw std::invalid_argument("OutcomeDistribution: proportion for category " +
                                  std::to_string(i + 1) + " must lie in [0,1)");
    }
  }
  const double sum = proportions.sum();
  if (std::fabs(sum - 1.0) > 1e-3) {
    throw std::invalid_argument(
        "OutcomeDistribution: proportions sum to " + std::to_string(sum) +
        "; they must sum to 1 (tolerance 1e-3 for rounded inputs)");
  }
  OutcomeDistribution d;
  d.p_ = proportions / sum;
  return d;
}

void OutcomeDistribution::check_category(int k) const {
  if (k < 1 || k > categories()) {
    throw std::out_of_range("OutcomeDistribution: category index " +
                            std::to_string(k) + " outside 1.." +
                            std::to_string(categories()));
  }
}

double OutcomeDistribution::proportion(int k) const {
  check_category(k);
  return p_[k - 1];
}

const std::vector<std::int64_t>& OutcomeDistribution::counts() const {
  if (!has_counts()) {
    throw std::logic_error("OutcomeDistribution: built from proportions, no counts");
  }
  return counts_;
}

std::int64_t OutcomeDistribution::count(int k) const {
  check_category(k);
  return counts().at(static_cast<std::size_t>(k - 1));
}

std::int64_t OutcomeDistribution::total() const {
  if (!has_counts()) {
    throw std::logic_error("OutcomeDistribution: built from proportions, no total");
  }
  return total_;
}

double OutcomeDistribution::pair_proportion(int k, int r) const {
  check_category(k);
  check_category(r);
  if (k == r) {
    throw std::invalid_argument("pair_proportion: categories must differ");
  }
  return p_[k - 1] + p_[r - 1];
}

PairPrevalence OutcomeDistribution::pair_prevalence(int k, int r) const {
  check_category(k);
  check_category(r);
  if (k == r) {
    throw std::invalid_argument("pair_prevalence: categories must differ");
  }
  const double denom = p_[k - 1] + p_[r - 1];
  if (!(denom > 0.0) || !(p_[k - 1] > 0.0) || !(p_[r - 1] > 0.0)) {
    throw std::domain_error("pair_prevalence: categories " + std::to_string(k) +
                            " and " + std::to_string(r) +
                            " must both have positive probability");
  }
  return PairPrevalence(p_[k - 1] / denom);
}

}  // namespace mnss
