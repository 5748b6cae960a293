#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "mnss/outcome.hpp"

namespace mnss {

enum class RSquaredKind { apparent, adjusted };
enum class RSquaredFamily { cox_snell, nagelkerke };

// A pseudo R-squared value tagged with its family and optimism status.
struct RSquared {
  double value = 0.0;
  RSquaredKind kind = RSquaredKind::apparent;
  RSquaredFamily family = RSquaredFamily::cox_snell;
};

// Log-likelihood (nats) of the intercept-only multinomial model,
// sum_k E_k ln(E_k/n). Requires counts with every E_k >= 1.
double lnl_null_multinomial(const OutcomeDistribution& dist);

// Binary special case: E_k ln(E_k/m) + E_r ln(E_r/m) with m = E_k + E_r.
double lnl_null_binary(std::int64_t e_k, std::int64_t e_r);

// Maximum attainable Cox-Snell R-squared, 1 - (prod_k p_k^{p_k})^2.
// Computed in log space; bounded above by (K^2-1)/K^2.
template <typename Derived>
double max_rcs_proportions(const Eigen::MatrixBase<Derived>& p) {
  double sum_plogp = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p.derived().coeff(i);
    if (!(pi > 0.0 && pi < 1.0)) {
      throw std::domain_error(
          "max_rcs: proportion for category " + std::to_string(i + 1) +
          " must lie strictly in (0,1), got " + std::to_string(pi));
    }
    sum_plogp += pi * std::log(pi);
  }
  return 1.0 - std::exp(2.0 * sum_plogp);
}

double max_rcs(const OutcomeDistribution& dist);
double max_rcs_pair(const PairPrevalence& phi);

// Nagelkerke R-squared from a Cox-Snell value and the attainable maximum.
double nagelkerke_from_cs(double r2_cs, double max_r2);

// Conservative fallback when no prior model information exists: the
// Cox-Snell value corresponding to a Nagelkerke R-squared of r2_nag
// (default 0.15).
double cs_from_nagelkerke_assumption(const OutcomeDistribution& dist,
                                     double r2_nag = 0.15);
double cs_from_nagelkerke_assumption(const PairPrevalence& phi,
                                     double r2_nag = 0.15);

// Optimism adjustment: R2_adj = S_VH * R2_app.
double adjust_apparent(double r2_app, double s_vh);

}  // namespace mnss
