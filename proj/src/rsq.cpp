#include "mnss/rsq.hpp"

#include <cmath>

namespace mnss {

double lnl_null_multinomial(const OutcomeDistribution& dist) {
  const auto& counts = dist.counts();
  const double n = static_cast<double>(dist.total());
  double lnl = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1) {
      throw std::domain_error("lnl_null_multinomial: category " +
                              std::to_string(i + 1) +
                              " has zero events (log of zero)");
    }
    const double e = static_cast<double>(counts[i]);
    lnl += e * std::log(e / n);
  }
  return lnl;
}

double lnl_null_binary(std::int64_t e_k, std::int64_t e_r) {
  if (e_k < 1 || e_r < 1) {
    throw std::domain_error(
        "lnl_null_binary: both categories need at least one event");
  }
  const double m = static_cast<double>(e_k + e_r);
  return static_cast<double>(e_k) * std::log(static_cast<double>(e_k) / m) +
         static_cast<double>(e_r) * std::log(static_cast<double>(e_r) / m);
}

double max_rcs(const OutcomeDistribution& dist) {
  return max_rcs_proportions(dist.proportions());
}

double max_rcs_pair(const PairPrevalence& phi) {
  Eigen::Vector2d p(phi.phi(), 1.0 - phi.phi());
  return max_rcs_proportions(p);
}

double nagelkerke_from_cs(double r2_cs, double max_r2) {
  if (!(max_r2 > 0.0 && max_r2 < 1.0)) {
    throw std::domain_error("nagelkerke_from_cs: max R2 must lie in (0,1)");
  }
  if (!(r2_cs >= 0.0)) {
    throw std::domain_error("nagelkerke_from_cs: R2 must be non-negative");
  }
  if (r2_cs > max_r2) {
    throw std::invalid_argument(
        "nagelkerke_from_cs: Cox-Snell R2 " + std::to_string(r2_cs) +
        " exceeds its attainable maximum " + std::to_string(max_r2));
  }
  return r2_cs / max_r2;
}

namespace {
double checked_nagelkerke(double r2_nag) {
  if (!(r2_nag >= 0.0 && r2_nag < 1.0)) {
    throw std::domain_error(
        "cs_from_nagelkerke_assumption: Nagelkerke R2 must lie in [0,1)");
  }
  return r2_nag;
}
}  // namespace

double cs_from_nagelkerke_assumption(const OutcomeDistribution& dist,
                                     double r2_nag) {
  return checked_nagelkerke(r2_nag) * max_rcs(dist);
}

double cs_from_nagelkerke_assumption(const PairPrevalence& phi, double r2_nag) {
  return checked_nagelkerke(r2_nag) * max_rcs_pair(phi);
}

double adjust_apparent(double r2_app, double s_vh) {
  if (!(r2_app >= 0.0 && r2_app < 1.0)) {
    throw std::domain_error("adjust_apparent: apparent R2 must lie in [0,1)");
  }
  if (!(s_vh > 0.0 && s_vh <= 1.0)) {
    throw std::domain_error("adjust_apparent: shrinkage must lie in (0,1]");
  }
  return s_vh * r2_app;
}

}  // namespace mnss
