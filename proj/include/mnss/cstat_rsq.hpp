#pragma once

#include <cstdint>

#include "mnss/outcome.hpp"

namespace mnss {

// Target C-statistic and pair prevalence for the Monte Carlo R-squared
// estimator, plus simulation controls.
struct CStatSpec {
  double c = 0.0;            // pairwise C-statistic, in (0.5, 1)
  double phi = 0.0;          // outcome proportion of category k within the pair
  std::int64_t sim_size = 1'000'000;
  std::uint64_t seed = 1;
  double c_tol = 0.002;
  double phi_tol = 0.002;

  CStatSpec() = default;
  CStatSpec(double c_, const PairPrevalence& phi_) : c(c_), phi(phi_.phi()) {}
};

struct CStatResult {
  double r2 = 0.0;           // estimated Cox-Snell R2 of the pair model
  double mu = 0.0, sigma = 0.0;  // calibrated linear-predictor distribution
  double achieved_c = 0.0;
  double achieved_phi = 0.0;
  int sigma_iterations = 0;
};

// Estimates the Cox-Snell R-squared of a binary logistic model from its
// C-statistic and outcome proportion. A cohort with linear predictor
// L ~ Normal(mu, sigma^2) and outcome ~ Bernoulli(logistic(L)) is simulated;
// mu and sigma are calibrated by nested bisections (common random numbers,
// the inner solve matching the event fraction, the outer matching the
// empirical C-statistic); R2 = 1 - exp(-LR/n) where LR compares the null
// model against L with a re-estimated intercept. Deterministic given seed.
CStatResult rsq_from_cstat(const CStatSpec& spec);

}  // namespace mnss
