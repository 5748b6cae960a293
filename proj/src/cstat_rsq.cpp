#include "mnss/cstat_rsq.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mnss/errors.hpp"
#include "mnss/glm.hpp"
#include "mnss/rng.hpp"
#include "mnss/rsq.hpp"

namespace mnss {

namespace {

struct Cohort {
  // z ascending, with its paired uniforms; sorting once makes both the event
  // fraction and the C-statistic O(n) per trial point, because the ranking
  // by L = mu + sigma z never changes for sigma > 0.
  Eigen::ArrayXd z;
  Eigen::ArrayXd u;
};

Cohort draw_cohort(std::int64_t n, std::uint64_t seed) {
  RandomStream stream(seed);
  std::vector<std::pair<double, double>> zu(static_cast<std::size_t>(n));
  for (auto& p : zu) {
    p.first = stream.normal();
    p.second = stream.uniform();
  }
  std::sort(zu.begin(), zu.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Cohort c;
  c.z.resize(n);
  c.u.resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    c.z[i] = zu[static_cast<std::size_t>(i)].first;
    c.u[i] = zu[static_cast<std::size_t>(i)].second;
  }
  return c;
}

// Outcomes for a trial (mu, sigma); y[i] = 1 iff u[i] < logistic(mu + sigma z[i]).
void simulate_events(const Cohort& c, double mu, double sigma,
                     Eigen::ArrayXd& y) {
  y = (c.u < 1.0 / (1.0 + (-(mu + sigma * c.z)).exp())).cast<double>();
}

// Empirical C given events on the z-sorted cohort: rank of row i is i+1.
double cstat_sorted(const Eigen::ArrayXd& y) {
  const double n = static_cast<double>(y.size());
  double n1 = 0.0, rank_sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0) {
      n1 += 1.0;
      rank_sum += static_cast<double>(i + 1);
    }
  }
  const double n0 = n - n1;
  return (rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

// Bisect mu so the simulated event fraction matches phi.
double solve_mu(const Cohort& c, double sigma, double phi, double tol,
                Eigen::ArrayXd& y) {
  double lo = -40.0, hi = 40.0;
  const double n = static_cast<double>(c.z.size());
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    simulate_events(c, mid, sigma, y);
    const double frac = y.sum() / n;
    if (std::fabs(frac - phi) <= tol) return mid;
    if (frac < phi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NonConvergenceError(
      "rsq_from_cstat: event-fraction search failed to reach phi=" +
      std::to_string(phi) + " at sigma=" + std::to_string(sigma));
}

}  // namespace

CStatResult rsq_from_cstat(const CStatSpec& spec) {
  if (!(spec.c > 0.5 && spec.c < 1.0)) {
    throw std::domain_error("rsq_from_cstat: C must lie in (0.5, 1)");
  }
  if (!(spec.phi > 0.0 && spec.phi < 1.0)) {
    throw std::domain_error("rsq_from_cstat: phi must lie in (0,1)");
  }
  if (spec.sim_size < 10'000) {
    throw std::invalid_argument("rsq_from_cstat: sim_size must be >= 10,000");
  }
  if (!(spec.c_tol > 0.0 && spec.phi_tol > 0.0)) {
    throw std::invalid_argument("rsq_from_cstat: tolerances must be positive");
  }

  const Cohort cohort = draw_cohort(spec.sim_size, spec.seed);
  Eigen::ArrayXd y(spec.sim_size);

  double lo = 0.01, hi = 10.0;
  double sigma = 0.0, mu = 0.0, achieved_c = 0.0;
  bool matched = false;
  int iterations = 0;
  for (int iter = 0; iter < 200; ++iter) {
    iterations = iter + 1;
    sigma = 0.5 * (lo + hi);
    mu = solve_mu(cohort, sigma, spec.phi, spec.phi_tol, y);
    achieved_c = cstat_sorted(y);
    if (std::fabs(achieved_c - spec.c) <= spec.c_tol) {
      matched = true;
      break;
    }
    if (achieved_c < spec.c) {
      lo = sigma;
    } else {
      hi = sigma;
    }
    if (hi - lo < 1e-12) break;
  }
  if (!matched) {
    throw NonConvergenceError(
        "rsq_from_cstat: C-statistic search did not bracket target C=" +
        std::to_string(spec.c) + " (best sigma=" + std::to_string(sigma) +
        " gives C=" + std::to_string(achieved_c) + ")");
  }

  // Likelihood ratio of the generating linear predictor (intercept
  // re-estimated, slope fixed at one) against the null model.
  const Eigen::VectorXd offset = (mu + sigma * cohort.z).matrix();
  const Eigen::VectorXd y01 = y.matrix();
  const auto fit = fit_binary_logistic(Eigen::MatrixXd(spec.sim_size, 0), y01,
                                       offset, FitOptions());
  if (!fit.converged) {
    throw NonConvergenceError("rsq_from_cstat: intercept recalibration failed");
  }
  const std::int64_t events = static_cast<std::int64_t>(y.sum());
  const double lnl0 = lnl_null_binary(events, spec.sim_size - events);
  const double lr = lr_statistic(lnl0, fit.lnl);

  CStatResult out;
  out.r2 = 1.0 - std::exp(-lr / static_cast<double>(spec.sim_size));
  out.mu = mu;
  out.sigma = sigma;
  out.achieved_c = achieved_c;
  out.achieved_phi = y.sum() / static_cast<double>(spec.sim_size);
  out.sigma_iterations = iterations;
  return out;
}

}  // namespace mnss
