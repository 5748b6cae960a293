#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

namespace mnss {

// Generating model for the three-category simulation study: row 0 holds
// (beta_{0,2}, beta_{1,2}..beta_{5,2}), row 1 the category-3 coefficients.
// expected_freqs documents the approximate marginal outcome proportions.
struct ScenarioSpec {
  std::string label;
  Eigen::Matrix<double, 2, 6> beta;
  std::array<double, 3> expected_freqs{};
};

// The twelve catalogued scenarios; 1-based ids 1..12. Scenarios 7-12 double
// the covariate effects of scenarios 1-6.
const std::vector<ScenarioSpec>& scenario_catalog();

// Catalog lookup by 1-based id; throws std::out_of_range otherwise.
const ScenarioSpec& scenario_by_id(int id);

}  // namespace mnss
