#include "mnss/scenarios.hpp"

#include <stdexcept>

namespace mnss {

namespace {

ScenarioSpec make_scenario(std::string label, double b02, double b03,
                           double effect_scale, std::array<double, 3> freqs) {
  ScenarioSpec s;
  s.label = std::move(label);
  s.beta.row(0) << b02, 0.5 * effect_scale, -0.25 * effect_scale,
      -0.125 * effect_scale, 0.25 * effect_scale, 0.375 * effect_scale;
  s.beta.row(1) << b03, 0.375 * effect_scale, -0.5 * effect_scale,
      -0.25 * effect_scale, -0.375 * effect_scale, 0.125 * effect_scale;
  s.expected_freqs = freqs;
  return s;
}

std::vector<ScenarioSpec> build_catalog() {
  std::vector<ScenarioSpec> all;
  all.push_back(make_scenario("1 (all same)", 0.0, 0.0, 1.0, {0.33, 0.33, 0.33}));
  all.push_back(make_scenario("2 (one lower)", 0.0, -0.75, 1.0, {0.40, 0.40, 0.19}));
  all.push_back(make_scenario("3 (all different)", -0.35, -0.85, 1.0,
                              {0.45, 0.33, 0.21}));
  all.push_back(make_scenario("4 (one rare category)", -0.4, -1.7, 1.0,
                              {0.52, 0.36, 0.11}));
  all.push_back(make_scenario("5 (one very rare category)", -0.53, -2.4, 1.0,
                              {0.58, 0.36, 0.06}));
  all.push_back(make_scenario("6 (two very rare categories)", -2.9, -2.9, 1.0,
                              {0.88, 0.06, 0.06}));
  all.push_back(make_scenario("7 (all same)", 0.0, -1.0, 2.0, {0.33, 0.33, 0.34}));
  all.push_back(make_scenario("8 (one lower)", 0.0, -1.0, 2.0, {0.40, 0.40, 0.19}));
  all.push_back(make_scenario("9 (all different)", -0.4, -1.0, 2.0,
                              {0.45, 0.33, 0.21}));
  all.push_back(make_scenario("10 (one rare category)", -0.5, -2.0, 2.0,
                              {0.52, 0.36, 0.11}));
  all.push_back(make_scenario("11 (one very rare category)", -0.65, -2.85, 2.0,
                              {0.58, 0.36, 0.06}));
  all.push_back(make_scenario("12 (two very rare categories)", -3.5, -3.5, 2.0,
                              {0.88, 0.06, 0.06}));
  return all;
}

}  // namespace

const std::vector<ScenarioSpec>& scenario_catalog() {
  static const std::vector<ScenarioSpec> catalog = build_catalog();
  return catalog;
}

const ScenarioSpec& scenario_by_id(int id) {
  const auto& catalog = scenario_catalog();
  if (id < 1 || id > static_cast<int>(catalog.size())) {
    throw std::out_of_range("scenario id must lie in 1.." +
                            std::to_string(catalog.size()) + ", got " +
                            std::to_string(id));
  }
  return catalog[static_cast<std::size_t>(id - 1)];
}

}  // namespace mnss
