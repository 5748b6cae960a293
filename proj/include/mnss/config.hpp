#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mnss {

// One pair {k,r} block of a study configuration. Exactly one of r2_cs_adj,
// c_statistic or nagelkerke_fallback must be set when the config is resolved.
struct PairConfig {
  int k = 0, r = 0;
  std::optional<double> r2_cs_adj;
  std::optional<double> c_statistic;
  bool nagelkerke_fallback = false;
  std::optional<double> p_pair;            // override; checked against p_k + p_r
  std::optional<double> shrinkage_target;  // override of the global target
};

// Inputs of a full sample-size calculation, as read from a config file.
// Flat keys plus one [pair k,r] section per pair.
struct StudyConfig {
  int k_categories = 0;  // 0 = infer from counts/proportions
  int q_parameters = 0;
  std::vector<std::int64_t> counts;  // exactly one of counts/proportions
  std::vector<double> proportions;
  double shrinkage_target = 0.9;
  double delta2 = 0.05;  // criterion (ii) margin
  double delta3 = 0.05;  // criterion (iii) margin
  double alpha = 0.05;   // criterion (iii) simultaneous error rate
  std::optional<double> overall_r2;  // Cox-Snell, adjusted
  bool overall_nagelkerke = false;   // fall back to R2_Nagelkerke = 0.15
  std::uint64_t seed = 1;
  std::int64_t sim_size = 1'000'000;
  std::vector<PairConfig> pairs;
};

// Parses the key-value config grammar; throws ConfigError with line context.
StudyConfig parse_study_config(const std::string& text);
StudyConfig load_study_config(const std::string& path);

// Canonical serialisation: parse(serialize(parse(x))) == parse(x).
std::string serialize_study_config(const StudyConfig& config);

// Scenario spec files for the `simulate` command.
struct ScenarioFile {
  std::string label;
  Eigen::Matrix<double, 2, 6> beta;
  std::array<double, 3> expected_freqs{};
};
ScenarioFile parse_scenario_file(const std::string& text);
ScenarioFile load_scenario_file(const std::string& path);

}  // namespace mnss
