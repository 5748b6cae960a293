#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mnss/config.hpp"
#include "mnss/criteria.hpp"
#include "mnss/cstat_rsq.hpp"
#include "mnss/outcome.hpp"
#include "mnss/simstudy.hpp"

namespace mnss {

enum class R2Source { direct, c_statistic, nagelkerke };

// Provenance of one pair's resolved R-squared, echoed in reports.
struct PairResolution {
  int k = 0, r = 0;
  double r2 = 0.0;
  double phi = 0.0;     // 0 when not derivable/needed
  double p_pair = 0.0;
  double s_target = 0.9;
  R2Source source = R2Source::direct;
  std::optional<CStatResult> cstat;  // set when source == c_statistic
  double c_input = 0.0;
};

// A complete sample-size calculation: resolved inputs, the three criteria,
// the diagnostic direct variant, and the final report.
struct SampleSizeRun {
  StudyConfig config;
  OutcomeDistribution distribution;
  std::vector<PairResolution> resolutions;
  double overall_r2 = 0.0;
  R2Source overall_source = R2Source::direct;
  double max_r2 = 0.0;
  CriterionOneReport criterion1;
  CriterionTwoReport criterion2;
  CriterionThreeReport criterion3;
  CriterionOneDirect direct_diagnostic;
  SampleSizeReport final_report;
};

// Resolves all R-squared inputs (direct, C-statistic simulation, or the
// Nagelkerke fallback) and runs the three criteria.
SampleSizeRun run_samplesize(const StudyConfig& config);

std::string render_samplesize_text(const SampleSizeRun& run);
nlohmann::json render_samplesize_json(const SampleSizeRun& run);

std::string render_cstat_text(const CStatSpec& spec, const CStatResult& result);
nlohmann::json render_cstat_json(const CStatSpec& spec, const CStatResult& result);

std::string render_study_text(const StudyResult& result);
nlohmann::json render_study_json(const StudyResult& result);

std::string render_scenarios_text();
nlohmann::json render_scenarios_json();

}  // namespace mnss
