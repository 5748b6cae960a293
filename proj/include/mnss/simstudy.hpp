#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mnss/glm.hpp"
#include "mnss/rng.hpp"
#include "mnss/scenarios.hpp"

namespace mnss {

// Development-cohort size: a fixed count, or one of the two sizes computed
// from the scenario itself.
enum class SampleSizeSymbol { n_mn, n_dl };
using NValue = std::variant<std::int64_t, SampleSizeSymbol>;

std::string n_value_label(const NValue& n);

struct RunConfig {
  ScenarioSpec scenario;
  std::vector<NValue> n_values;
  int reps = 1000;
  std::uint64_t seed = 1;
  std::int64_t calc_cohort = 500'000;
  std::int64_t validation_n = 500'000;
  int workers = 0;  // 0 = hardware concurrency
};

// Shrinkage estimands of a single replicate. Values are recorded regardless
// of magnitude; a replicate enters summaries only when `converged` is true.
struct ReplicateResult {
  double s_mn_21 = 0.0, s_mn_31 = 0.0;
  double s_dl_21 = 0.0, s_dl_31 = 0.0;
  double s_vh_mn = 0.0;
  double s_vh_dl_21 = 0.0, s_vh_dl_31 = 0.0;
  bool converged = false;
};

struct EstimandSummary {
  double mean = 0.0;
  double p2_5 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p97_5 = 0.0;
};

struct ShrinkageSummary {
  // keyed by estimand name as emitted in the CSV header
  std::map<std::string, EstimandSummary> estimands;
  std::int64_t n_converged = 0;
  std::int64_t n_excluded = 0;
};

struct StudyCell {
  NValue n_spec;
  std::int64_t n = 0;  // resolved development size
  std::vector<ReplicateResult> replicates;
  ShrinkageSummary summary;
};

struct StudyResult {
  std::string scenario_label;
  std::int64_t n_mn = 0, n_dl = 0;  // computed even when not requested
  std::vector<StudyCell> cells;
};

// Draws a development or validation cohort: five independent standard-normal
// covariates, outcome from the scenario's multinomial probabilities.
Dataset generate_dataset(const ScenarioSpec& spec, std::int64_t n,
                         RandomStream& stream);

// Sample size from applying the shrinkage criterion directly to the
// multinomial model on a large calculation cohort (10 parameters, S = 0.9).
std::int64_t compute_n_mn(const ScenarioSpec& spec, RandomStream& stream,
                          std::int64_t cohort_n = 500'000);

// Sample size from the distinct-logistic route: per-pair requirements on the
// {1,k} subsets, divided by the subset share, maximised over k.
std::int64_t compute_n_dl(const ScenarioSpec& spec, RandomStream& stream,
                          std::int64_t cohort_n = 500'000);

// One replicate: fit the multinomial and both distinct logistic models on a
// fresh development draw, take heuristic shrinkages from those fits, then
// estimate the actual shrinkage factors on the shared validation cohort.
ReplicateResult run_replicate(const ScenarioSpec& spec, std::int64_t n,
                              const Dataset& validation, RandomStream& stream);

ShrinkageSummary summarize(const std::vector<ReplicateResult>& results);

// Full study over the configured development sizes. Replicates run in
// parallel on substreams derived from (seed, n index, replicate index), so
// results are bit-identical for a fixed seed regardless of worker count.
StudyResult run_study(const RunConfig& config);

// CSV persistence (full double precision, header row first).
void write_replicates_csv(std::ostream& os, const StudyResult& result);
void write_summary_csv(std::ostream& os, const StudyResult& result);
void write_study_csvs(const StudyResult& result, const std::string& out_dir);

}  // namespace mnss
