#include "mnss/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "mnss/errors.hpp"
#include "mnss/rng.hpp"
#include "mnss/rsq.hpp"

namespace mnss {

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kNagelkerkeFallback = 0.15;
constexpr double kPairAgreementTol = 2e-3;  // rounded published inputs

const char* source_name(R2Source s) {
  switch (s) {
    case R2Source::direct: return "given";
    case R2Source::c_statistic: return "c_statistic";
    case R2Source::nagelkerke: return "nagelkerke_0.15";
  }
  return "?";
}

std::string pair_name(int k, int r) {
  return "{" + std::to_string(k) + "," + std::to_string(r) + "}";
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

}  // namespace

SampleSizeRun run_samplesize(const StudyConfig& config) {
  SampleSizeRun run;
  run.config = config;

  if (!config.counts.empty() && !config.proportions.empty()) {
    throw ConfigError("give either counts or proportions, not both");
  }
  if (config.counts.empty() && config.proportions.empty()) {
    throw ConfigError("one of counts/proportions is required");
  }
  if (config.q_parameters < 1) {
    throw ConfigError("q_parameters must be >= 1");
  }
  if (!config.counts.empty()) {
    run.distribution = OutcomeDistribution::from_counts(config.counts);
  } else {
    run.distribution = OutcomeDistribution::from_proportions(
        Eigen::Map<const Eigen::VectorXd>(config.proportions.data(),
                                          static_cast<Eigen::Index>(
                                              config.proportions.size())));
  }
  const int k_categories = run.distribution.categories();
  if (config.k_categories > 0 && config.k_categories != k_categories) {
    throw ConfigError("k_categories = " + std::to_string(config.k_categories) +
                      " does not match the " + std::to_string(k_categories) +
                      " categories given");
  }

  // overall R2 and its maximum
  run.max_r2 = max_rcs(run.distribution);
  if (config.overall_r2.has_value()) {
    run.overall_r2 = *config.overall_r2;
    run.overall_source = R2Source::direct;
  } else {
    run.overall_r2 =
        cs_from_nagelkerke_assumption(run.distribution, kNagelkerkeFallback);
    run.overall_source = R2Source::nagelkerke;
  }

  // per-pair resolution
  std::vector<PairEstimate> estimates;
  for (int k = 2; k <= k_categories; ++k) {
    for (int r = 1; r < k; ++r) {
      const PairConfig* pc = nullptr;
      for (const auto& p : config.pairs) {
        if (p.k == k && p.r == r) {
          pc = &p;
          break;
        }
      }
      if (pc == nullptr) {
        throw ConfigError("pair " + pair_name(k, r) + " missing from config");
      }
      const int sources = (pc->r2_cs_adj.has_value() ? 1 : 0) +
                          (pc->c_statistic.has_value() ? 1 : 0) +
                          (pc->nagelkerke_fallback ? 1 : 0);
      if (sources != 1) {
        throw ConfigError("pair " + pair_name(k, r) +
                          " needs exactly one of r2_cs_adj, c_statistic, "
                          "nagelkerke");
      }

      PairResolution res;
      res.k = k;
      res.r = r;
      res.s_target = pc->shrinkage_target.value_or(config.shrinkage_target);

      const double p_sum = run.distribution.pair_proportion(k, r);
      if (pc->p_pair.has_value()) {
        if (std::fabs(*pc->p_pair - p_sum) > kPairAgreementTol) {
          throw ConfigError("pair " + pair_name(k, r) + ": p_pair " +
                            fmt(*pc->p_pair) + " disagrees with p_k + p_r = " +
                            fmt(p_sum));
        }
        res.p_pair = *pc->p_pair;
      } else {
        res.p_pair = p_sum;
      }

      if (pc->r2_cs_adj.has_value()) {
        res.source = R2Source::direct;
        res.r2 = *pc->r2_cs_adj;
      } else if (pc->c_statistic.has_value()) {
        res.source = R2Source::c_statistic;
        res.c_input = *pc->c_statistic;
        const PairPrevalence phi = run.distribution.pair_prevalence(k, r);
        res.phi = phi.phi();
        CStatSpec spec(*pc->c_statistic, phi);
        spec.sim_size = config.sim_size;
        spec.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(k),
                                              static_cast<std::uint64_t>(r)});
        res.cstat = rsq_from_cstat(spec);
        res.r2 = res.cstat->r2;
      } else {
        res.source = R2Source::nagelkerke;
        const PairPrevalence phi = run.distribution.pair_prevalence(k, r);
        res.phi = phi.phi();
        res.r2 = cs_from_nagelkerke_assumption(phi, kNagelkerkeFallback);
      }

      // consistency with the attainable maximum when phi is known
      if (run.distribution.proportion(k) > 0.0 &&
          run.distribution.proportion(r) > 0.0) {
        const double cap = max_rcs_pair(run.distribution.pair_prevalence(k, r));
        if (res.r2 >= cap) {
          throw ConfigError("pair " + pair_name(k, r) + ": R2 " + fmt(res.r2) +
                            " is not below the attainable maximum " + fmt(cap));
        }
      }

      run.resolutions.push_back(res);
      estimates.push_back(
          PairEstimate{k, r, res.r2, res.p_pair, res.s_target});
    }
  }

  run.criterion1 = criterion_one(estimates, config.q_parameters, k_categories);
  run.criterion2 = criterion_two(config.q_parameters, k_categories,
                                 run.overall_r2, run.max_r2, config.delta2);
  run.criterion3 =
      criterion_three(run.distribution, PrecisionSpec{config.delta3, config.alpha});
  run.direct_diagnostic =
      criterion_one_direct(config.q_parameters, k_categories, run.overall_r2,
                           config.shrinkage_target);
  run.final_report = final_sample_size(run.criterion1, run.criterion2,
                                       run.criterion3, run.distribution);
  return run;
}

std::string render_samplesize_text(const SampleSizeRun& run) {
  std::ostringstream os;
  const int k_categories = run.distribution.categories();
  os << "Minimum sample size for a " << k_categories
     << "-category multinomial prediction model\n";
  os << "Q = " << run.config.q_parameters
     << " candidate predictor parameters per sub-model\n";
  os << "category proportions:";
  for (int k = 1; k <= k_categories; ++k) {
    os << ' ' << fmt(run.distribution.proportion(k));
  }
  os << "\n\n";

  os << "Criterion (i), pairwise shrinkage targets:\n";
  os << "  pair    R2_adj  source           p_pair  S_target  events      n\n";
  for (std::size_t i = 0; i < run.criterion1.pairs.size(); ++i) {
    const auto& pr = run.criterion1.pairs[i];
    const auto& res = run.resolutions[i];
    os << "  " << std::left << std::setw(7) << pair_name(pr.k, pr.r)
       << std::right << ' ' << fmt(pr.r2_adj) << "  " << std::left
       << std::setw(15) << source_name(res.source) << std::right << ' '
       << fmt(pr.p_pair) << "    " << fmt(pr.s_target, 2) << "  " << std::setw(6)
       << pr.events << ' ' << std::setw(6) << pr.n << '\n';
  }
  os << "  binding pair " << pair_name(run.criterion1.binding_k, run.criterion1.binding_r)
     << "; n1 = " << run.criterion1.n << " (raw " << fmt(run.criterion1.n_raw, 2)
     << ")\n\n";

  os << "Criterion (ii), Nagelkerke difference <= " << fmt(run.config.delta2, 3)
     << " with R2_adj = " << fmt(run.overall_r2) << " ("
     << source_name(run.overall_source) << "), max R2 = " << fmt(run.max_r2)
     << ":\n  n2 = " << run.criterion2.n << " (raw " << fmt(run.criterion2.n_raw, 2)
     << ", implied shrinkage bound " << fmt(run.criterion2.shrinkage_bound) << ")\n\n";

  os << "Criterion (iii), overall-risk margin " << fmt(run.config.delta3, 3)
     << " at simultaneous alpha " << fmt(run.config.alpha, 3)
     << " (chi-square " << fmt(run.criterion3.chi2) << "):\n  per category:";
  for (auto nk : run.criterion3.n_per_category) os << ' ' << nk;
  os << "\n  n3 = " << run.criterion3.n << " (raw "
     << fmt(run.criterion3.n_raw_max, 2) << ")\n\n";

  os << "Diagnostic only (direct multinomial shrinkage, not used for the final "
        "size): n = "
     << run.direct_diagnostic.n << " (raw " << fmt(run.direct_diagnostic.n_raw, 2)
     << ")\n\n";

  os << "FINAL minimum sample size: n = " << run.final_report.n_final
     << " (criterion " << run.final_report.binding_criterion << " binding)\n";
  os << "expected events at n:";
  for (auto e : run.final_report.expected_events) os << ' ' << e;
  os << '\n';
  return os.str();
}

nlohmann::json render_samplesize_json(const SampleSizeRun& run) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  const int k_categories = run.distribution.categories();
  j["inputs"]["k_categories"] = k_categories;
  j["inputs"]["q_parameters"] = run.config.q_parameters;
  j["inputs"]["delta2"] = run.config.delta2;
  j["inputs"]["delta3"] = run.config.delta3;
  j["inputs"]["alpha"] = run.config.alpha;
  j["inputs"]["shrinkage_target"] = run.config.shrinkage_target;
  j["inputs"]["seed"] = run.config.seed;
  std::vector<double> props;
  for (int k = 1; k <= k_categories; ++k) {
    props.push_back(run.distribution.proportion(k));
  }
  j["inputs"]["proportions"] = props;
  if (!run.config.counts.empty()) j["inputs"]["counts"] = run.config.counts;
  j["inputs"]["overall_r2"] = run.overall_r2;
  j["inputs"]["overall_r2_source"] = source_name(run.overall_source);
  j["inputs"]["max_r2"] = run.max_r2;

  auto& c1 = j["criterion1"];
  c1["pairs"] = nlohmann::json::array();
  for (std::size_t i = 0; i < run.criterion1.pairs.size(); ++i) {
    const auto& pr = run.criterion1.pairs[i];
    const auto& res = run.resolutions[i];
    nlohmann::json p;
    p["k"] = pr.k;
    p["r"] = pr.r;
    p["r2_adj"] = pr.r2_adj;
    p["source"] = source_name(res.source);
    if (res.source == R2Source::c_statistic && res.cstat.has_value()) {
      p["c_statistic"] = res.c_input;
      p["cstat_simulation"] = {{"sim_size", run.config.sim_size},
                               {"achieved_c", res.cstat->achieved_c},
                               {"achieved_phi", res.cstat->achieved_phi},
                               {"mu", res.cstat->mu},
                               {"sigma", res.cstat->sigma}};
    }
    if (res.phi > 0.0) p["phi"] = res.phi;
    p["p_pair"] = pr.p_pair;
    p["s_target"] = pr.s_target;
    p["events_raw"] = pr.events_raw;
    p["events"] = pr.events;
    p["n_raw"] = pr.n_raw;
    p["n"] = pr.n;
    c1["pairs"].push_back(p);
  }
  c1["binding_pair"] = {run.criterion1.binding_k, run.criterion1.binding_r};
  c1["n_raw"] = run.criterion1.n_raw;
  c1["n"] = run.criterion1.n;

  j["criterion2"] = {{"n_raw", run.criterion2.n_raw},
                     {"n", run.criterion2.n},
                     {"shrinkage_bound", run.criterion2.shrinkage_bound}};

  auto& c3 = j["criterion3"];
  c3["chi2"] = run.criterion3.chi2;
  c3["n_per_category"] = run.criterion3.n_per_category;
  std::vector<double> raw3(run.criterion3.n_raw.data(),
                           run.criterion3.n_raw.data() + run.criterion3.n_raw.size());
  c3["n_raw_per_category"] = raw3;
  c3["degenerate_categories"] = run.criterion3.degenerate_categories;
  c3["n"] = run.criterion3.n;

  j["criterion1_direct"] = {{"n_raw", run.direct_diagnostic.n_raw},
                            {"n", run.direct_diagnostic.n},
                            {"diagnostic", true}};

  j["final"] = {{"n1", run.final_report.n1},
                {"n2", run.final_report.n2},
                {"n3", run.final_report.n3},
                {"n_final", run.final_report.n_final},
                {"binding_criterion", run.final_report.binding_criterion},
                {"expected_events", run.final_report.expected_events},
                {"expected_events_raw", run.final_report.expected_events_raw}};
  return j;
}

std::string render_cstat_text(const CStatSpec& spec, const CStatResult& result) {
  std::ostringstream os;
  os << "Cox-Snell R2 from C-statistic\n"
     << "  target C = " << fmt(spec.c, 3) << ", pair prevalence = "
     << fmt(spec.phi, 4) << ", cohort = " << spec.sim_size << ", seed = "
     << spec.seed << "\n"
     << "  calibrated linear predictor: mu = " << fmt(result.mu) << ", sigma = "
     << fmt(result.sigma) << "\n"
     << "  achieved C = " << fmt(result.achieved_c, 4) << ", achieved prevalence = "
     << fmt(result.achieved_phi, 4) << "\n"
     << "  estimated R2_CS_adj = " << fmt(result.r2) << '\n';
  return os.str();
}

nlohmann::json render_cstat_json(const CStatSpec& spec, const CStatResult& result) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["inputs"] = {{"c", spec.c},
                 {"phi", spec.phi},
                 {"sim_size", spec.sim_size},
                 {"seed", spec.seed},
                 {"c_tol", spec.c_tol},
                 {"phi_tol", spec.phi_tol}};
  j["result"] = {{"r2", result.r2},
                 {"mu", result.mu},
                 {"sigma", result.sigma},
                 {"achieved_c", result.achieved_c},
                 {"achieved_phi", result.achieved_phi}};
  return j;
}

std::string render_study_text(const StudyResult& result) {
  std::ostringstream os;
  os << "Simulation study, scenario " << result.scenario_label << '\n';
  os << "  N_MN = " << result.n_mn << ", N_DL = " << result.n_dl << '\n';
  for (const auto& cell : result.cells) {
    os << "  N = " << cell.n << " (" << n_value_label(cell.n_spec) << "), "
       << cell.summary.n_converged << " converged, " << cell.summary.n_excluded
       << " excluded\n";
    os << "    estimand      median    mean      p2.5    p97.5\n";
    for (const auto& [name, es] : cell.summary.estimands) {
      os << "    " << std::left << std::setw(12) << name << std::right << "  "
         << fmt(es.p50) << "  " << fmt(es.mean) << "  " << fmt(es.p2_5) << "  "
         << fmt(es.p97_5) << '\n';
    }
  }
  return os.str();
}

nlohmann::json render_study_json(const StudyResult& result) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario_label"] = result.scenario_label;
  j["n_mn"] = result.n_mn;
  j["n_dl"] = result.n_dl;
  j["cells"] = nlohmann::json::array();
  for (const auto& cell : result.cells) {
    nlohmann::json c;
    c["n_spec"] = n_value_label(cell.n_spec);
    c["n"] = cell.n;
    c["n_converged"] = cell.summary.n_converged;
    c["n_excluded"] = cell.summary.n_excluded;
    for (const auto& [name, es] : cell.summary.estimands) {
      c["estimands"][name] = {{"mean", es.mean}, {"p2_5", es.p2_5},
                              {"p25", es.p25},   {"p50", es.p50},
                              {"p75", es.p75},   {"p97_5", es.p97_5}};
    }
    j["cells"].push_back(c);
  }
  return j;
}

std::string render_scenarios_text() {
  std::ostringstream os;
  os << "Catalogued simulation scenarios (three-category outcome, five "
        "standard-normal predictors):\n";
  for (const auto& s : scenario_catalog()) {
    os << "  scenario " << s.label << "\n    beta2:";
    for (int j = 0; j < 6; ++j) os << ' ' << s.beta(0, j);
    os << "\n    beta3:";
    for (int j = 0; j < 6; ++j) os << ' ' << s.beta(1, j);
    os << "\n    expected frequencies: " << s.expected_freqs[0] << ' '
       << s.expected_freqs[1] << ' ' << s.expected_freqs[2] << '\n';
  }
  return os.str();
}

nlohmann::json render_scenarios_json() {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["scenarios"] = nlohmann::json::array();
  for (const auto& s : scenario_catalog()) {
    nlohmann::json o;
    o["label"] = s.label;
    o["beta2"] = std::vector<double>(s.beta.row(0).begin(), s.beta.row(0).end());
    o["beta3"] = std::vector<double>(s.beta.row(1).begin(), s.beta.row(1).end());
    o["expected_freqs"] = s.expected_freqs;
    j["scenarios"].push_back(o);
  }
  return j;
}

}  // namespace mnss
