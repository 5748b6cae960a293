// Command-line front end: sample-size calculation, C-statistic conversion,
// simulation-study runner, and scenario listing.
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 infeasible
// criterion, 4 I/O failure.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mnss/config.hpp"
#include "mnss/errors.hpp"
#include "mnss/report.hpp"
#include "mnss/scenarios.hpp"
#include "mnss/simstudy.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open " + path + " for writing");
  os << content;
  if (!os.flush()) throw std::ios_base::failure("write failed for " + path);
}

std::vector<mnss::NValue> parse_n_list(const std::vector<std::string>& items) {
  std::vector<mnss::NValue> out;
  for (const auto& raw : items) {
    std::string tok;
    std::istringstream is(raw);
    while (std::getline(is, tok, ',')) {
      if (tok.empty()) continue;
      if (tok == "N_MN" || tok == "n_mn") {
        out.emplace_back(mnss::SampleSizeSymbol::n_mn);
      } else if (tok == "N_DL" || tok == "n_dl") {
        out.emplace_back(mnss::SampleSizeSymbol::n_dl);
      } else {
        try {
          out.emplace_back(static_cast<std::int64_t>(std::stoll(tok)));
        } catch (const std::exception&) {
          throw mnss::ConfigError("invalid development size '" + tok +
                                  "' (expected an integer, N_MN or N_DL)");
        }
      }
    }
  }
  if (out.empty()) {
    throw mnss::ConfigError("--n needs at least one development size");
  }
  return out;
}

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool json = false;
  std::string out_dir;
};

int cmd_samplesize(const GlobalFlags& flags) {
  if (flags.config_path.empty()) {
    std::cerr << "samplesize: --config <path> is required\n";
    return kExitConfig;
  }
  mnss::StudyConfig config = mnss::load_study_config(flags.config_path);
  if (flags.seed) config.seed = *flags.seed;
  const mnss::SampleSizeRun run = mnss::run_samplesize(config);
  const std::string text = mnss::render_samplesize_text(run);
  const nlohmann::json json = mnss::render_samplesize_json(run);
  std::cout << (flags.json ? json.dump(2) + "\n" : text);
  if (!flags.out_dir.empty()) {
    std::filesystem::create_directories(flags.out_dir);
    write_text_file(flags.out_dir + "/report.txt", text);
    write_text_file(flags.out_dir + "/report.json", json.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_cstat2rsq(const GlobalFlags& flags, double c, double phi,
                  const std::vector<std::int64_t>& counts,
                  std::int64_t sim_size) {
  mnss::CStatSpec spec;
  spec.c = c;
  if (!counts.empty()) {
    if (counts.size() != 2) {
      throw mnss::ConfigError("--counts needs exactly two event counts");
    }
    spec.phi = mnss::PairPrevalence::from_counts(counts[0], counts[1]).phi();
  } else if (phi > 0.0) {
    spec.phi = phi;
  } else {
    throw mnss::ConfigError("one of --phi or --counts is required");
  }
  spec.sim_size = sim_size;
  if (flags.seed) spec.seed = *flags.seed;
  const mnss::CStatResult result = mnss::rsq_from_cstat(spec);
  const std::string text = mnss::render_cstat_text(spec, result);
  const nlohmann::json json = mnss::render_cstat_json(spec, result);
  std::cout << (flags.json ? json.dump(2) + "\n" : text);
  if (!flags.out_dir.empty()) {
    std::filesystem::create_directories(flags.out_dir);
    write_text_file(flags.out_dir + "/cstat2rsq.json", json.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_simulate(const GlobalFlags& flags, int scenario_id,
                 const std::string& spec_file,
                 const std::vector<std::string>& n_items, int reps,
                 std::int64_t calc_cohort, std::int64_t validation_n,
                 int threads) {
  mnss::RunConfig config;
  if (!spec_file.empty()) {
    const mnss::ScenarioFile sf = mnss::load_scenario_file(spec_file);
    config.scenario.label = sf.label;
    config.scenario.beta = sf.beta;
    config.scenario.expected_freqs = sf.expected_freqs;
  } else {
    config.scenario = mnss::scenario_by_id(scenario_id);
  }
  config.n_values = parse_n_list(n_items);
  config.reps = reps;
  config.seed = flags.seed.value_or(1);
  config.calc_cohort = calc_cohort;
  config.validation_n = validation_n;
  config.workers = threads;

  const mnss::StudyResult result = mnss::run_study(config);
  std::cout << (flags.json ? mnss::render_study_json(result).dump(2) + "\n"
                           : mnss::render_study_text(result));
  if (!flags.out_dir.empty()) {
    mnss::write_study_csvs(result, flags.out_dir);
    std::cerr << "wrote " << flags.out_dir << "/replicates.csv and "
              << flags.out_dir << "/summary.csv\n";
  }
  return kExitOk;
}

int cmd_scenarios(const GlobalFlags& flags) {
  std::cout << (flags.json ? mnss::render_scenarios_json().dump(2) + "\n"
                           : mnss::render_scenarios_text());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum sample size for multinomial risk prediction models"};
  app.require_subcommand(1);

  GlobalFlags flags;
  std::uint64_t seed_value = 0;
  app.add_option("--config", flags.config_path, "configuration file")
      ->expected(1);
  auto* seed_opt =
      app.add_option("--seed", seed_value, "random seed (64-bit)");
  app.add_flag("--json", flags.json, "emit the machine-readable report");
  app.add_option("--out", flags.out_dir, "directory for report/CSV output");

  auto* sub_samplesize = app.add_subcommand(
      "samplesize", "compute the three sample-size criteria from a config");

  double c = 0.0, phi = 0.0;
  std::vector<std::int64_t> counts;
  std::int64_t sim_size = 1'000'000;
  auto* sub_cstat = app.add_subcommand(
      "cstat2rsq", "estimate a pair's Cox-Snell R2 from its C-statistic");
  sub_cstat->add_option("--c", c, "pairwise C-statistic in (0.5,1)")->required();
  sub_cstat->add_option("--phi", phi, "pair prevalence of category k in (0,1)");
  sub_cstat->add_option("--counts", counts,
                        "event counts of the two categories (alternative to --phi)")
      ->expected(2);
  sub_cstat->add_option("--sim-size", sim_size, "simulated cohort size");

  int scenario_id = 0;
  std::string spec_file;
  std::vector<std::string> n_items;
  int reps = 1000;
  std::int64_t calc_cohort = 500'000, validation_n = 500'000;
  int threads = 0;
  auto* sub_simulate =
      app.add_subcommand("simulate", "run the shrinkage simulation study");
  sub_simulate->add_option("scenario", scenario_id, "catalogued scenario id (1-12)");
  sub_simulate->add_option("--spec-file", spec_file, "custom scenario file");
  sub_simulate
      ->add_option("--n", n_items,
                   "development sizes (integers, N_MN or N_DL; comma separated)")
      ->required();
  sub_simulate->add_option("--reps", reps, "replicates per development size");
  sub_simulate->add_option("--calc-cohort", calc_cohort,
                           "cohort size for the N_MN/N_DL calculation");
  sub_simulate->add_option("--validation-n", validation_n,
                           "validation cohort size");
  sub_simulate->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* sub_scenarios =
      app.add_subcommand("scenarios", "list the catalogued scenarios");

  // global flags may follow the subcommand name
  for (auto* sub : {sub_samplesize, sub_cstat, sub_simulate, sub_scenarios}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (seed_opt->count() > 0) flags.seed = seed_value;

  try {
    if (sub_samplesize->parsed()) return cmd_samplesize(flags);
    if (sub_cstat->parsed()) {
      return cmd_cstat2rsq(flags, c, phi, counts, sim_size);
    }
    if (sub_simulate->parsed()) {
      if (spec_file.empty() && scenario_id == 0) {
        throw mnss::ConfigError("simulate needs a scenario id or --spec-file");
      }
      return cmd_simulate(flags, scenario_id, spec_file, n_items, reps,
                          calc_cohort, validation_n, threads);
    }
    if (sub_scenarios->parsed()) return cmd_scenarios(flags);
  } catch (const mnss::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const mnss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
