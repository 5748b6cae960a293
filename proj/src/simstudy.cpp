#include "mnss/simstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "mnss/criteria.hpp"
#include "mnss/calibration.hpp"
#include "mnss/errors.hpp"
#include "mnss/rsq.hpp"

namespace mnss {

namespace {

constexpr int kPredictors = 5;
constexpr double kShrinkageTarget = 0.9;

// estimand name -> member, in CSV column order
struct EstimandField {
  const char* name;
  double ReplicateResult::* member;
};
constexpr EstimandField kEstimands[] = {
    {"s_mn_21", &ReplicateResult::s_mn_21},
    {"s_mn_31", &ReplicateResult::s_mn_31},
    {"s_dl_21", &ReplicateResult::s_dl_21},
    {"s_dl_31", &ReplicateResult::s_dl_31},
    {"s_vh_mn", &ReplicateResult::s_vh_mn},
    {"s_vh_dl_21", &ReplicateResult::s_vh_dl_21},
    {"s_vh_dl_31", &ReplicateResult::s_vh_dl_31},
};

std::uint64_t label_hash(const std::string& label) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double percentile_interpolated(const std::vector<double>& sorted, double p) {
  const std::size_t m = sorted.size();
  if (m == 1) return sorted[0];
  const double h = (static_cast<double>(m) - 1.0) * p / 100.0;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, m - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// adjusted R2 and required size from a fitted model's LR on a large cohort
double adjusted_r2(double lr, std::int64_t n, int params) {
  const double r2_app = 1.0 - std::exp(-lr / static_cast<double>(n));
  const double s_vh = heuristic_shrinkage(params, lr).value;
  return adjust_apparent(r2_app, s_vh);
}

// subset of rows with outcome in {1, k}; y01 = 1 for category k
void pair_subset(const Dataset& data, int k, Eigen::MatrixXd& x_out,
                 Eigen::VectorXd& y01_out) {
  Eigen::Index m = 0;
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    if (data.y[i] == 1 || data.y[i] == k) ++m;
  }
  x_out.resize(m, data.x.cols());
  y01_out.resize(m);
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    if (data.y[i] == 1 || data.y[i] == k) {
      x_out.row(j) = data.x.row(i);
      y01_out[j] = (data.y[i] == k) ? 1.0 : 0.0;
      ++j;
    }
  }
}

}  // namespace

std::string n_value_label(const NValue& n) {
  if (std::holds_alternative<std::int64_t>(n)) {
    return std::to_string(std::get<std::int64_t>(n));
  }
  return std::get<SampleSizeSymbol>(n) == SampleSizeSymbol::n_mn ? "N_MN" : "N_DL";
}

Dataset generate_dataset(const ScenarioSpec& spec, std::int64_t n,
                         RandomStream& stream) {
  if (n < 1) throw std::invalid_argument("generate_dataset: n must be >= 1");
  Dataset data;
  data.x.resize(n, kPredictors);
  data.y.resize(n);
  const Eigen::Matrix<double, 2, 5> slopes = spec.beta.rightCols<5>();
  const double b02 = spec.beta(0, 0);
  const double b03 = spec.beta(1, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int q = 0; q < kPredictors; ++q) data.x(i, q) = stream.normal();
    const double lp2 = b02 + slopes.row(0).dot(data.x.row(i));
    const double lp3 = b03 + slopes.row(1).dot(data.x.row(i));
    const double m = std::max({0.0, lp2, lp3});
    const double d0 = std::exp(-m);
    const double d2 = std::exp(lp2 - m);
    const double d3 = std::exp(lp3 - m);
    const double denom = d0 + d2 + d3;
    const double p1 = d0 / denom;
    const double p2 = d2 / denom;
    const double u = stream.uniform();
    data.y[i] = (u < p1) ? 1 : (u < p1 + p2) ? 2 : 3;
  }
  return data;
}

std::int64_t compute_n_mn(const ScenarioSpec& spec, RandomStream& stream,
                          std::int64_t cohort_n) {
  const Dataset cohort = generate_dataset(spec, cohort_n, stream);
  const auto fit = fit_multinomial(cohort);
  if (!fit.converged || fit.separation) {
    throw NonConvergenceError("compute_n_mn: calculation-cohort fit failed");
  }
  const double lr = lr_statistic(fit.lnl_null, fit.lnl);
  const int params = 2 * kPredictors;
  const double r2_adj = adjusted_r2(lr, cohort_n, params);
  return pair_events_required(params, r2_adj, kShrinkageTarget);
}

std::int64_t compute_n_dl(const ScenarioSpec& spec, RandomStream& stream,
                          std::int64_t cohort_n) {
  const Dataset cohort = generate_dataset(spec, cohort_n, stream);
  double n_required = 0.0;
  for (int k = 2; k <= 3; ++k) {
    Eigen::MatrixXd x_sub;
    Eigen::VectorXd y01;
    pair_subset(cohort, k, x_sub, y01);
    const auto fit = fit_binary_logistic(x_sub, y01);
    if (!fit.converged || fit.separation) {
      throw NonConvergenceError("compute_n_dl: calculation-cohort fit failed");
    }
    const std::int64_t n_pair = y01.size();
    const double lr = lr_statistic(fit.lnl_null, fit.lnl);
    const double r2_adj = adjusted_r2(lr, n_pair, kPredictors);
    const double m =
        pair_events_required_raw(kPredictors, r2_adj, kShrinkageTarget);
    const double omega =
        static_cast<double>(n_pair) / static_cast<double>(cohort_n);
    n_required = std::max(n_required, m / omega);
  }
  return static_cast<std::int64_t>(std::ceil(n_required - 1e-9));
}

ReplicateResult run_replicate(const ScenarioSpec& spec, std::int64_t n,
                              const Dataset& validation, RandomStream& stream) {
  ReplicateResult result;
  const Dataset dev = generate_dataset(spec, n, stream);

  int counts[4] = {0, 0, 0, 0};
  for (Eigen::Index i = 0; i < dev.y.size(); ++i) ++counts[dev.y[i]];
  if (counts[1] == 0 || counts[2] == 0 || counts[3] == 0) {
    return result;  // impossible fit; flagged for exclusion
  }

  try {
    bool ok = true;

    const auto mn_fit = fit_multinomial(dev);
    ok = ok && mn_fit.converged && !mn_fit.separation;
    const double lr_mn = lr_statistic(mn_fit.lnl_null, mn_fit.lnl);
    if (lr_mn <= 0.0) return result;
    result.s_vh_mn = heuristic_shrinkage(2 * kPredictors, lr_mn).value;

    Eigen::Matrix<double, 2, 5> gamma;  // distinct-logistic slopes
    for (int k = 2; k <= 3; ++k) {
      Eigen::MatrixXd x_sub;
      Eigen::VectorXd y01;
      pair_subset(dev, k, x_sub, y01);
      const auto fit = fit_binary_logistic(x_sub, y01);
      ok = ok && fit.converged && !fit.separation;
      const double lr = lr_statistic(fit.lnl_null, fit.lnl);
      if (lr <= 0.0) return result;
      const double s_vh = heuristic_shrinkage(kPredictors, lr).value;
      if (k == 2) {
        result.s_vh_dl_21 = s_vh;
      } else {
        result.s_vh_dl_31 = s_vh;
      }
      gamma.row(k - 2) = fit.coefficients.tail(kPredictors);
    }

    // actual shrinkage on the validation cohort
    LinearPredictorSet lps;
    lps.lp = validation.x * mn_fit.coefficients.rightCols(kPredictors).transpose();
    lps.y = validation.y;
    const auto recal = multinomial_recalibration(lps);
    ok = ok && recal.converged;
    result.s_mn_21 = recal.slopes[0];
    result.s_mn_31 = recal.slopes[1];

    for (int k = 2; k <= 3; ++k) {
      const Eigen::VectorXd lp_full =
          validation.x * gamma.row(k - 2).transpose();
      Eigen::Index m = 0;
      for (Eigen::Index i = 0; i < validation.y.size(); ++i) {
        if (validation.y[i] == 1 || validation.y[i] == k) ++m;
      }
      Eigen::VectorXd lp_sub(m), y01(m);
      Eigen::Index j = 0;
      for (Eigen::Index i = 0; i < validation.y.size(); ++i) {
        if (validation.y[i] == 1 || validation.y[i] == k) {
          lp_sub[j] = lp_full[i];
          y01[j] = (validation.y[i] == k) ? 1.0 : 0.0;
          ++j;
        }
      }
      const auto cal = binary_calibration_slope(lp_sub, y01);
      ok = ok && cal.converged;
      if (k == 2) {
        result.s_dl_21 = cal.slope;
      } else {
        result.s_dl_31 = cal.slope;
      }
    }

    result.converged = ok;
  } catch (const std::exception&) {
    result.converged = false;  // singular Hessian or degenerate subset
  }
  return result;
}

ShrinkageSummary summarize(const std::vector<ReplicateResult>& results) {
  ShrinkageSummary summary;
  std::vector<const ReplicateResult*> kept;
  for (const auto& r : results) {
    if (r.converged) {
      kept.push_back(&r);
    } else {
      ++summary.n_excluded;
    }
  }
  summary.n_converged = static_cast<std::int64_t>(kept.size());
  if (kept.empty()) {
    throw std::runtime_error("summarize: no converged replicates");
  }
  for (const auto& field : kEstimands) {
    std::vector<double> values;
    values.reserve(kept.size());
    for (const auto* r : kept) values.push_back(r->*(field.member));
    std::sort(values.begin(), values.end());
    EstimandSummary es;
    double sum = 0.0;
    for (double v : values) sum += v;
    es.mean = sum / static_cast<double>(values.size());
    es.p2_5 = percentile_interpolated(values, 2.5);
    es.p25 = percentile_interpolated(values, 25.0);
    es.p50 = percentile_interpolated(values, 50.0);
    es.p75 = percentile_interpolated(values, 75.0);
    es.p97_5 = percentile_interpolated(values, 97.5);
    summary.estimands[field.name] = es;
  }
  return summary;
}

StudyResult run_study(const RunConfig& config) {
  if (config.reps < 1) throw std::invalid_argument("run_study: reps must be >= 1");
  if (config.calc_cohort < 10'000 || config.validation_n < 10'000) {
    throw std::invalid_argument("run_study: cohort sizes must be >= 10,000");
  }
  const std::uint64_t scen_hash = label_hash(config.scenario.label);

  StudyResult result;
  result.scenario_label = config.scenario.label;
  {
    RandomStream calc_mn(derive_seed(config.seed, {scen_hash, 0xA11CE}));
    result.n_mn = compute_n_mn(config.scenario, calc_mn, config.calc_cohort);
    RandomStream calc_dl(derive_seed(config.seed, {scen_hash, 0xB0B}));
    result.n_dl = compute_n_dl(config.scenario, calc_dl, config.calc_cohort);
  }

  RandomStream valid_stream(derive_seed(config.seed, {scen_hash, 0x5EED}));
  const Dataset validation =
      generate_dataset(config.scenario, config.validation_n, valid_stream);

  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, config.reps));

  for (const NValue& n_spec : config.n_values) {
    StudyCell cell;
    cell.n_spec = n_spec;
    if (std::holds_alternative<std::int64_t>(n_spec)) {
      cell.n = std::get<std::int64_t>(n_spec);
    } else {
      cell.n = std::get<SampleSizeSymbol>(n_spec) == SampleSizeSymbol::n_mn
                   ? result.n_mn
                   : result.n_dl;
    }
    if (cell.n < 1) throw std::invalid_argument("run_study: n must be >= 1");

    cell.replicates.resize(static_cast<std::size_t>(config.reps));
    std::atomic<int> next{0};
    auto work = [&]() {
      for (;;) {
        const int rep = next.fetch_add(1);
        if (rep >= config.reps) break;
        RandomStream stream(derive_seed(
            config.seed, {scen_hash, static_cast<std::uint64_t>(cell.n),
                          static_cast<std::uint64_t>(rep)}));
        cell.replicates[static_cast<std::size_t>(rep)] =
            run_replicate(config.scenario, cell.n, validation, stream);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    cell.summary = summarize(cell.replicates);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

void write_replicates_csv(std::ostream& os, const StudyResult& result) {
  os << "scenario_label,n,replicate";
  for (const auto& field : kEstimands) os << ',' << field.name;
  os << ",converged\n";
  os << std::setprecision(17);
  for (const auto& cell : result.cells) {
    for (std::size_t rep = 0; rep < cell.replicates.size(); ++rep) {
      const auto& r = cell.replicates[rep];
      os << result.scenario_label << ',' << cell.n << ',' << rep;
      for (const auto& field : kEstimands) os << ',' << r.*(field.member);
      os << ',' << (r.converged ? 1 : 0) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& os, const StudyResult& result) {
  os << "scenario_label,n,estimand,mean,p2_5,p25,p50,p75,p97_5,n_converged,"
        "n_excluded\n";
  os << std::setprecision(17);
  for (const auto& cell : result.cells) {
    for (const auto& field : kEstimands) {
      const auto& es = cell.summary.estimands.at(field.name);
      os << result.scenario_label << ',' << cell.n << ',' << field.name << ','
         << es.mean << ',' << es.p2_5 << ',' << es.p25 << ',' << es.p50 << ','
         << es.p75 << ',' << es.p97_5 << ',' << cell.summary.n_converged << ','
         << cell.summary.n_excluded << '\n';
    }
  }
}

void write_study_csvs(const StudyResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw std::ios_base::failure("cannot create output directory " + out_dir +
                                 ": " + ec.message());
  }
  const auto write_file = [&](const std::string& name, auto writer) {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open " + path + " for writing");
    writer(os, result);
    os.flush();
    if (!os) throw std::ios_base::failure("write failed for " + path);
  };
  write_file("replicates.csv", write_replicates_csv);
  write_file("summary.csv", write_summary_csv);
}

}  // namespace mnss
