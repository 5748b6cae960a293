#include "mnss/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "mnss/errors.hpp"

namespace mnss {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    fail(line, "value of '" + key + "' is not a number: '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    fail(line, "value of '" + key + "' is not an integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(line, "value of '" + key + "' is not a boolean: '" + v + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& v, Parse parse_one) {
  std::vector<T> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) out.push_back(parse_one(tok));
  return out;
}

}  // namespace

StudyConfig parse_study_config(const std::string& text) {
  StudyConfig cfg;
  PairConfig* current_pair = nullptr;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  bool overall_seen = false;

  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      std::string inner = trim(line.substr(1, line.size() - 2));
      if (inner.rfind("pair", 0) != 0) {
        fail(line_no, "unknown section '" + inner + "' (expected [pair k,r])");
      }
      inner = trim(inner.substr(4));
      const auto comma = inner.find(',');
      if (comma == std::string::npos) fail(line_no, "expected [pair k,r]");
      const int k = static_cast<int>(
          parse_int(trim(inner.substr(0, comma)), line_no, "pair k"));
      const int r = static_cast<int>(
          parse_int(trim(inner.substr(comma + 1)), line_no, "pair r"));
      if (k <= r || r < 1) fail(line_no, "pair indices must satisfy k > r >= 1");
      for (const auto& p : cfg.pairs) {
        if (p.k == k && p.r == r) {
          fail(line_no, "pair {" + std::to_string(k) + "," + std::to_string(r) +
                            "} defined twice");
        }
      }
      cfg.pairs.push_back(PairConfig{});
      current_pair = &cfg.pairs.back();
      current_pair->k = k;
      current_pair->r = r;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(line_no, "empty key or value");

    if (current_pair != nullptr) {
      if (key == "r2_cs_adj") {
        current_pair->r2_cs_adj = parse_double(value, line_no, key);
      } else if (key == "c_statistic") {
        current_pair->c_statistic = parse_double(value, line_no, key);
      } else if (key == "nagelkerke") {
        current_pair->nagelkerke_fallback = parse_bool(value, line_no, key);
      } else if (key == "p_pair") {
        current_pair->p_pair = parse_double(value, line_no, key);
      } else if (key == "shrinkage_target") {
        current_pair->shrinkage_target = parse_double(value, line_no, key);
      } else {
        fail(line_no, "unknown pair key '" + key + "'");
      }
      continue;
    }

    if (key == "k_categories") {
      cfg.k_categories = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "q_parameters") {
      cfg.q_parameters = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "counts") {
      cfg.counts = parse_list<std::int64_t>(value, [&](const std::string& t) {
        return parse_int(t, line_no, key);
      });
    } else if (key == "proportions") {
      cfg.proportions = parse_list<double>(value, [&](const std::string& t) {
        return parse_double(t, line_no, key);
      });
    } else if (key == "shrinkage_target") {
      cfg.shrinkage_target = parse_double(value, line_no, key);
    } else if (key == "delta2") {
      cfg.delta2 = parse_double(value, line_no, key);
    } else if (key == "delta3") {
      cfg.delta3 = parse_double(value, line_no, key);
    } else if (key == "alpha") {
      cfg.alpha = parse_double(value, line_no, key);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, line_no, key));
    } else if (key == "sim_size") {
      cfg.sim_size = parse_int(value, line_no, key);
    } else if (key == "overall_r2") {
      overall_seen = true;
      if (value == "nagelkerke") {
        cfg.overall_nagelkerke = true;
      } else {
        cfg.overall_r2 = parse_double(value, line_no, key);
      }
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }

  if (overall_seen && cfg.overall_r2.has_value() && cfg.overall_nagelkerke) {
    throw ConfigError("overall_r2 given both as a number and as 'nagelkerke'");
  }
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_study_config(buffer.str());
}

std::string serialize_study_config(const StudyConfig& config) {
  std::ostringstream os;
  os.precision(17);
  if (config.k_categories > 0) os << "k_categories = " << config.k_categories << '\n';
  os << "q_parameters = " << config.q_parameters << '\n';
  if (!config.counts.empty()) {
    os << "counts =";
    for (auto c : config.counts) os << ' ' << c;
    os << '\n';
  }
  if (!config.proportions.empty()) {
    os << "proportions =";
    for (auto p : config.proportions) os << ' ' << p;
    os << '\n';
  }
  os << "shrinkage_target = " << config.shrinkage_target << '\n';
  os << "delta2 = " << config.delta2 << '\n';
  os << "delta3 = " << config.delta3 << '\n';
  os << "alpha = " << config.alpha << '\n';
  if (config.overall_nagelkerke) {
    os << "overall_r2 = nagelkerke\n";
  } else if (config.overall_r2.has_value()) {
    os << "overall_r2 = " << *config.overall_r2 << '\n';
  }
  os << "seed = " << config.seed << '\n';
  os << "sim_size = " << config.sim_size << '\n';

  std::vector<PairConfig> sorted = config.pairs;
  std::sort(sorted.begin(), sorted.end(), [](const PairConfig& a, const PairConfig& b) {
    return a.k != b.k ? a.k < b.k : a.r < b.r;
  });
  for (const auto& pair : sorted) {
    os << "\n[pair " << pair.k << ',' << pair.r << "]\n";
    if (pair.r2_cs_adj) os << "r2_cs_adj = " << *pair.r2_cs_adj << '\n';
    if (pair.c_statistic) os << "c_statistic = " << *pair.c_statistic << '\n';
    if (pair.nagelkerke_fallback) os << "nagelkerke = true\n";
    if (pair.p_pair) os << "p_pair = " << *pair.p_pair << '\n';
    if (pair.shrinkage_target) os << "shrinkage_target = " << *pair.shrinkage_target << '\n';
  }
  return os.str();
}

ScenarioFile parse_scenario_file(const std::string& text) {
  ScenarioFile sf;
  sf.label = "custom";
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  bool have_b2 = false, have_b3 = false;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "label") {
      sf.label = value;
    } else if (key == "beta2" || key == "beta3") {
      const auto vals = parse_list<double>(value, [&](const std::string& t) {
        return parse_double(t, line_no, key);
      });
      if (vals.size() != 6) {
        fail(line_no, key + " needs 6 values (intercept + 5 slopes)");
      }
      const int row = (key == "beta2") ? 0 : 1;
      for (int j = 0; j < 6; ++j) sf.beta(row, j) = vals[static_cast<std::size_t>(j)];
      (row == 0 ? have_b2 : have_b3) = true;
    } else if (key == "expected_freqs") {
      const auto vals = parse_list<double>(value, [&](const std::string& t) {
        return parse_double(t, line_no, key);
      });
      if (vals.size() != 3) fail(line_no, "expected_freqs needs 3 values");
      std::copy(vals.begin(), vals.end(), sf.expected_freqs.begin());
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }
  if (!have_b2 || !have_b3) {
    throw ConfigError("scenario file must define beta2 and beta3");
  }
  return sf;
}

ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open scenario file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_file(buffer.str());
}

}  // namespace mnss
