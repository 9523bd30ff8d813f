#include "survlink/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "survlink/errors.hpp"

namespace survlink {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& section, const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError("config: [" + section + "] " + key + ": not a number: '" + v + "'");
  }
  return x;
}

}  // namespace

IniFile IniFile::parse(const std::string& text) {
  IniFile out;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: malformed section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key at line " + std::to_string(lineno));
    out.sections_[section][key] = value;
  }
  return out;
}

IniFile IniFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end() || !s->second.count(key)) {
    throw ConfigError("config: missing [" + section + "] " + key);
  }
  return s->second.at(key);
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  return to_double(section, key, get(section, key));
}

long long IniFile::get_int(const std::string& section, const std::string& key, long long fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError("config: [" + section + "] " + key + ": not an integer: '" + v + "'");
  }
  return x;
}

std::uint64_t IniFile::get_u64(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError("config: [" + section + "] " + key + ": not an unsigned integer: '" + v + "'");
  }
  return x;
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: [" + section + "] " + key + ": not a boolean: '" + v + "'");
}

std::vector<std::string> IniFile::get_list(const std::string& section, const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream is(get(section, key));
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> IniFile::get_double_list(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_list(section, key)) out.push_back(to_double(section, key, item));
  return out;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  return from_ini(IniFile::load(path));
}

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
  ExperimentConfig cfg;

  cfg.fading.sample_rate_hz = ini.get_double("fading", "sample_rate_hz", cfg.fading.sample_rate_hz);
  cfg.fading.max_doppler_hz = ini.get_double("fading", "max_doppler_hz", cfg.fading.max_doppler_hz);
  cfg.fading.num_sinusoids = static_cast<int>(ini.get_int("fading", "num_sinusoids", cfg.fading.num_sinusoids));
  cfg.fading.duration_s = ini.get_double("fading", "duration_s", cfg.fading.duration_s);
  cfg.fading.slot_duration_s = ini.get_double("fading", "slot_duration_s", cfg.fading.slot_duration_s);
  cfg.fading.tx_power_scale = ini.get_double("fading", "tx_power_scale", cfg.fading.tx_power_scale);
  cfg.slot_aggregate = ini.get_bool("fading", "slot_aggregate", cfg.slot_aggregate);

  if (ini.has("data", "thresholds_db")) cfg.thresholds_db = ini.get_double_list("data", "thresholds_db");
  cfg.train_samples = static_cast<std::size_t>(ini.get_int("data", "train_samples",
                                                           static_cast<long long>(cfg.train_samples)));
  cfg.test_samples = static_cast<std::size_t>(ini.get_int("data", "test_samples",
                                                          static_cast<long long>(cfg.test_samples)));
  cfg.train_seed = ini.get_u64("data", "train_seed", cfg.train_seed);
  cfg.test_seed = ini.get_u64("data", "test_seed", cfg.test_seed);
  cfg.max_sim_seconds = ini.get_double("data", "max_sim_seconds", cfg.max_sim_seconds);

  cfg.sweep.gamma = ini.get_double("weibull", "gamma", cfg.sweep.gamma);
  cfg.sweep.delta_frac = ini.get_double("weibull", "delta_frac", cfg.sweep.delta_frac);
  cfg.sweep.prior_grid_size = static_cast<int>(ini.get_int("weibull", "prior_grid", cfg.sweep.prior_grid_size));
  cfg.sweep.df_mode = df_mode_from_string(ini.get_or("weibull", "df_mode", "paper"));
  cfg.sweep.bands = ini.get_bool("weibull", "bands", cfg.sweep.bands);

  cfg.sweep.mlp_order = static_cast<int>(ini.get_int("mlp", "order", cfg.sweep.mlp_order));
  cfg.sweep.train.epochs = static_cast<int>(ini.get_int("mlp", "epochs", cfg.sweep.train.epochs));
  cfg.sweep.train.step_size = ini.get_double("mlp", "step_size", cfg.sweep.train.step_size);
  cfg.sweep.train.batch_size = static_cast<int>(ini.get_int("mlp", "batch_size", cfg.sweep.train.batch_size));
  cfg.sweep.train.momentum = ini.get_double("mlp", "momentum", cfg.sweep.train.momentum);
  cfg.sweep.train.step_decay = ini.get_double("mlp", "step_decay", cfg.sweep.train.step_decay);
  cfg.sweep.train.patience = static_cast<int>(ini.get_int("mlp", "patience", cfg.sweep.train.patience));
  cfg.sweep.train.seed = ini.get_u64("mlp", "train_seed", cfg.sweep.train.seed);

  if (ini.has("eval", "estimators")) {
    cfg.sweep.estimators.clear();
    for (const auto& name : ini.get_list("eval", "estimators")) {
      cfg.sweep.estimators.push_back(estimator_from_string(name));
    }
  }
  if (ini.has("eval", "sample_sizes")) {
    cfg.sweep.sample_sizes.clear();
    for (double v : ini.get_double_list("eval", "sample_sizes")) {
      cfg.sweep.sample_sizes.push_back(static_cast<std::size_t>(v));
    }
  }
  if (ini.has("eval", "epsilons")) cfg.sweep.epsilons = ini.get_double_list("eval", "epsilons");
  if (ini.has("eval", "obs_times_s")) cfg.sweep.observation_times_s = ini.get_double_list("eval", "obs_times_s");
  if (ini.has("eval", "seeds")) {
    cfg.run_seeds.clear();
    for (double v : ini.get_double_list("eval", "seeds")) {
      cfg.run_seeds.push_back(static_cast<std::uint64_t>(v));
    }
  }
  cfg.sweep.threads = static_cast<int>(ini.get_int("eval", "threads", cfg.sweep.threads));
  cfg.curve_t_s = ini.get_double("eval", "curve_t_s", cfg.curve_t_s);
  cfg.fig5_epsilon = ini.get_double("eval", "fig5_epsilon", cfg.fig5_epsilon);

  cfg.output_dir = ini.get_or("output", "dir", cfg.output_dir);

  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  fading.validate();
  if (thresholds_db.empty()) throw ConfigError("config: thresholds_db must be nonempty");
  if (train_samples < 2) throw ConfigError("config: train_samples must be at least 2");
  if (test_samples < 1) throw ConfigError("config: test_samples must be at least 1");
  if (!(max_sim_seconds > 0.0)) throw ConfigError("config: max_sim_seconds must be positive");
  if (run_seeds.empty()) throw ConfigError("config: seeds must be nonempty");
  // Train and test draws come from disjoint seed ranges.
  const std::uint64_t lo = std::min(train_seed, test_seed);
  const std::uint64_t hi = std::max(train_seed, test_seed);
  std::uint64_t max_run = 0;
  for (std::uint64_t r : run_seeds) max_run = std::max(max_run, r);
  if (hi - lo <= max_run) {
    throw ConfigError("config: train_seed and test_seed ranges overlap for the given run seeds");
  }
  sweep.validate();
  if (!(fig5_epsilon > 0.0 && fig5_epsilon < 1.0)) throw ConfigError("config: fig5_epsilon must lie in (0,1)");
  if (curve_t_s < 0.0) throw ConfigError("config: curve_t_s must be nonnegative");
}

}  // namespace survlink
