#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "survlink/channel_sim.hpp"
#include "survlink/eval.hpp"

namespace survlink {

/// Minimal INI-style reader: [section] headers, key = value pairs,
/// '#' comments, comma-separated lists.
class IniFile {
 public:
  static IniFile parse(const std::string& text);
  static IniFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;

  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Everything one experiment needs: channel settings, data collection sizes
/// and seeds, estimator options and the evaluation grid.
struct ExperimentConfig {
  FadingConfig fading;
  bool slot_aggregate = false;

  std::vector<double> thresholds_db{-8.0};
  std::size_t train_samples = 10000;
  std::size_t test_samples = 30000;
  std::uint64_t train_seed = 1;
  std::uint64_t test_seed = 500000;
  double max_sim_seconds = 1e6;

  // Evaluation grid; threshold/seed labels are filled per run.
  SweepSpec sweep;
  std::vector<std::uint64_t> run_seeds{0};

  // Figure-data settings.
  double curve_t_s = 0.3;      // observation time for failure-curve output
  double fig5_epsilon = 0.05;  // outage target for the tau*-vs-t figure

  std::string output_dir = "out";

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_ini(const IniFile& ini);
  void validate() const;
};

}  // namespace survlink
