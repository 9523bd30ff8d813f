#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "survlink/mlp.hpp"
#include "survlink/sample_set.hpp"
#include "survlink/weibull.hpp"

namespace survlink {

/// Split of the test durations into the smallest-epsilon fraction (positives,
/// true blocking events under the reliability target) and the rest.
struct Partition {
  std::vector<bool> positive;  // by original test-set index
  std::size_t positive_count = 0;
  double epsilon = 0.0;
};

/// |P| = floor(epsilon * |test|); boundary ties broken by stable sort order.
Partition partition_test_set(const SampleSet& test, double epsilon);

struct DetectionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

/// TP: s < tau* and s in P; FP: s < tau* and s in N; FN: s >= tau* and s in P.
DetectionCounts classify(const SampleSet& test, const Partition& partition, double tau_star);

/// F1 = TP / (TP + (FP + FN)/2); 1 when all three counts are zero.
double f_score(const DetectionCounts& counts);

enum class Estimator { weibull, mlp };

Estimator estimator_from_string(const std::string& name);
std::string to_string(Estimator estimator);

struct SweepSpec {
  std::vector<Estimator> estimators{Estimator::weibull, Estimator::mlp};
  std::vector<std::size_t> sample_sizes{100, 1000, 10000};
  std::vector<double> epsilons{0.001, 0.01, 0.1, 0.2, 0.3, 0.5};
  std::vector<double> observation_times_s{0.01, 0.3, 1.0};
  // Labels recorded with every row; the data itself is supplied by the caller.
  double threshold_db = -8.0;
  std::uint64_t seed = 0;

  // Weibull confidence-band settings.
  double gamma = 0.95;
  double delta_frac = 0.2;  // shape prior half-width as a fraction of k_hat
  int prior_grid_size = 21;
  DfMode df_mode = DfMode::paper;
  bool bands = true;

  // Data-driven settings.
  int mlp_order = 10;
  TrainConfig train;

  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct SweepRow {
  std::string estimator;
  std::size_t sample_size = 0;
  double epsilon = 0.0;
  double observation_time_s = 0.0;
  double threshold_db = 0.0;
  std::uint64_t seed = 0;
  double tau_star_s = 0.0;
  double f1 = 0.0;
  double tau_low_s = 0.0;   // NaN when not applicable
  double tau_high_s = 0.0;  // NaN when not applicable
  double mean_remaining_s = 0.0;
  double var_remaining_s2 = 0.0;
  std::string status;  // "ok" or an error note
};

/// One row per (estimator, S, epsilon, t). Estimator failures on a cell are
/// recorded in the row status and the sweep continues. Rows are ordered by
/// cell coordinates and deterministic for fixed inputs.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SampleSet& train,
                                const SampleSet& test);

std::string sweep_csv_header();
std::string sweep_row_csv(const SweepRow& row);

}  // namespace survlink
