#pragma once

#include <cstdint>
#include <vector>

#include "survlink/sample_set.hpp"

namespace survlink {

/// Parameters of the correlated Rayleigh flat-fading simulation.
struct FadingConfig {
  double sample_rate_hz = 4000.0;
  // Default Doppler follows the coherence-time rule of thumb
  // f_d = 0.423 / slot_duration_s, i.e. coherence time ~ one slot.
  double max_doppler_hz = 423.0;
  int num_sinusoids = 32;
  double duration_s = 1.0;
  double slot_duration_s = 1e-3;
  std::uint64_t seed = 0;
  double tx_power_scale = 1.0;

  void validate() const;
};

/// Sampled linear received power; unit mean before tx_power_scale.
struct RssTrace {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;
};

double db_to_linear(double db);

/// Clarke-style sum-of-sinusoids fading process. Each quadrature branch sums
/// num_sinusoids sinusoids with uniformly distributed arrival angles and
/// independent uniform phases; the envelope-squared power has unit mean and
/// the classic J0 Doppler autocorrelation.
///
/// power_at(i) is a pure function of the sample index, so traces can be
/// produced in chunks of any size with bit-identical results.
class FadingProcess {
 public:
  explicit FadingProcess(const FadingConfig& cfg);

  double power_at(std::uint64_t index) const;
  void fill(std::uint64_t start, double* out, std::size_t count) const;

  const FadingConfig& config() const { return cfg_; }

 private:
  FadingConfig cfg_;
  std::vector<double> omega_i_, phase_i_;  // in-phase branch
  std::vector<double> omega_q_, phase_q_;  // quadrature branch
  double branch_scale_ = 0.0;
};

/// Full trace of floor(duration_s * sample_rate_hz) samples.
RssTrace generate_rss_trace(const FadingConfig& cfg);

/// Streaming run-length extractor. A non-blocking duration is a maximal run
/// of samples with power >= threshold; runs touching either end of the trace
/// are censored (discarded).
class DurationExtractor {
 public:
  DurationExtractor(double sample_rate_hz, double threshold_db);

  void push(double power, SampleSet& out);
  /// End of trace: drops any still-open run as censored.
  void finish();

  double linear_threshold() const { return linear_threshold_; }

 private:
  double linear_threshold_;
  double sample_rate_hz_;
  bool seen_blocking_ = false;  // a below-threshold sample delimits the first full run
  std::uint64_t run_length_ = 0;
};

/// Per-sample blocking decision (the default convention).
SampleSet extract_durations(const RssTrace& trace, double threshold_db);

/// Slot-aggregated mode: blocking is declared per slot using the minimum
/// power over each slot; durations come out as whole slots. A trailing
/// partial slot is dropped.
SampleSet extract_durations_slotted(const RssTrace& trace, double threshold_db,
                                    double slot_duration_s);

/// Chunked generate + streaming extract until `count` durations are collected
/// or `max_sim_seconds` of channel time has been simulated, whichever comes
/// first. cfg.duration_s is ignored here.
SampleSet collect_durations(const FadingConfig& cfg, double threshold_db, std::size_t count,
                            double max_sim_seconds, bool slot_aggregate = false);

}  // namespace survlink
