#include "survlink/channel_sim.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "survlink/errors.hpp"

namespace survlink {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Phasor recurrences are restarted from libm cos/sin on this fixed global
// grid, which bounds rounding drift and keeps every sample a pure function
// of its index regardless of chunking.
constexpr std::uint64_t kResyncBlock = 4096;

double uniform_angle(std::mt19937_64& rng) {
  // 53-bit mantissa uniform in [0, 2pi); avoids std::uniform_real_distribution
  // so the draw sequence is fixed by the engine alone.
  return kTwoPi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

}  // namespace

void FadingConfig::validate() const {
  if (!(sample_rate_hz > 0.0)) throw ConfigError("fading: sample_rate_hz must be positive");
  if (!(max_doppler_hz > 0.0)) throw ConfigError("fading: max_doppler_hz must be positive");
  if (!(duration_s > 0.0)) throw ConfigError("fading: duration_s must be positive");
  if (!(slot_duration_s > 0.0)) throw ConfigError("fading: slot_duration_s must be positive");
  if (!(tx_power_scale > 0.0)) throw ConfigError("fading: tx_power_scale must be positive");
  if (!(sample_rate_hz > 2.0 * max_doppler_hz)) {
    throw ConfigError("fading: sample_rate_hz must exceed twice max_doppler_hz");
  }
  if (num_sinusoids < 8) throw ConfigError("fading: num_sinusoids must be at least 8");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

FadingProcess::FadingProcess(const FadingConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  std::mt19937_64 rng(cfg_.seed);
  const int n = cfg_.num_sinusoids;
  omega_i_.reserve(n);
  phase_i_.reserve(n);
  omega_q_.reserve(n);
  phase_q_.reserve(n);
  for (int m = 0; m < n; ++m) {
    omega_i_.push_back(kTwoPi * cfg_.max_doppler_hz * std::cos(uniform_angle(rng)));
    phase_i_.push_back(uniform_angle(rng));
  }
  for (int m = 0; m < n; ++m) {
    omega_q_.push_back(kTwoPi * cfg_.max_doppler_hz * std::cos(uniform_angle(rng)));
    phase_q_.push_back(uniform_angle(rng));
  }
  branch_scale_ = 1.0 / std::sqrt(static_cast<double>(n));
}

double FadingProcess::power_at(std::uint64_t index) const {
  double p = 0.0;
  fill(index, &p, 1);
  return p;
}

void FadingProcess::fill(std::uint64_t start, double* out, std::size_t count) const {
  const int n = cfg_.num_sinusoids;
  const double dt = 1.0 / cfg_.sample_rate_hz;
  std::vector<std::complex<double>> zi(n), zq(n), ri(n), rq(n);
  for (int m = 0; m < n; ++m) {
    ri[m] = std::polar(1.0, omega_i_[m] * dt);
    rq[m] = std::polar(1.0, omega_q_[m] * dt);
  }

  std::uint64_t idx = start;
  std::size_t written = 0;
  while (written < count) {
    const std::uint64_t block = idx / kResyncBlock;
    const std::uint64_t block_start = block * kResyncBlock;
    const std::uint64_t block_end = block_start + kResyncBlock;
    const double t0 = static_cast<double>(block_start) * dt;
    for (int m = 0; m < n; ++m) {
      zi[m] = std::polar(1.0, omega_i_[m] * t0 + phase_i_[m]);
      zq[m] = std::polar(1.0, omega_q_[m] * t0 + phase_q_[m]);
    }
    for (std::uint64_t j = block_start; j < block_end && written < count; ++j) {
      if (j >= idx) {
        double gi = 0.0, gq = 0.0;
        for (int m = 0; m < n; ++m) {
          gi += zi[m].real();
          gq += zq[m].real();
        }
        gi *= branch_scale_;
        gq *= branch_scale_;
        out[written++] = (gi * gi + gq * gq) * cfg_.tx_power_scale;
      }
      for (int m = 0; m < n; ++m) {
        zi[m] *= ri[m];
        zq[m] *= rq[m];
      }
    }
    idx = block_end;
  }
}

RssTrace generate_rss_trace(const FadingConfig& cfg) {
  cfg.validate();
  FadingProcess process(cfg);
  const auto count = static_cast<std::size_t>(std::floor(cfg.duration_s * cfg.sample_rate_hz));
  RssTrace trace;
  trace.sample_rate_hz = cfg.sample_rate_hz;
  trace.samples.resize(count);
  process.fill(0, trace.samples.data(), count);
  return trace;
}

DurationExtractor::DurationExtractor(double sample_rate_hz, double threshold_db)
    : linear_threshold_(db_to_linear(threshold_db)), sample_rate_hz_(sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) throw ConfigError("DurationExtractor: sample_rate_hz must be positive");
}

void DurationExtractor::push(double power, SampleSet& out) {
  if (power >= linear_threshold_) {
    ++run_length_;
    return;
  }
  if (run_length_ > 0 && seen_blocking_) {
    out.add(static_cast<double>(run_length_) / sample_rate_hz_);
  }
  run_length_ = 0;
  seen_blocking_ = true;
}

void DurationExtractor::finish() {
  // Whatever run is still open touches the trace end: censored.
  run_length_ = 0;
}

SampleSet extract_durations(const RssTrace& trace, double threshold_db) {
  if (trace.samples.empty()) throw DataError("extract_durations: empty trace");
  SampleSet out;
  DurationExtractor ex(trace.sample_rate_hz, threshold_db);
  for (double p : trace.samples) ex.push(p, out);
  ex.finish();
  return out;
}

SampleSet extract_durations_slotted(const RssTrace& trace, double threshold_db,
                                    double slot_duration_s) {
  if (trace.samples.empty()) throw DataError("extract_durations_slotted: empty trace");
  if (!(slot_duration_s > 0.0)) throw ConfigError("extract_durations_slotted: slot duration must be positive");
  const auto per_slot = static_cast<std::size_t>(std::llround(slot_duration_s * trace.sample_rate_hz));
  if (per_slot < 1) throw ConfigError("extract_durations_slotted: slot shorter than one sample");

  SampleSet out;
  DurationExtractor ex(1.0 / slot_duration_s, threshold_db);
  std::size_t i = 0;
  while (i + per_slot <= trace.samples.size()) {
    double slot_min = trace.samples[i];
    for (std::size_t j = 1; j < per_slot; ++j) slot_min = std::min(slot_min, trace.samples[i + j]);
    ex.push(slot_min, out);
    i += per_slot;
  }
  ex.finish();
  return out;
}

SampleSet collect_durations(const FadingConfig& cfg, double threshold_db, std::size_t count,
                            double max_sim_seconds, bool slot_aggregate) {
  FadingConfig chunk_cfg = cfg;
  chunk_cfg.duration_s = 1.0;  // validated below; chunking is internal
  chunk_cfg.validate();
  FadingProcess process(chunk_cfg);

  const auto per_slot = static_cast<std::size_t>(std::llround(cfg.slot_duration_s * cfg.sample_rate_hz));
  if (slot_aggregate && per_slot < 1) throw ConfigError("collect_durations: slot shorter than one sample");
  const double extract_rate = slot_aggregate ? 1.0 / cfg.slot_duration_s : cfg.sample_rate_hz;

  SampleSet out;
  DurationExtractor ex(extract_rate, threshold_db);
  const std::uint64_t max_samples =
      static_cast<std::uint64_t>(max_sim_seconds * cfg.sample_rate_hz);
  std::uint64_t chunk = 1u << 20;
  if (slot_aggregate) chunk -= chunk % per_slot;
  std::vector<double> buf(chunk);

  for (std::uint64_t start = 0; start < max_samples && out.size() < count; start += chunk) {
    const auto span = static_cast<std::size_t>(std::min<std::uint64_t>(chunk, max_samples - start));
    process.fill(start, buf.data(), span);
    if (slot_aggregate) {
      std::size_t i = 0;
      while (i + per_slot <= span && out.size() < count) {
        double slot_min = buf[i];
        for (std::size_t j = 1; j < per_slot; ++j) slot_min = std::min(slot_min, buf[i + j]);
        ex.push(slot_min, out);
        i += per_slot;
      }
    } else {
      for (std::size_t i = 0; i < span && out.size() < count; ++i) ex.push(buf[i], out);
    }
  }
  ex.finish();
  return out;
}

}  // namespace survlink
