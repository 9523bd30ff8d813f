#pragma once

#include <cstdint>
#include <string>

#include "survlink/sample_set.hpp"

namespace survlink {

struct SampleSetMeta {
  double sample_rate_hz = 0.0;
  double threshold_db = 0.0;
  std::uint64_t seed = 0;
};

/// One duration (seconds, decimal) per line with a versioned header:
/// `# survlink durations v1, sample_rate_hz=<r>, threshold_db=<d>, seed=<s>`.
void write_sample_set(const std::string& path, const SampleSet& samples, const SampleSetMeta& meta);

struct LoadedSampleSet {
  SampleSet samples;
  SampleSetMeta meta;
};

LoadedSampleSet read_sample_set(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace survlink
