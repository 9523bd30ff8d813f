#pragma once

#include <cstddef>
#include <vector>

#include "survlink/errors.hpp"

namespace survlink {

/// A single non-blocking connectivity duration in seconds.
struct DurationSample {
  double duration_s = 0.0;
};

/// A bag of non-blocking connectivity durations. This is the universal
/// currency between the simulator and the estimators.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::vector<double> durations) : durations_(std::move(durations)) {
    for (double d : durations_) {
      if (!(d > 0.0)) throw DataError("SampleSet: durations must be positive");
    }
  }

  void add(double duration_s) {
    if (!(duration_s > 0.0)) throw DataError("SampleSet: durations must be positive");
    durations_.push_back(duration_s);
  }

  std::size_t size() const { return durations_.size(); }
  bool empty() const { return durations_.empty(); }
  const std::vector<double>& durations() const { return durations_; }
  double operator[](std::size_t i) const { return durations_[i]; }

  /// First `n` samples in collection order; used for sample-complexity sweeps.
  SampleSet head(std::size_t n) const {
    if (n > durations_.size()) n = durations_.size();
    return SampleSet(std::vector<double>(durations_.begin(), durations_.begin() + static_cast<std::ptrdiff_t>(n)));
  }

 private:
  std::vector<double> durations_;
};

}  // namespace survlink
