#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "survlink/sample_set.hpp"
#include "survlink/survival.hpp"

namespace survlink {

/// Whether the network input features are powers of the remaining duration
/// tau = t_i - t (default) or of the absolute duration t_i.
enum class FeatureTime { remaining, absolute };

/// Labeled training tuples (tau_i, s_i): remaining durations of the samples
/// that survived past t, with positional empirical-CDF labels i/S_t.
struct LabeledSet {
  std::vector<double> tau;    // ascending
  std::vector<double> label;  // (1/S_t, 2/S_t, ..., 1)
  double observation_time = 0.0;
  int order = 1;
  FeatureTime feature_time = FeatureTime::remaining;

  std::size_t size() const { return tau.size(); }
};

LabeledSet build_training_set(const SampleSet& samples, double t, int order,
                              FeatureTime feature_time = FeatureTime::remaining);

struct TrainConfig {
  int epochs = 2000;
  double step_size = 0.05;
  int batch_size = 32;
  std::uint64_t seed = 1;
  int patience = 200;       // epochs without improvement before early stop
  double momentum = 0.9;
  double step_decay = 1e-3; // step_t = step_size / (1 + step_decay * epoch)

  void validate() const;
};

/// Fixed-architecture regression network for the conditional failure curve:
/// layers [n, 10, 6, 1], ReLU hidden activations and a symmetric saturating
/// linear output clamped to [-1, 1]. Inputs are (tau, tau^2, ..., tau^n),
/// each affinely normalized with constants frozen at training time.
class MlpModel {
 public:
  static constexpr int kHidden1 = 10;
  static constexpr int kHidden2 = 6;

  MlpModel() = default;
  MlpModel(int order, FeatureTime feature_time, double observation_time, std::uint64_t seed);

  /// Forward pass through satlins, then clipped to [0, 1].
  double predict_failure(double tau) const;

  /// Raw satlins output in [-1, 1], before the probability clip.
  double raw_output(double tau) const;

  int order() const { return order_; }
  double observation_time() const { return observation_time_; }
  FeatureTime feature_time() const { return feature_time_; }
  double max_training_tau() const { return max_training_tau_; }

  std::string to_text() const;
  static MlpModel from_text(const std::string& text);

  friend MlpModel train_mlp(const LabeledSet& labeled, const TrainConfig& cfg);
  friend class MlpTrainer;

 private:
  int order_ = 1;
  FeatureTime feature_time_ = FeatureTime::remaining;
  double observation_time_ = 0.0;
  double max_training_tau_ = 0.0;
  std::vector<double> feat_mean_, feat_scale_;     // per-power normalizers
  std::vector<double> w1_, b1_, w2_, b2_, w3_, b3_;

  void features(double tau, std::vector<double>& out) const;
  double forward(const std::vector<double>& feat) const;
};

/// Supervised MSE training by mini-batch gradient descent with momentum and
/// step decay; deterministic for a fixed (LabeledSet, TrainConfig).
/// Throws NumericalError if the loss diverges.
MlpModel train_mlp(const LabeledSet& labeled, const TrainConfig& cfg);

struct MlpTauStar {
  double tau = 0.0;
  bool saturated = false;    // epsilon above the largest prediction on the grid
  bool below_range = false;  // epsilon below the smallest prediction
};

/// Monotone rearrangement of the raw network curve on an ascending grid
/// (running maximum), queried by linear interpolation. A raw MLP output need
/// not be monotone but a CDF must be.
class MonotoneFailureCurve {
 public:
  MonotoneFailureCurve(const MlpModel& model, double grid_step, double horizon);

  double operator()(double tau) const;
  double max_value() const { return values_.back(); }
  double grid_step() const { return step_; }
  double horizon() const { return horizon_; }

  FailureCurve as_failure_curve() const;

 private:
  double step_;
  double horizon_;
  std::vector<double> values_;
};

/// Smallest grid point where the rearranged prediction crosses epsilon
/// (i.e. the largest grid point still within the outage budget).
MlpTauStar tau_star_mlp(const MlpModel& model, double epsilon,
                        double grid_step = 0.0, double horizon = 0.0);

struct MomentResult {
  double value = 0.0;
  bool tail_ok = true;  // failure curve reached 1 - 1e-3 inside the horizon
};

/// N-th raw moment of the remaining duration by numerical summation of the
/// survival-function identity E[tau^N] = N * integral tau^(N-1) (1-F_t) dtau,
/// discretized as N * sum_k (delta k)^(N-1) (1 - F_t(delta k)) delta.
MomentResult moments_numeric(const FailureCurve& curve, int N, double delta, double horizon);

}  // namespace survlink
