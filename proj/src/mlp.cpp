#include "survlink/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "survlink/errors.hpp"

namespace survlink {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

LabeledSet build_training_set(const SampleSet& samples, double t, int order,
                              FeatureTime feature_time) {
  if (t < 0.0) throw ConfigError("build_training_set: t must be nonnegative");
  if (order < 1) throw ConfigError("build_training_set: order must be at least 1");

  std::vector<double> survivors;
  for (double ti : samples.durations()) {
    if (ti >= t) survivors.push_back(ti);
  }
  if (survivors.size() < 2) {
    throw InsufficientDataError("build_training_set: fewer than two samples at or beyond t");
  }
  std::stable_sort(survivors.begin(), survivors.end());

  LabeledSet out;
  out.observation_time = t;
  out.order = order;
  out.feature_time = feature_time;
  const auto s_t = static_cast<double>(survivors.size());
  out.tau.reserve(survivors.size());
  out.label.reserve(survivors.size());
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    out.tau.push_back(survivors[i] - t);
    out.label.push_back(static_cast<double>(i + 1) / s_t);
  }
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("TrainConfig: epochs must be positive");
  if (!(step_size > 0.0)) throw ConfigError("TrainConfig: step_size must be positive");
  if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be positive");
  if (patience < 1) throw ConfigError("TrainConfig: patience must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("TrainConfig: momentum must lie in [0,1)");
  if (step_decay < 0.0) throw ConfigError("TrainConfig: step_decay must be nonnegative");
}

MlpModel::MlpModel(int order, FeatureTime feature_time, double observation_time,
                   std::uint64_t seed)
    : order_(order), feature_time_(feature_time), observation_time_(observation_time) {
  if (order < 1) throw ConfigError("MlpModel: order must be at least 1");
  feat_mean_.assign(order_, 0.0);
  feat_scale_.assign(order_, 1.0);
  w1_.assign(static_cast<std::size_t>(kHidden1) * order_, 0.0);
  b1_.assign(kHidden1, 0.0);
  w2_.assign(static_cast<std::size_t>(kHidden2) * kHidden1, 0.0);
  b2_.assign(kHidden2, 0.0);
  w3_.assign(kHidden2, 0.0);
  b3_.assign(1, 0.0);

  std::mt19937_64 rng(seed);
  auto glorot = [&](std::vector<double>& w, int fan_in, int fan_out) {
    const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& x : w) x = r * (2.0 * uniform01(rng) - 1.0);
  };
  glorot(w1_, order_, kHidden1);
  glorot(w2_, kHidden1, kHidden2);
  glorot(w3_, kHidden2, 1);
}

void MlpModel::features(double tau, std::vector<double>& out) const {
  out.resize(order_);
  const double base = feature_time_ == FeatureTime::remaining ? tau : observation_time_ + tau;
  double p = 1.0;
  for (int j = 0; j < order_; ++j) {
    p *= base;
    out[j] = (p - feat_mean_[j]) / feat_scale_[j];
  }
}

double MlpModel::forward(const std::vector<double>& feat) const {
  double h1[kHidden1];
  double h2[kHidden2];
  for (int i = 0; i < kHidden1; ++i) {
    double z = b1_[i];
    for (int j = 0; j < order_; ++j) z += w1_[static_cast<std::size_t>(i) * order_ + j] * feat[j];
    h1[i] = z > 0.0 ? z : 0.0;
  }
  for (int i = 0; i < kHidden2; ++i) {
    double z = b2_[i];
    for (int j = 0; j < kHidden1; ++j) z += w2_[static_cast<std::size_t>(i) * kHidden1 + j] * h1[j];
    h2[i] = z > 0.0 ? z : 0.0;
  }
  double z = b3_[0];
  for (int j = 0; j < kHidden2; ++j) z += w3_[j] * h2[j];
  return std::clamp(z, -1.0, 1.0);  // symmetric saturating linear output
}

double MlpModel::raw_output(double tau) const {
  std::vector<double> feat;
  features(tau, feat);
  return forward(feat);
}

double MlpModel::predict_failure(double tau) const {
  return std::clamp(raw_output(tau), 0.0, 1.0);
}

namespace {

struct Gradients {
  std::vector<double> w1, b1, w2, b2, w3, b3;
};

}  // namespace

// Exposes the backward pass to train_mlp while keeping weights private.
class MlpTrainer {
 public:
  explicit MlpTrainer(MlpModel& model) : m_(model) {}

  void set_normalizers(const LabeledSet& labeled) {
    const auto n = static_cast<double>(labeled.size());
    const double t = m_.observation_time_;
    for (int j = 0; j < m_.order_; ++j) {
      long double sum = 0.0L, sq = 0.0L;
      for (double tau : labeled.tau) {
        const double base = m_.feature_time_ == FeatureTime::remaining ? tau : t + tau;
        const double p = std::pow(base, j + 1);
        sum += p;
        sq += static_cast<long double>(p) * p;
      }
      const double mean = static_cast<double>(sum / n);
      const double var = std::max(static_cast<double>(sq / n) - mean * mean, 0.0);
      m_.feat_mean_[j] = mean;
      m_.feat_scale_[j] = std::max(std::sqrt(var), 1e-12 * std::max(std::fabs(mean), 1.0));
    }
  }

  // Accumulates gradients of the summed squared error over one tuple;
  // returns the squared error.
  double accumulate(double tau, double target, Gradients& g) {
    std::vector<double>& feat = feat_buf_;
    m_.features(tau, feat);

    double z1[MlpModel::kHidden1], h1[MlpModel::kHidden1];
    double z2[MlpModel::kHidden2], h2[MlpModel::kHidden2];
    for (int i = 0; i < MlpModel::kHidden1; ++i) {
      double z = m_.b1_[i];
      for (int j = 0; j < m_.order_; ++j) z += m_.w1_[static_cast<std::size_t>(i) * m_.order_ + j] * feat[j];
      z1[i] = z;
      h1[i] = z > 0.0 ? z : 0.0;
    }
    for (int i = 0; i < MlpModel::kHidden2; ++i) {
      double z = m_.b2_[i];
      for (int j = 0; j < MlpModel::kHidden1; ++j) z += m_.w2_[static_cast<std::size_t>(i) * MlpModel::kHidden1 + j] * h1[j];
      z2[i] = z;
      h2[i] = z > 0.0 ? z : 0.0;
    }
    double z3 = m_.b3_[0];
    for (int j = 0; j < MlpModel::kHidden2; ++j) z3 += m_.w3_[j] * h2[j];
    const double out = std::clamp(z3, -1.0, 1.0);

    const double err = out - target;
    // d(err^2)/dz3; zero outside the saturating region.
    const double dz3 = (z3 > -1.0 && z3 < 1.0) ? 2.0 * err : 0.0;

    g.b3[0] += dz3;
    double dh2[MlpModel::kHidden2];
    for (int j = 0; j < MlpModel::kHidden2; ++j) {
      g.w3[j] += dz3 * h2[j];
      dh2[j] = dz3 * m_.w3_[j];
    }
    double dh1[MlpModel::kHidden1] = {0};
    for (int i = 0; i < MlpModel::kHidden2; ++i) {
      const double dz2 = z2[i] > 0.0 ? dh2[i] : 0.0;
      g.b2[i] += dz2;
      for (int j = 0; j < MlpModel::kHidden1; ++j) {
        g.w2[static_cast<std::size_t>(i) * MlpModel::kHidden1 + j] += dz2 * h1[j];
        dh1[j] += dz2 * m_.w2_[static_cast<std::size_t>(i) * MlpModel::kHidden1 + j];
      }
    }
    for (int i = 0; i < MlpModel::kHidden1; ++i) {
      const double dz1 = z1[i] > 0.0 ? dh1[i] : 0.0;
      g.b1[i] += dz1;
      for (int j = 0; j < m_.order_; ++j) {
        g.w1[static_cast<std::size_t>(i) * m_.order_ + j] += dz1 * feat[j];
      }
    }
    return err * err;
  }

  MlpModel& m_;
  std::vector<double> feat_buf_;
};

MlpModel train_mlp(const LabeledSet& labeled, const TrainConfig& cfg) {
  cfg.validate();
  if (labeled.size() < 2) throw InsufficientDataError("train_mlp: need at least two tuples");

  MlpModel model(labeled.order, labeled.feature_time, labeled.observation_time, cfg.seed);
  MlpTrainer trainer(model);
  trainer.set_normalizers(labeled);
  model.max_training_tau_ = labeled.tau.back();

  const std::size_t n = labeled.size();
  auto full_mse = [&](MlpModel& m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = m.predict_failure(labeled.tau[i]) - labeled.label[i];
      acc += e * e;
    }
    return acc / static_cast<double>(n);
  };

  const double initial_mse = full_mse(model);

  // Momentum buffers, one per parameter block.
  auto zeros_like = [](const std::vector<double>& v) { return std::vector<double>(v.size(), 0.0); };
  std::vector<double> vw1 = zeros_like(model.w1_), vb1 = zeros_like(model.b1_);
  std::vector<double> vw2 = zeros_like(model.w2_), vb2 = zeros_like(model.b2_);
  std::vector<double> vw3 = zeros_like(model.w3_), vb3 = zeros_like(model.b3_);

  Gradients g{zeros_like(model.w1_), zeros_like(model.b1_), zeros_like(model.w2_),
              zeros_like(model.b2_), zeros_like(model.w3_), zeros_like(model.b3_)};

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  MlpModel best = model;
  double best_mse = initial_mse;
  int wait = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with the dedicated engine keeps the pass order reproducible.
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle_rng() % (i + 1));
      std::swap(idx[i], idx[j]);
    }
    const double step = cfg.step_size / (1.0 + cfg.step_decay * epoch);

    double epoch_sse = 0.0;
    for (std::size_t pos = 0; pos < n; pos += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(pos + static_cast<std::size_t>(cfg.batch_size), n);
      const auto bsz = static_cast<double>(end - pos);
      for (auto& block : {&g.w1, &g.b1, &g.w2, &g.b2, &g.w3, &g.b3}) {
        std::fill(block->begin(), block->end(), 0.0);
      }
      for (std::size_t p = pos; p < end; ++p) {
        epoch_sse += trainer.accumulate(labeled.tau[idx[p]], labeled.label[idx[p]], g);
      }
      auto update = [&](std::vector<double>& w, std::vector<double>& vel, const std::vector<double>& grad) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          vel[i] = cfg.momentum * vel[i] - step * grad[i] / bsz;
          w[i] += vel[i];
        }
      };
      update(model.w1_, vw1, g.w1);
      update(model.b1_, vb1, g.b1);
      update(model.w2_, vw2, g.w2);
      update(model.b2_, vb2, g.b2);
      update(model.w3_, vw3, g.w3);
      update(model.b3_, vb3, g.b3);
    }

    const double epoch_mse = epoch_sse / static_cast<double>(n);
    if (!std::isfinite(epoch_mse)) {
      throw NumericalError("train_mlp: loss diverged at epoch " + std::to_string(epoch) +
                           " (step_size=" + std::to_string(cfg.step_size) + ")");
    }
    if (epoch_mse < best_mse - 1e-12) {
      best_mse = epoch_mse;
      best = model;
      wait = 0;
    } else if (++wait > cfg.patience) {
      break;
    }
  }

  if (full_mse(best) > initial_mse) {
    // Training never improved on the initialization; keep the better point.
    MlpModel init(labeled.order, labeled.feature_time, labeled.observation_time, cfg.seed);
    MlpTrainer t2(init);
    t2.set_normalizers(labeled);
    init.max_training_tau_ = labeled.tau.back();
    return init;
  }
  return best;
}

namespace {

void write_block(std::ostream& os, const char* name, const std::vector<double>& v) {
  os << name << '=';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  os << '\n';
}

std::vector<double> parse_block(const std::string& line, const std::string& name,
                                std::size_t expected) {
  const std::string prefix = name + "=";
  if (line.rfind(prefix, 0) != 0) throw DataError("mlp model: expected " + name + " line");
  std::istringstream is(line.substr(prefix.size()));
  std::vector<double> v;
  double x;
  while (is >> x) v.push_back(x);
  if (v.size() != expected) throw DataError("mlp model: wrong element count in " + name);
  return v;
}

}  // namespace

std::string MlpModel::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "# survlink mlpmodel v1\n";
  os << "order=" << order_ << '\n';
  os << "feature_time=" << (feature_time_ == FeatureTime::remaining ? "remaining" : "absolute") << '\n';
  os << "observation_time=" << observation_time_ << '\n';
  os << "max_training_tau=" << max_training_tau_ << '\n';
  write_block(os, "feat_mean", feat_mean_);
  write_block(os, "feat_scale", feat_scale_);
  write_block(os, "w1", w1_);
  write_block(os, "b1", b1_);
  write_block(os, "w2", w2_);
  write_block(os, "b2", b2_);
  write_block(os, "w3", w3_);
  write_block(os, "b3", b3_);
  return os.str();
}

MlpModel MlpModel::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "# survlink mlpmodel v1") {
    throw DataError("mlp model: unknown format version");
  }
  auto next = [&]() {
    if (!std::getline(is, line)) throw DataError("mlp model: truncated file");
    return line;
  };
  auto scalar = [&](const std::string& name) {
    const std::string l = next();
    const std::string prefix = name + "=";
    if (l.rfind(prefix, 0) != 0) throw DataError("mlp model: expected " + name + " line");
    return l.substr(prefix.size());
  };

  MlpModel m;
  m.order_ = std::stoi(scalar("order"));
  if (m.order_ < 1) throw DataError("mlp model: bad order");
  const std::string ft = scalar("feature_time");
  if (ft == "remaining") {
    m.feature_time_ = FeatureTime::remaining;
  } else if (ft == "absolute") {
    m.feature_time_ = FeatureTime::absolute;
  } else {
    throw DataError("mlp model: bad feature_time");
  }
  m.observation_time_ = std::stod(scalar("observation_time"));
  m.max_training_tau_ = std::stod(scalar("max_training_tau"));
  const auto order = static_cast<std::size_t>(m.order_);
  m.feat_mean_ = parse_block(next(), "feat_mean", order);
  m.feat_scale_ = parse_block(next(), "feat_scale", order);
  m.w1_ = parse_block(next(), "w1", kHidden1 * order);
  m.b1_ = parse_block(next(), "b1", kHidden1);
  m.w2_ = parse_block(next(), "w2", static_cast<std::size_t>(kHidden2) * kHidden1);
  m.b2_ = parse_block(next(), "b2", kHidden2);
  m.w3_ = parse_block(next(), "w3", kHidden2);
  m.b3_ = parse_block(next(), "b3", 1);
  return m;
}

MonotoneFailureCurve::MonotoneFailureCurve(const MlpModel& model, double grid_step,
                                           double horizon)
    : step_(grid_step), horizon_(horizon) {
  if (!(grid_step > 0.0) || !(horizon > 0.0) || horizon < grid_step) {
    throw ConfigError("MonotoneFailureCurve: need 0 < grid_step <= horizon");
  }
  const auto count = static_cast<std::size_t>(std::ceil(horizon / grid_step)) + 1;
  values_.reserve(count);
  double running = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    running = std::max(running, model.predict_failure(static_cast<double>(k) * step_));
    values_.push_back(running);
  }
}

double MonotoneFailureCurve::operator()(double tau) const {
  if (tau <= 0.0) return values_.front();
  const double pos = tau / step_;
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= values_.size()) return values_.back();
  const double frac = pos - static_cast<double>(k);
  return values_[k] + frac * (values_[k + 1] - values_[k]);
}

FailureCurve MonotoneFailureCurve::as_failure_curve() const {
  return FailureCurve([c = *this](double tau) { return c(tau); });
}

MlpTauStar tau_star_mlp(const MlpModel& model, double epsilon, double grid_step,
                        double horizon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("tau_star_mlp: epsilon must lie in (0,1)");
  const double span = std::max(model.max_training_tau(), 1e-9);
  if (horizon <= 0.0) horizon = 2.0 * span;
  if (grid_step <= 0.0) grid_step = horizon / 20000.0;
  MonotoneFailureCurve curve(model, grid_step, horizon);

  if (curve(0.0) > epsilon) return {0.0, false, true};

  const auto count = static_cast<std::size_t>(std::ceil(horizon / grid_step)) + 1;
  double last_ok = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double tau = static_cast<double>(k) * grid_step;
    if (curve(tau) > epsilon) return {last_ok, false, false};
    last_ok = tau;
  }
  return {last_ok, true, false};
}

MomentResult moments_numeric(const FailureCurve& curve, int N, double delta, double horizon) {
  if (N < 1) throw ConfigError("moments_numeric: N must be a positive integer");
  if (!(delta > 0.0) || !(horizon > delta)) throw ConfigError("moments_numeric: need 0 < delta < horizon");

  const auto count = static_cast<std::size_t>(std::floor(horizon / delta));
  long double acc = 0.0L;
  for (std::size_t k = 1; k <= count; ++k) {
    const double tau = static_cast<double>(k) * delta;
    const double survival = 1.0 - curve(tau);
    acc += static_cast<long double>(N) * std::pow(tau, N - 1) * survival * delta;
  }
  MomentResult out;
  out.value = static_cast<double>(acc);
  out.tail_ok = curve(static_cast<double>(count) * delta) > 1.0 - 1e-3;
  return out;
}

}  // namespace survlink
