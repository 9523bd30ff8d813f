#include "survlink/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "survlink/errors.hpp"
#include "survlink/survival.hpp"

namespace survlink {

Partition partition_test_set(const SampleSet& test, double epsilon) {
  if (test.empty()) throw InsufficientDataError("partition_test_set: empty test set");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("partition_test_set: epsilon must lie in (0,1]");

  const std::size_t n = test.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return test[a] < test[b]; });

  Partition p;
  p.epsilon = epsilon;
  p.positive_count = static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(n)));
  p.positive.assign(n, false);
  for (std::size_t i = 0; i < p.positive_count; ++i) p.positive[order[i]] = true;
  return p;
}

DetectionCounts classify(const SampleSet& test, const Partition& partition, double tau_star) {
  if (partition.positive.size() != test.size()) {
    throw DataError("classify: partition was built from a different test set");
  }
  DetectionCounts c;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const bool predicted_block = test[i] < tau_star;
    if (predicted_block) {
      partition.positive[i] ? ++c.tp : ++c.fp;
    } else if (partition.positive[i]) {
      ++c.fn;
    }
  }
  return c;
}

double f_score(const DetectionCounts& counts) {
  if (counts.tp == 0 && counts.fp == 0 && counts.fn == 0) return 1.0;
  const double denom = static_cast<double>(counts.tp) +
                       0.5 * static_cast<double>(counts.fp + counts.fn);
  return static_cast<double>(counts.tp) / denom;
}

Estimator estimator_from_string(const std::string& name) {
  if (name == "weibull") return Estimator::weibull;
  if (name == "mlp") return Estimator::mlp;
  throw ConfigError("unknown estimator '" + name + "' (expected weibull or mlp)");
}

std::string to_string(Estimator estimator) {
  return estimator == Estimator::weibull ? "weibull" : "mlp";
}

void SweepSpec::validate() const {
  if (estimators.empty()) throw ConfigError("sweep: estimator list empty");
  if (sample_sizes.empty()) throw ConfigError("sweep: sample size list empty");
  if (epsilons.empty()) throw ConfigError("sweep: epsilon list empty");
  if (observation_times_s.empty()) throw ConfigError("sweep: observation time list empty");
  for (double e : epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("sweep: epsilons must lie in (0,1)");
  }
  for (double t : observation_times_s) {
    if (t < 0.0) throw ConfigError("sweep: observation times must be nonnegative");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("sweep: gamma must lie in (0,1)");
  if (!(delta_frac > 0.0)) throw ConfigError("sweep: delta_frac must be positive");
  if (prior_grid_size < 1) throw ConfigError("sweep: prior_grid_size must be positive");
  if (mlp_order < 1) throw ConfigError("sweep: mlp_order must be positive");
  train.validate();
}

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Cell {
  Estimator estimator;
  std::size_t sample_size;
  double t;
  std::size_t row_offset;  // first row of this cell in the output table
};

void fill_error_rows(std::vector<SweepRow>& rows, const Cell& cell, const SweepSpec& spec,
                     const std::string& what) {
  for (std::size_t j = 0; j < spec.epsilons.size(); ++j) {
    SweepRow& r = rows[cell.row_offset + j];
    r.epsilon = spec.epsilons[j];
    r.tau_star_s = kNaN;
    r.f1 = kNaN;
    r.mean_remaining_s = kNaN;
    r.var_remaining_s2 = kNaN;
    r.status = "error: " + what;
  }
}

void run_cell(const SweepSpec& spec, const SampleSet& train, const SampleSet& test,
              const std::vector<Partition>& partitions, const Cell& cell,
              std::vector<SweepRow>& rows) {
  const SampleSet subset = train.head(cell.sample_size);

  if (cell.estimator == Estimator::weibull) {
    const FitReport fit = fit_mle(subset);
    if (!fit.converged) throw NumericalError("weibull fit did not converge");
    const double mean_r = remaining_mean(fit.params_hat, cell.t);
    const double var_r = remaining_variance(fit.params_hat, cell.t);
    for (std::size_t j = 0; j < spec.epsilons.size(); ++j) {
      SweepRow& r = rows[cell.row_offset + j];
      const double eps = spec.epsilons[j];
      r.epsilon = eps;
      r.tau_star_s = tau_star_weibull(fit.params_hat, cell.t, eps);
      r.f1 = f_score(classify(test, partitions[j], r.tau_star_s));
      r.mean_remaining_s = mean_r;
      r.var_remaining_s2 = var_r;
      r.status = "ok";
      if (spec.bands) {
        try {
          const ConfidenceBand band =
              confidence_bounds_tau(subset, fit, cell.t, eps, spec.gamma,
                                    spec.delta_frac * fit.params_hat.k,
                                    spec.prior_grid_size, spec.df_mode);
          r.tau_low_s = band.tau_low;
          r.tau_high_s = band.tau_high;
        } catch (const std::exception& e) {
          r.status = std::string("band_error: ") + e.what();
        }
      }
    }
    return;
  }

  const LabeledSet labeled = build_training_set(subset, cell.t, spec.mlp_order);
  const MlpModel model = train_mlp(labeled, spec.train);
  const double horizon = 2.0 * std::max(model.max_training_tau(), 1e-9);
  const double grid_step = horizon / 20000.0;
  const MonotoneFailureCurve curve(model, grid_step, horizon);
  const FailureCurve fcurve = curve.as_failure_curve();
  const MomentResult m1 = moments_numeric(fcurve, 1, grid_step, horizon);
  const MomentResult m2 = moments_numeric(fcurve, 2, grid_step, horizon);
  for (std::size_t j = 0; j < spec.epsilons.size(); ++j) {
    SweepRow& r = rows[cell.row_offset + j];
    const double eps = spec.epsilons[j];
    r.epsilon = eps;
    const MlpTauStar ts = tau_star_mlp(model, eps, grid_step, horizon);
    r.tau_star_s = ts.tau;
    r.f1 = f_score(classify(test, partitions[j], r.tau_star_s));
    r.mean_remaining_s = m1.value;
    r.var_remaining_s2 = std::max(m2.value - m1.value * m1.value, 0.0);
    r.status = "ok";
    if (ts.saturated) r.status = "saturated";
    if (ts.below_range) r.status = "below_range";
    if (!m1.tail_ok) r.status += "|tail_truncated";
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SampleSet& train,
                                const SampleSet& test) {
  spec.validate();
  if (train.empty()) throw InsufficientDataError("run_sweep: empty training set");
  if (test.empty()) throw InsufficientDataError("run_sweep: empty test set");

  std::vector<Partition> partitions;
  partitions.reserve(spec.epsilons.size());
  for (double eps : spec.epsilons) partitions.push_back(partition_test_set(test, eps));

  std::vector<Cell> cells;
  std::size_t offset = 0;
  for (Estimator est : spec.estimators) {
    for (std::size_t s : spec.sample_sizes) {
      for (double t : spec.observation_times_s) {
        cells.push_back({est, s, t, offset});
        offset += spec.epsilons.size();
      }
    }
  }

  std::vector<SweepRow> rows(offset);
  for (const Cell& cell : cells) {
    for (std::size_t j = 0; j < spec.epsilons.size(); ++j) {
      SweepRow& r = rows[cell.row_offset + j];
      r.estimator = to_string(cell.estimator);
      r.sample_size = cell.sample_size;
      r.observation_time_s = cell.t;
      r.threshold_db = spec.threshold_db;
      r.seed = spec.seed;
      r.tau_low_s = kNaN;
      r.tau_high_s = kNaN;
    }
  }

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      std::min<unsigned>(spec.threads > 0 ? static_cast<unsigned>(spec.threads) : hw,
                         static_cast<unsigned>(cells.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        run_cell(spec, train, test, partitions, cells[i], rows);
      } catch (const std::exception& e) {
        fill_error_rows(rows, cells[i], spec, e.what());
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string sweep_csv_header() {
  return "estimator,S,epsilon,t_s,threshold_db,seed,tau_star_s,f1,tau_low_s,tau_high_s,"
         "mean_remaining_s,var_remaining_s2,status";
}

namespace {

void append_field(std::ostringstream& os, double v) {
  if (std::isnan(v)) {
    os << ',';
  } else {
    os << ',' << v;
  }
}

}  // namespace

std::string sweep_row_csv(const SweepRow& row) {
  std::ostringstream os;
  os.precision(12);
  os << row.estimator << ',' << row.sample_size << ',' << row.epsilon << ','
     << row.observation_time_s << ',' << row.threshold_db << ',' << row.seed;
  append_field(os, row.tau_star_s);
  append_field(os, row.f1);
  append_field(os, row.tau_low_s);
  append_field(os, row.tau_high_s);
  append_field(os, row.mean_remaining_s);
  append_field(os, row.var_remaining_s2);
  os << ',' << row.status;
  return os.str();
}

}  // namespace survlink
