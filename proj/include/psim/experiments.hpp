#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "psim/perfect.hpp"
#include "psim/stats.hpp"
#include "psim/targets.hpp"

namespace psim {

/// Runs fn(i) for i in [0, n) on `jobs` worker threads. Results land in a
/// vector indexed by i, so the merged output is identical for any job count;
/// all randomness is keyed by i inside fn.
template <class T, class Fn>
std::vector<T> parallel_map_indexed(long n, int jobs, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(n));
  if (jobs <= 1) {
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n && !failed.load(); i = next.fetch_add(1)) {
        try {
          out[static_cast<std::size_t>(i)] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

enum class OutputFormat { csv, json };

// --- two-state experiment ---------------------------------------------------

struct TwoStateRow {
  long k = 0;
  double unadjusted = 0.0;
  double adjusted = 0.0;
  double prop_nu_gt1 = 0.0;
  double holes_per_sim = 0.0;
  double sd_weight_sum = 0.0;
  double se_adjusted = 0.0;
};

struct TwoStateExperiment {
  std::vector<long> ks;
  long n = 0;           // simulations retained in the statistics
  long capped = 0;      // simulations excluded because the cap was hit
  TwoStateParams params;
  std::uint64_t seed = 0;
  std::vector<TwoStateRow> rows;
  std::vector<long> tau_histogram;  // tau_histogram[t] = # sims with tau == t

  /// Mean holes per simulation at burn-in k, from the tau histogram.
  double holes_at(long k) const;
  /// Empirical P(tau > i).
  double p_tau_gt(long i) const;
};

/// n coupled two-state pairs, estimator statistics for every k in ks.
/// The estimator function g is the indicator of state 1.
TwoStateExperiment run_twostate_experiment(std::vector<long> ks, long n,
                                           const TwoStateParams& params, std::uint64_t seed,
                                           int jobs, long cap = 10000);

// --- normal sample-set experiment -------------------------------------------

struct NormalExperiment {
  NormalParams params;
  RunConfig config;
  long n_sets = 0;
  std::uint64_t seed = 0;
  long n_points = 0;
  double mean_blocks = 0.0;
  int max_blocks = 0;
  double rho = 0.0;
  double rho_se = 0.0;
  std::vector<double> ks_stat;  // per coordinate, pooled over error-free sets
  std::vector<double> ks_p;
  long error_sets = 0;
  long unresolved_sets = 0;
  long checks_failed = 0;
  std::map<int, long> blocks_histogram;
};

NormalExperiment run_normal_experiment(const NormalParams& params, RunConfig config, long n_sets,
                                       std::uint64_t seed, int jobs);

// --- block-length calibration -----------------------------------------------

struct CalibrationRow {
  int block_len = 0;
  double noncoal_fraction = 0.0;
  long n_pairs = 0;
};

struct CalibrationResult {
  std::vector<CalibrationRow> rows;
  double target = 0.0;
  int recommended = 0;     // smallest trial B meeting the target, else the best
  bool target_met = false;
};

/// For each trial block length, runs n_pairs coupled pairs from independent
/// dispersed starts for one block and reports the non-coalescence fraction.
CalibrationResult run_calibration(const Kernel& kernel, const std::vector<int>& trial_blocks,
                                  double target_noncoal, long n_pairs, std::uint64_t seed,
                                  int jobs, bool maximal, double radius);

// --- writers -----------------------------------------------------------------

void write_twostate(const TwoStateExperiment& e, OutputFormat format, std::ostream& os);
void write_normal(const NormalExperiment& e, OutputFormat format, std::ostream& os);
void write_calibration(const CalibrationResult& e, OutputFormat format, std::ostream& os);

/// Hole-decay curve (mean holes per simulation against burn-in k) as a small
/// standalone SVG with a log-scale y axis.
void write_hole_decay_svg(const TwoStateExperiment& e, std::ostream& os);

}  // namespace psim
