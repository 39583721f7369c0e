#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "psim/kernel.hpp"

namespace psim {

/// One entry of a relaxed perfect sample: a value with weight +1, or a hole
/// with weight -1.
struct StringEntry {
  ChainState value;
  int weight = 1;
};

/// Ordered list of (value, weight) pairs standing in for one perfect sample
/// point. Weights alternate starting at +1 and sum to 1; length 1 in the
/// common case where the pair coalesced within the burn-in horizon.
struct StringSample {
  std::vector<StringEntry> entries;

  int nu() const { return static_cast<int>(entries.size()); }
  int weight_sum() const {
    int acc = 0;
    for (const auto& e : entries) acc += e.weight;
    return acc;
  }
};

/// Weighted sum over string entries in entry order. This is the conditional
/// expectation of g given the pair, and agrees bit-for-bit with
/// unbiased_estimate on the trace the string came from.
template <class G>
double weighted_sum(const StringSample& s, G&& g) {
  double acc = 0.0;
  for (const auto& e : s.entries) {
    if (e.weight >= 0)
      acc += g(e.value);
    else
      acc -= g(e.value);
  }
  return acc;
}

/// Two lag-coupled chains observed at lag-unit granularity: one "step" is
/// `lag` kernel iterations driven by one block of draws, and Y consumes the
/// block X consumed one step earlier. States are stored from step
/// `store_from` (the burn-in k) onward; earlier states are discarded on the
/// fly. tau is the first step at which X_tau equals Y_(tau-1) byte-exactly;
/// the equality persists for every later step.
struct CoupledTrace {
  std::vector<ChainState> xs;  // X at steps store_from .. last_step
  std::vector<ChainState> ys;  // Y at steps store_from .. last_step-1
  long store_from = 0;
  int lag = 1;
  std::optional<long> tau;
  long last_step = 0;
  bool capped = false;  // step cap hit before coalescence

  ChainState x_head;  // X at last_step
  ChainState y_head;  // Y at last_step - 1

  const ChainState& x_at(long step) const {
    if (step < store_from || step > last_step) throw std::out_of_range("trace: X step not stored");
    return xs[static_cast<std::size_t>(step - store_from)];
  }
  const ChainState& y_at(long step) const {
    if (step < store_from || step >= store_from + static_cast<long>(ys.size()))
      throw std::out_of_range("trace: Y step not stored");
    return ys[static_cast<std::size_t>(step - store_from)];
  }
};

/// Runs a coupled pair from independent starts until coalescence (and at
/// least through step run_to, default burn_in), or until `cap` steps.
/// Randomness is keyed by (master_seed, pair_index): step t consumes the
/// block with block_index t, starts use the start substream with rows 1 and 2.
/// A capped trace comes back with tau unset and capped = true; the caller
/// decides how to report it.
CoupledTrace run_coupled(const Kernel& kernel, long burn_in, int lag, std::uint64_t master_seed,
                         std::uint64_t pair_index, long cap = 10000, long run_to = -1,
                         bool maximal = false, double radius = 0.0);

/// The unbiased estimator G = g(X_k) + sum_{t=k+1}^{tau-1} {g(X_t) - g(Y_{t-1})}
/// in the trace's lag units, accumulated in string-entry order so it agrees
/// exactly with the weighted sum over sample_string(trace, k).
/// Throws if the trace never coalesced.
template <class G>
double unbiased_estimate(const CoupledTrace& trace, G&& g, long k) {
  if (!trace.tau) throw std::runtime_error("unbiased_estimate: pair never coalesced (capped)");
  const long tau = *trace.tau;
  double acc = g(trace.x_at(k));
  for (long t = k; t < tau - 1; ++t) {
    acc -= g(trace.y_at(t));
    acc += g(trace.x_at(t + 1));
  }
  return acc;
}

/// The relaxed perfect sample for burn-in k: ((X_k,+1)) when tau <= k+1, else
/// ((X_k,+1),(Y_k,-1),(X_{k+1},+1),...,(X_{tau-1},+1)) with
/// nu = 2(tau - k) - 1 entries. Throws if the trace never coalesced.
StringSample sample_string(const CoupledTrace& trace, long k);

}  // namespace psim
