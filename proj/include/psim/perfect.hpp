#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "psim/unbiased.hpp"

namespace psim {

/// Parameters of one sample-set run.
struct RunConfig {
  int num_chains = 20;         // K
  int block_len = 25;          // B
  int iters_per_coupling = 1;  // M, divisor of B (maximal engine only)
  double radius = 3.0;         // coupling jump radius r
  double target_noncoal = 0.1; // P aimed for when B was calibrated
  long tail_cap = 0;           // extra blocks allowed past the matrix; 0 selects 10*K

  long effective_tail_cap() const { return tail_cap > 0 ? tail_cap : 10L * num_chains; }
  void validate() const;
};

/// K perfect sample points with their coalescence bookkeeping.
///
/// Point j is the value of row j at its final cell. Every point is a
/// single-entry string unless its pair overran the first extra block, in
/// which case the string carries the holes and `error` is set. `error` stays
/// false exactly when every adjacent pair coalesced within the matrix or its
/// first extra block (chain K pairing with the replayed row 1).
struct SampleSet {
  std::vector<StringSample> points;     // K entries, chain order
  std::vector<int> blocks_to_coalesce;  // rows 2..K: blocks from a row's first
                                        // cell until it first joined an earlier
                                        // row (0 = never resolved)
  std::vector<int> final_marks;         // coalescence record a[1..K] at exit
  std::vector<ChainState> row1_cache;   // row 1 at the end of each column
  bool error = false;
  int checks_failed = 0;  // coalescence checks that required tail extension
  bool unresolved = false;  // some tail hit tail_cap
  std::uint64_t set_index = 0;
  long k_effective = 0;      // K * B
  long cells_evaluated = 0;  // matrix cells that ran the kernel

  const ChainState& point_value(int chain) const { return points[chain].entries.front().value; }
};

/// One sample set under plain column coupling (common random numbers only).
SampleSet run_sample_set(const Kernel& kernel, const RunConfig& config, std::uint64_t master_seed,
                         std::uint64_t set_index);

/// One sample set with a maximally coupled Metropolis-Hastings jump after
/// every M internal iterations. Row 1 jumps freely; each later row couples
/// with the closest eligible earlier row, chosen on pre-jump values.
SampleSet run_sample_set_maximal(const Kernel& kernel, const RunConfig& config,
                                 std::uint64_t master_seed, std::uint64_t set_index);

/// Supplies the fresh block for extension step e = 1, 2, ...
using TailBlockSource = std::function<RandomBlock(long)>;

/// Continues a non-coalesced adjacent pair past the matrix with fresh blocks
/// until block-granularity coalescence or the tail cap. The trace enters with
/// x_head = X after K blocks, y_head = Y after K-1 blocks and store_from = K;
/// on success the string of Eq.-(5) shape at block granularity is returned
/// (single-entry when the first extra block suffices). Returns nullopt and
/// marks the trace capped when the tail cap is hit.
std::optional<StringSample> extend_tail(const Kernel& kernel, CoupledTrace& pair,
                                        const RunConfig& config, const TailBlockSource& next_block,
                                        bool maximal);

}  // namespace psim
