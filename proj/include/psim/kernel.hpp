#pragma once

#include <cstring>
#include <vector>

#include "psim/rngstreams.hpp"

namespace psim {

/// One point of a process: a d-vector for continuous targets, a single slot
/// holding the state label for discrete ones.
using ChainState = std::vector<double>;

/// Byte-level equality. Coalesced chains are literal copies of one another,
/// so anything weaker would also accept near-misses that later diverge.
inline bool states_equal(const ChainState& a, const ChainState& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

enum class Metric {
  euclidean,  // continuous state spaces
  zero_one,   // discrete unordered states: 0 when equal, 1 otherwise
};

/// Squared distance under the metric (zero_one returns 0 or 1 directly).
double state_distance_sq(const ChainState& a, const ChainState& b, Metric metric);

/// Index in [i1, i2) of the point closest to points[i2] under the metric.
/// Ties go to the smallest index. Throws std::invalid_argument on an empty
/// candidate range.
std::size_t min_ind(const std::vector<ChainState>& points, std::size_t i1, std::size_t i2,
                    Metric metric);

/// The abstraction every target process implements: start-point generation
/// and coupled MCMC iterations driven purely by a RandomBlock.
class Kernel {
 public:
  virtual ~Kernel() = default;

  virtual int dimension() const = 0;
  virtual Metric metric() const = 0;
  /// Per-iteration draw layout this kernel consumes from a block.
  virtual BlockLayout block_layout() const = 0;

  /// One independent draw from the prescribed starting distribution.
  virtual ChainState start(const StreamKey& key) const = 0;

  /// State after n iterations from x, consuming block draws
  /// [first_iter, first_iter + n). Pure in (x, block, first_iter, n): two
  /// chains given the same draws at the same positions evolve identically.
  /// Throws std::invalid_argument if the block has fewer draws.
  virtual ChainState mcmc(ChainState x, const RandomBlock& block, int first_iter, int n) const = 0;

  ChainState mcmc(ChainState x, const RandomBlock& block, int n) const {
    return mcmc(std::move(x), block, 0, n);
  }

  /// Negative log-likelihood, used by the maximal-coupling M-H update.
  virtual double neg_log_lik(const ChainState& x) const;
  virtual bool supports_maximal() const { return false; }
};

}  // namespace psim
