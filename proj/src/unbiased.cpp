#include "psim/unbiased.hpp"

#include "psim/coupling.hpp"

namespace psim {

CoupledTrace run_coupled(const Kernel& kernel, long burn_in, int lag, std::uint64_t master_seed,
                         std::uint64_t pair_index, long cap, long run_to, bool maximal,
                         double radius) {
  if (burn_in < 0) throw std::invalid_argument("run_coupled: burn-in must be >= 0");
  if (lag < 1) throw std::invalid_argument("run_coupled: lag must be >= 1");
  if (cap <= burn_in + 1) throw std::invalid_argument("run_coupled: cap must exceed burn_in + 1");
  if (run_to < burn_in) run_to = burn_in;

  const int d = kernel.dimension();
  const BlockLayout layout = kernel.block_layout();

  CoupledTrace trace;
  trace.store_from = burn_in;
  trace.lag = lag;
  trace.x_head = kernel.start({master_seed, pair_index, 1, Substream::start});
  trace.y_head = kernel.start({master_seed, pair_index, 2, Substream::start});
  if (burn_in == 0) {
    trace.xs.push_back(trace.x_head);
    trace.ys.push_back(trace.y_head);
  }

  long t = 0;
  while (true) {
    if (trace.tau && trace.last_step >= run_to) break;
    if (!trace.tau && t >= cap) {
      trace.capped = true;
      break;
    }
    ++t;
    const RandomBlock block =
        rand_block({master_seed, pair_index, static_cast<std::uint64_t>(t), Substream::mcmc}, lag,
                   lag, d, layout);
    if (trace.tau) {
      // Already coalesced: Y mirrors X one step behind, no kernel work needed.
      if (maximal)
        advance_free_maximal(kernel, trace.x_head, block, radius);
      else
        trace.x_head = kernel.mcmc(std::move(trace.x_head), block, 0, lag);
      trace.y_head = trace.x_head;
    } else if (t == 1) {
      // Y does not consume the first block: its draws are X's offset by one step.
      if (maximal)
        advance_free_maximal(kernel, trace.x_head, block, radius);
      else
        trace.x_head = kernel.mcmc(std::move(trace.x_head), block, 0, lag);
    } else {
      if (maximal) {
        advance_pair_maximal(kernel, trace.x_head, trace.y_head, block, radius);
      } else {
        trace.x_head = kernel.mcmc(std::move(trace.x_head), block, 0, lag);
        trace.y_head = kernel.mcmc(std::move(trace.y_head), block, 0, lag);
      }
    }
    trace.last_step = t;
    if (t >= trace.store_from) trace.xs.push_back(trace.x_head);
    if (t >= 2 && t - 1 >= trace.store_from) trace.ys.push_back(trace.y_head);
    if (!trace.tau && states_equal(trace.x_head, trace.y_head)) trace.tau = t;
  }
  return trace;
}

StringSample sample_string(const CoupledTrace& trace, long k) {
  if (!trace.tau) throw std::runtime_error("sample_string: pair never coalesced (capped)");
  const long tau = *trace.tau;
  StringSample s;
  if (tau <= k + 1) {
    s.entries.push_back({trace.x_at(k), +1});
    return s;
  }
  s.entries.reserve(static_cast<std::size_t>(2 * (tau - k) - 1));
  for (long t = k; t < tau - 1; ++t) {
    s.entries.push_back({trace.x_at(t), +1});
    s.entries.push_back({trace.y_at(t), -1});
  }
  s.entries.push_back({trace.x_at(tau - 1), +1});
  return s;
}

}  // namespace psim
