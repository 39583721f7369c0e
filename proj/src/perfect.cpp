#include "psim/perfect.hpp"

#include <stdexcept>

#include "psim/coupling.hpp"

namespace psim {

namespace {

// Tail blocks live beside the matrix blocks in key space: the pair index is
// tagged into the high half of block_index, the low half counts K+1, K+2, ...
std::uint64_t tail_block_index(int pair_row, int num_chains, long extra) {
  return (static_cast<std::uint64_t>(pair_row) << 32) |
         static_cast<std::uint64_t>(num_chains + extra);
}

struct TailRequest {
  int pair_row = 0;       // pair (j, j+1); j = K is the wrap pair (K, row 1)
  ChainState x_final;     // upper row after its K blocks
  ChainState y_prefinal;  // lower row after K-1 blocks
};

// Shared bookkeeping plumbing for both engine variants.
struct EngineFrame {
  const Kernel& kernel;
  const RunConfig& config;
  std::uint64_t master_seed;
  SampleSet out;
  std::vector<int> a;    // coalescence marks, 1-based; 0 = active
  std::vector<int> btc;  // blocks until a row first joined an earlier row
  std::vector<TailRequest> tails;

  EngineFrame(const Kernel& k, const RunConfig& c, std::uint64_t seed, std::uint64_t set_index)
      : kernel(k), config(c), master_seed(seed) {
    out.set_index = set_index;
    out.k_effective = static_cast<long>(c.num_chains) * c.block_len;
    a.assign(c.num_chains + 1, 0);
    btc.assign(c.num_chains + 1, 0);
  }

  StreamKey block_key(std::uint64_t block_index) const {
    return {master_seed, out.set_index, block_index, Substream::mcmc};
  }
  StreamKey start_key(int row) const {
    return {master_seed, out.set_index, static_cast<std::uint64_t>(row), Substream::start};
  }

  void record_coalescence(int row, int blocks_run) {
    if (btc[row] == 0) btc[row] = blocks_run;
  }

  // Runs every queued tail, then assembles points, flags and diagnostics.
  void finish(std::vector<ChainState> final_values, std::vector<ChainState> row1, bool maximal) {
    const int num_chains = config.num_chains;
    const int block_len = config.block_len;
    out.points.resize(num_chains);
    for (int i = 1; i <= num_chains; ++i)
      out.points[i - 1].entries.push_back({std::move(final_values[i]), +1});
    out.row1_cache = std::move(row1);

    out.checks_failed = static_cast<int>(tails.size());
    for (TailRequest& t : tails) {
      CoupledTrace pair;
      pair.store_from = num_chains;
      pair.lag = block_len;
      pair.last_step = num_chains;
      pair.x_head = t.x_final;
      pair.y_head = std::move(t.y_prefinal);
      pair.xs.push_back(std::move(t.x_final));
      const int pair_row = t.pair_row;
      TailBlockSource source = [this, pair_row](long extra) {
        return rand_block(block_key(tail_block_index(pair_row, config.num_chains, extra)),
                          config.block_len,
                          config.iters_per_coupling, kernel.dimension(), kernel.block_layout());
      };
      auto str = extend_tail(kernel, pair, config, source, maximal);
      if (str) {
        if (str->nu() > 1) out.error = true;
        out.points[pair_row - 1] = std::move(*str);
        // The lower row of a non-wrap pair ran K-1 matrix blocks before the
        // extension; row K of the wrap pair ran all K.
        const long extra = *pair.tau - num_chains;
        if (pair_row < num_chains)
          record_coalescence(pair_row + 1, static_cast<int>(num_chains - 1 + extra));
        else
          record_coalescence(num_chains, static_cast<int>(num_chains + extra));
      } else {
        out.unresolved = true;
        out.error = true;
      }
    }

    out.blocks_to_coalesce.assign(btc.begin() + 2, btc.end());
    out.final_marks.assign(a.begin() + 1, a.end());
  }
};

// K = 1 has no matrix: the single chain runs one block and pairs with an
// independently started partner that is driven entirely by tail blocks.
SampleSet run_single_chain_set(const Kernel& kernel, const RunConfig& config,
                               std::uint64_t master_seed, std::uint64_t set_index, bool maximal) {
  EngineFrame frame(kernel, config, master_seed, set_index);
  ChainState x = kernel.start(frame.start_key(1));
  ChainState y = kernel.start(frame.start_key(2));
  const RandomBlock block = rand_block(frame.block_key(1), config.block_len,
                                       maximal ? config.iters_per_coupling : config.block_len,
                                       kernel.dimension(), kernel.block_layout());
  if (maximal)
    advance_free_maximal(kernel, x, block, config.radius);
  else
    x = kernel.mcmc(std::move(x), block, 0, config.block_len);
  frame.out.cells_evaluated = 1;
  frame.tails.push_back({1, x, std::move(y)});
  std::vector<ChainState> final_values(2);
  final_values[1] = x;
  std::vector<ChainState> row1{x};
  frame.finish(std::move(final_values), std::move(row1), maximal);
  return frame.out;
}

}  // namespace

void RunConfig::validate() const {
  if (num_chains < 1) throw std::invalid_argument("config: K must be >= 1");
  if (block_len < 1) throw std::invalid_argument("config: B must be >= 1");
  if (iters_per_coupling < 1 || block_len % iters_per_coupling != 0)
    throw std::invalid_argument("config: M must be a positive divisor of B");
  if (!(radius > 0.0)) throw std::invalid_argument("config: r must be positive");
  if (!(target_noncoal > 0.0) || !(target_noncoal < 1.0))
    throw std::invalid_argument("config: P must lie in (0, 1)");
  if (tail_cap < 0) throw std::invalid_argument("config: tail cap must be >= 0");
}

SampleSet run_sample_set(const Kernel& kernel, const RunConfig& config, std::uint64_t master_seed,
                         std::uint64_t set_index) {
  config.validate();
  const int K = config.num_chains;
  const int B = config.block_len;
  const Metric metric = kernel.metric();
  if (K == 1) return run_single_chain_set(kernel, config, master_seed, set_index, false);

  EngineFrame frame(kernel, config, master_seed, set_index);
  std::vector<int>& a = frame.a;
  // One coupling triple per block keeps the bundle small; the plain engine
  // never consumes it.
  auto column_block = [&](std::uint64_t index) {
    return rand_block(frame.block_key(index), B, B, kernel.dimension(), kernel.block_layout());
  };

  std::vector<ChainState> q(K + 1);   // current column values, 1-based rows
  std::vector<ChainState> q1(K + 1);  // row 1 at the end of each column
  for (int i = 1; i <= K; ++i) q[i] = kernel.start(frame.start_key(i));

  // Upper triangle: rows 1..j live in column j; each row starts on its
  // diagonal cell.
  for (int j = 1; j <= K; ++j) {
    const RandomBlock block = column_block(static_cast<std::uint64_t>(j));
    for (int i = 1; i <= j; ++i) {
      if (a[i] > 0) {
        q[i] = q[a[i]];
        continue;
      }
      q[i] = kernel.mcmc(std::move(q[i]), block, 0, B);
      ++frame.out.cells_evaluated;
      if (i == 1) {
        q1[j] = q[1];
        continue;
      }
      const int m = static_cast<int>(min_ind(q, 1, i, metric));
      if (states_equal(q[i], q[m])) {
        a[i] = m;
        frame.record_coalescence(i, j - i + 1);
      }
    }
  }

  // Lower triangle: regenerate each column's block from its key and run the
  // wrapped-around rows against the stored row 1.
  for (int j = 1; j <= K - 1; ++j) {
    if (a[j + 1] != j) frame.tails.push_back({j, q[j], q[j + 1]});
    a[j + 1] = a[j];
    for (int x = 1; x <= K; ++x)
      if (a[x] == j) a[x] = j + 1;
    q[1] = q1[j];
    const RandomBlock block = column_block(static_cast<std::uint64_t>(j));
    for (int i = j + 1; i <= K; ++i) {
      if (a[i] > 0) {
        q[i] = q[a[i]];
        continue;
      }
      q[i] = kernel.mcmc(std::move(q[i]), block, 0, B);
      ++frame.out.cells_evaluated;
      const int m = (i == j + 1) ? 1 : static_cast<int>(min_ind(q, j + 1, i, metric));
      if (states_equal(q[i], q[m])) {
        a[i] = m;
        frame.record_coalescence(i, (K - i + 1) + j);
      }
    }
  }
  if (a[K] != 1) frame.tails.push_back({K, q[K], q1[K - 1]});
  q[1] = q1[K];

  frame.finish(std::move(q), {q1.begin() + 1, q1.end()}, false);
  return frame.out;
}

SampleSet run_sample_set_maximal(const Kernel& kernel, const RunConfig& config,
                                 std::uint64_t master_seed, std::uint64_t set_index) {
  config.validate();
  if (!kernel.supports_maximal())
    throw std::invalid_argument("run_sample_set_maximal: kernel has no likelihood for coupling");
  const int K = config.num_chains;
  const int B = config.block_len;
  const int M = config.iters_per_coupling;
  const int J = B / M;  // coupling steps per block
  const double r = config.radius;
  const Metric metric = kernel.metric();
  const auto u = [&kernel](const ChainState& z) { return kernel.neg_log_lik(z); };
  if (K == 1) return run_single_chain_set(kernel, config, master_seed, set_index, true);

  EngineFrame frame(kernel, config, master_seed, set_index);
  std::vector<int>& a = frame.a;
  auto column_block = [&](std::uint64_t index) {
    return rand_block(frame.block_key(index), B, M, kernel.dimension(), kernel.block_layout());
  };

  std::vector<ChainState> q(K + 1);      // post-M-H values
  std::vector<ChainState> q_pre(K + 1);  // pre-jump values (min_ind operates on these)
  std::vector<ChainState> q_star(K + 1); // proposed destinations
  // Row 1 is stored per (column, coupling step) in all three versions, so the
  // lower triangle can replay it and rows coupled to it see live geometry.
  std::vector<std::vector<ChainState>> row1_pre(K + 1, std::vector<ChainState>(J));
  std::vector<std::vector<ChainState>> row1_star(K + 1, std::vector<ChainState>(J));
  std::vector<std::vector<ChainState>> row1_post(K + 1, std::vector<ChainState>(J));

  for (int i = 1; i <= K; ++i) q[i] = kernel.start(frame.start_key(i));

  // Upper triangle.
  for (int j = 1; j <= K; ++j) {
    const RandomBlock block = column_block(static_cast<std::uint64_t>(j));
    for (int j1 = 0; j1 < J; ++j1) {
      for (int i = 1; i <= j; ++i) {
        if (a[i] > 0) {
          // Coalesced rows mirror their live partner in all three versions so
          // later rows couple against current geometry, never a stale copy.
          q_pre[i] = q_pre[a[i]];
          q_star[i] = q_star[a[i]];
          q[i] = q[a[i]];
          continue;
        }
        if (j1 == 0) ++frame.out.cells_evaluated;
        q_pre[i] = kernel.mcmc(std::move(q[i]), block, j1 * M, M);
        if (i == 1) {
          q_star[1] = jump(q_pre[1], r, block.dir_at(j1), block.mag_at(j1));
          q[1] = mh_test(u, q_pre[1], q_star[1], block.mh_at(j1));
          row1_pre[j][j1] = q_pre[1];
          row1_star[j][j1] = q_star[1];
          row1_post[j][j1] = q[1];
        } else {
          const int sel = static_cast<int>(min_ind(q_pre, 1, i, metric));
          q_star[i] = max_couple(q_pre[sel], q_star[sel], q_pre[i], r);
          q[i] = mh_test(u, q_pre[i], q_star[i], block.mh_at(j1));
          if (states_equal(q[i], q[sel])) {
            int m = sel;
            if (a[m] > 0) m = a[m];  // reset to the earliest row of the cluster
            a[i] = m;
            for (int x = 1; x <= K; ++x)
              if (a[x] == i) a[x] = m;
            frame.record_coalescence(i, j - i + 1);
          }
        }
      }
    }
  }

  // Lower triangle.
  for (int j = 1; j <= K - 1; ++j) {
    if (a[j + 1] != j) frame.tails.push_back({j, q[j], q[j + 1]});
    a[j + 1] = a[j];
    for (int x = 1; x <= K; ++x)
      if (a[x] == j) a[x] = j + 1;
    const RandomBlock block = column_block(static_cast<std::uint64_t>(j));
    for (int j1 = 0; j1 < J; ++j1) {
      q_pre[1] = row1_pre[j][j1];
      q_star[1] = row1_star[j][j1];
      q[1] = row1_post[j][j1];
      for (int i = j + 1; i <= K; ++i) {
        if (a[i] > 0) {
          q_pre[i] = q_pre[a[i]];
          q_star[i] = q_star[a[i]];
          q[i] = q[a[i]];
          continue;
        }
        if (j1 == 0) ++frame.out.cells_evaluated;
        q_pre[i] = kernel.mcmc(std::move(q[i]), block, j1 * M, M);
        const int sel =
            (i == j + 1) ? 1 : static_cast<int>(min_ind(q_pre, j + 1, i, metric));
        q_star[i] = max_couple(q_pre[sel], q_star[sel], q_pre[i], r);
        q[i] = mh_test(u, q_pre[i], q_star[i], block.mh_at(j1));
        if (states_equal(q[i], q[sel])) {
          // Mark-1 rows stay member-pointed: redirecting them to row 1 would
          // trip the later pair checks, which expect the mark to reach
          // exactly j at iteration j.
          int m = sel;
          if (a[m] > 1) m = a[m];
          a[i] = m;
          if (m > 1)
            for (int x = 1; x <= K; ++x)
              if (a[x] == i) a[x] = m;
          frame.record_coalescence(i, (K - i + 1) + j);
        }
      }
    }
  }
  if (a[K] != 1) frame.tails.push_back({K, q[K], row1_post[K - 1][J - 1]});
  q[1] = row1_post[K][J - 1];

  std::vector<ChainState> row1(K);
  for (int j = 1; j <= K; ++j) row1[j - 1] = row1_post[j][J - 1];
  frame.finish(std::move(q), std::move(row1), true);
  return frame.out;
}

std::optional<StringSample> extend_tail(const Kernel& kernel, CoupledTrace& pair,
                                        const RunConfig& config, const TailBlockSource& next_block,
                                        bool maximal) {
  // The matrix only compares marks, so re-check the raw states once; this
  // also covers the degenerate K = 1 pair whose partners may start equal.
  if (!pair.tau && states_equal(pair.x_head, pair.y_head)) pair.tau = pair.last_step;

  long extra = 0;
  while (!pair.tau && extra < config.effective_tail_cap()) {
    ++extra;
    const RandomBlock block = next_block(extra);
    if (maximal) {
      advance_pair_maximal(kernel, pair.x_head, pair.y_head, block, config.radius);
    } else {
      pair.x_head = kernel.mcmc(std::move(pair.x_head), block, 0, block.iters);
      pair.y_head = kernel.mcmc(std::move(pair.y_head), block, 0, block.iters);
    }
    ++pair.last_step;
    pair.xs.push_back(pair.x_head);
    pair.ys.push_back(pair.y_head);
    if (states_equal(pair.x_head, pair.y_head)) pair.tau = pair.last_step;
  }
  if (!pair.tau) {
    pair.capped = true;
    return std::nullopt;
  }
  return sample_string(pair, pair.store_from);
}

}  // namespace psim
