#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace psim {

/// Which draw stream a key addresses. Each block of each sample set owns one
/// stream per substream, so a block can be regenerated from its key alone.
enum class Substream : std::uint64_t {
  mcmc = 1,   // kernel draws, layout defined by the kernel
  dir = 2,    // jump directions: d standard normals per coupling step
  mag = 3,    // jump magnitudes: one uniform(0,1) per coupling step
  mh = 4,     // Metropolis-Hastings acceptance: one uniform(0,1) per step
  start = 5,  // starting points, one sub-key per chain row
};

/// Pure value identifying one reproducible random stream. Equal keys yield
/// bit-identical streams; distinct keys yield independent streams. "Restore
/// seed" in the sample-set algorithm is re-derivation from the same key, not
/// mutation of shared generator state.
struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t set_index = 0;
  std::uint64_t block_index = 0;
  Substream substream = Substream::mcmc;
};

/// xoshiro256++ positioned at the start of a keyed stream.
///
/// The four state words are derived by chaining a SplitMix64-style finalizer
/// over the key fields, so a change to any field changes at least one state
/// word and equal keys reproduce the exact sequence. Handles are single-owner;
/// keys are freely copyable and deriving distinct keys concurrently is safe.
class Stream {
 public:
  explicit Stream(const StreamKey& key);

  std::uint64_t next_u64();
  /// Uniform draw strictly inside (0,1).
  double next_uniform();
  /// Standard normal via the Marsaglia polar transform. The transform is
  /// fixed for the life of the project: changing it would silently break
  /// replay of recorded runs.
  double next_normal();

  void fill_uniform(std::span<double> out);
  void fill_normal(std::span<double> out);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Stream derive_stream(const StreamKey& key) { return Stream(key); }

/// Per-iteration shape of the kernel draws inside a block.
struct BlockLayout {
  int normals_per_iter = 0;
  int uniforms_per_iter = 1;
  int stride() const { return normals_per_iter + uniforms_per_iter; }
};

/// The full bundle of pseudo-random draws for one block: B kernel iterations
/// plus B/M coupling-step triples (direction, magnitude, acceptance). A block
/// regenerated from the same key is byte-for-byte identical.
struct RandomBlock {
  std::vector<double> mcmc;  // iters * layout.stride(), iteration-major, normals first
  std::vector<double> dir;   // steps * dim standard normals
  std::vector<double> mag;   // steps uniforms in (0,1)
  std::vector<double> mh;    // steps uniforms in (0,1)
  int iters = 0;             // B
  int steps = 0;             // B / M
  int dim = 0;               // d
  BlockLayout layout;

  std::span<const double> mcmc_normals(int iter) const {
    return {mcmc.data() + static_cast<std::size_t>(iter) * layout.stride(),
            static_cast<std::size_t>(layout.normals_per_iter)};
  }
  double mcmc_uniform(int iter, int which = 0) const {
    return mcmc[static_cast<std::size_t>(iter) * layout.stride() + layout.normals_per_iter + which];
  }
  std::span<const double> dir_at(int step) const {
    return {dir.data() + static_cast<std::size_t>(step) * dim, static_cast<std::size_t>(dim)};
  }
  double mag_at(int step) const { return mag[step]; }
  double mh_at(int step) const { return mh[step]; }
};

/// Generates the bundle for one block: `iters` kernel iterations with the
/// given per-iteration layout, and iters / iters_per_coupling coupling-step
/// triples with d-vector directions. The key's substream field is ignored;
/// each part of the bundle draws from its own substream of the same
/// (master_seed, set_index, block_index).
///
/// Throws std::invalid_argument if iters_per_coupling does not divide iters.
RandomBlock rand_block(const StreamKey& key, int iters, int iters_per_coupling, int dim,
                       const BlockLayout& layout = BlockLayout{});

}  // namespace psim
