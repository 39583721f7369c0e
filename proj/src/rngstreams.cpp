#include "psim/rngstreams.hpp"

#include <cmath>
#include <stdexcept>

namespace psim {

namespace {

// SplitMix64 finalizer: bijective on u64 with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Stream::Stream(const StreamKey& key) {
  // Chained digest of the key fields. Each word is the previous word combined
  // with one more field, so two keys that differ anywhere differ in the state
  // word at the first differing field (the finalizer is a bijection).
  const std::uint64_t a = mix64(key.master_seed);
  const std::uint64_t b = mix64(a ^ key.set_index);
  const std::uint64_t c = mix64(b ^ key.block_index);
  const std::uint64_t d = mix64(c ^ static_cast<std::uint64_t>(key.substream));
  s_[0] = a;
  s_[1] = b;
  s_[2] = c;
  s_[3] = d;
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ULL;  // all-zero state is invalid
}

std::uint64_t Stream::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl64(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl64(s_[3], 45);
  return result;
}

double Stream::next_uniform() {
  // 53-bit mantissa offset by half an ulp, so the value lies strictly in (0,1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

double Stream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  for (;;) {
    const double u = 2.0 * next_uniform() - 1.0;
    const double v = 2.0 * next_uniform() - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }
}

void Stream::fill_uniform(std::span<double> out) {
  for (double& x : out) x = next_uniform();
}

void Stream::fill_normal(std::span<double> out) {
  for (double& x : out) x = next_normal();
}

RandomBlock rand_block(const StreamKey& key, int iters, int iters_per_coupling, int dim,
                       const BlockLayout& layout) {
  if (iters < 1) throw std::invalid_argument("rand_block: B must be >= 1");
  if (dim < 1) throw std::invalid_argument("rand_block: d must be >= 1");
  if (iters_per_coupling < 1 || iters % iters_per_coupling != 0)
    throw std::invalid_argument("rand_block: M must be a positive divisor of B");

  RandomBlock block;
  block.iters = iters;
  block.steps = iters / iters_per_coupling;
  block.dim = dim;
  block.layout = layout;

  StreamKey k = key;
  k.substream = Substream::mcmc;
  Stream mcmc_stream(k);
  block.mcmc.resize(static_cast<std::size_t>(iters) * layout.stride());
  for (int i = 0; i < iters; ++i) {
    double* at = block.mcmc.data() + static_cast<std::size_t>(i) * layout.stride();
    for (int j = 0; j < layout.normals_per_iter; ++j) at[j] = mcmc_stream.next_normal();
    for (int j = 0; j < layout.uniforms_per_iter; ++j)
      at[layout.normals_per_iter + j] = mcmc_stream.next_uniform();
  }

  k.substream = Substream::dir;
  Stream dir_stream(k);
  block.dir.resize(static_cast<std::size_t>(block.steps) * dim);
  dir_stream.fill_normal(block.dir);

  k.substream = Substream::mag;
  Stream mag_stream(k);
  block.mag.resize(block.steps);
  mag_stream.fill_uniform(block.mag);

  k.substream = Substream::mh;
  Stream mh_stream(k);
  block.mh.resize(block.steps);
  mh_stream.fill_uniform(block.mh);

  return block;
}

}  // namespace psim
