#include "psim/coupling.hpp"

#include <stdexcept>

namespace psim {

namespace {

double dist_sq(const ChainState& a, const ChainState& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

ChainState jump(const ChainState& x, double r, std::span<const double> r_dir, double r_mag) {
  if (!(r > 0.0)) throw std::invalid_argument("jump: radius must be positive");
  if (r_dir.size() != x.size()) throw std::invalid_argument("jump: direction dimension mismatch");
  double norm_sq = 0.0;
  for (double v : r_dir) norm_sq += v * v;
  if (norm_sq == 0.0) throw std::domain_error("jump: zero-norm direction draw");
  const double scale = r * std::pow(r_mag, 1.0 / static_cast<double>(x.size())) / std::sqrt(norm_sq);
  ChainState out(x);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * r_dir[i];
  return out;
}

ChainState max_couple(const ChainState& x, const ChainState& x_star, const ChainState& y,
                      double r) {
  const std::size_t d = x.size();
  if (x_star.size() != d || y.size() != d)
    throw std::invalid_argument("max_couple: dimension mismatch");
  if (dist_sq(x_star, x) > (r + 1e-9) * (r + 1e-9))
    throw std::invalid_argument("max_couple: |x_star - x| exceeds the jump radius");

  // Spheres coincide: the coupling is total and L = 0 below would divide by zero.
  if (states_equal(y, x)) return x_star;

  // x_star in the overlap zone of the two spheres: copy the destination.
  if (dist_sq(y, x_star) <= r * r) return x_star;

  const double two_l = std::sqrt(dist_sq(y, x));
  const double l = 0.5 * two_l;
  ChainState v(d);  // unit vector along x -> y
  for (std::size_t i = 0; i < d; ++i) v[i] = (y[i] - x[i]) / two_l;

  // c = L v + u_X - (u_X . v) v, where u_X = x_star - x.
  double ux_dot_v = 0.0;
  for (std::size_t i = 0; i < d; ++i) ux_dot_v += (x_star[i] - x[i]) * v[i];
  double c_sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double ci = l * v[i] + (x_star[i] - x[i]) - ux_dot_v * v[i];
    c_sq += ci * ci;
  }

  ChainState out(d);
  if (c_sq < r * r) {
    // Translate along the centre line past the overlap zone: u_Y = u_X + 2 w v.
    const double w = -l + std::sqrt(l * l + r * r - c_sq);
    for (std::size_t i = 0; i < d; ++i) out[i] = y[i] + (x_star[i] - x[i]) + 2.0 * w * v[i];
  } else {
    // The line through x_star parallel to xy misses the overlap zone.
    for (std::size_t i = 0; i < d; ++i) out[i] = y[i] + (x_star[i] - x[i]);
  }
  return out;
}

void advance_free_maximal(const Kernel& kernel, ChainState& x, const RandomBlock& block,
                          double radius) {
  const int m = block.iters / block.steps;
  const auto u = [&kernel](const ChainState& z) { return kernel.neg_log_lik(z); };
  for (int step = 0; step < block.steps; ++step) {
    ChainState pre = kernel.mcmc(std::move(x), block, step * m, m);
    const ChainState star = jump(pre, radius, block.dir_at(step), block.mag_at(step));
    x = mh_test(u, pre, star, block.mh_at(step));
  }
}

void advance_pair_maximal(const Kernel& kernel, ChainState& x, ChainState& y,
                          const RandomBlock& block, double radius) {
  const int m = block.iters / block.steps;
  const auto u = [&kernel](const ChainState& z) { return kernel.neg_log_lik(z); };
  for (int step = 0; step < block.steps; ++step) {
    ChainState x_pre = kernel.mcmc(std::move(x), block, step * m, m);
    ChainState y_pre = kernel.mcmc(std::move(y), block, step * m, m);
    const ChainState x_star = jump(x_pre, radius, block.dir_at(step), block.mag_at(step));
    const ChainState y_star = max_couple(x_pre, x_star, y_pre, radius);
    x = mh_test(u, x_pre, x_star, block.mh_at(step));
    y = mh_test(u, y_pre, y_star, block.mh_at(step));
  }
}

}  // namespace psim
