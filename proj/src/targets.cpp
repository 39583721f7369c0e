#include "psim/targets.hpp"

#include <stdexcept>

namespace psim {

int twostate_step(int state, double s, const TwoStateParams& params) {
  if (state == 1) return s > 1.0 - params.theta * params.p ? 2 : 1;
  return s < params.p ? 1 : 2;
}

TwoStateAnalytics twostate_analytics(const TwoStateParams& params) {
  TwoStateAnalytics out;
  out.stationary1 = 1.0 / (1.0 + params.theta);
  out.stationary2 = params.theta / (1.0 + params.theta);
  out.delta = 1.0 - params.p - params.theta * params.p;
  return out;
}

TwoStateKernel::TwoStateKernel(TwoStateParams params) : params_(params) {
  if (params_.theta < 0.0 || params_.theta > 1.0)
    throw std::invalid_argument("two-state: theta must lie in [0, 1]");
  if (!(params_.p > 0.0) || params_.p > 0.5)
    throw std::invalid_argument("two-state: p must lie in (0, 0.5]");
}

ChainState TwoStateKernel::start(const StreamKey& key) const {
  Stream stream(key);
  return {stream.next_uniform() < 0.5 ? 1.0 : 2.0};
}

ChainState TwoStateKernel::mcmc(ChainState x, const RandomBlock& block, int first_iter,
                                int n) const {
  if (first_iter < 0 || first_iter + n > block.iters)
    throw std::invalid_argument("two-state mcmc: block exhausted");
  int state = static_cast<int>(x[0]);
  for (int it = first_iter; it < first_iter + n; ++it)
    state = twostate_step(state, block.mcmc_uniform(it), params_);
  x[0] = static_cast<double>(state);
  return x;
}

double normal_negloglik(const ChainState& z) {
  double acc = 0.0;
  for (double v : z) acc += v * v;
  return 0.5 * acc;
}

NormalKernel::NormalKernel(NormalParams params) : params_(params) {
  if (params_.dim < 1) throw std::invalid_argument("normal: dimension must be >= 1");
  if (params_.sigma < 0.0) throw std::invalid_argument("normal: sigma must be positive");
  if (!(params_.radius > 0.0)) throw std::invalid_argument("normal: radius must be positive");
  if (!(params_.start_halfwidth > 0.0))
    throw std::invalid_argument("normal: start halfwidth must be positive");
}

ChainState NormalKernel::start(const StreamKey& key) const {
  Stream stream(key);
  ChainState x(params_.dim);
  const double h = params_.start_halfwidth;
  for (double& v : x) v = (2.0 * stream.next_uniform() - 1.0) * h;
  return x;
}

ChainState NormalKernel::mcmc(ChainState x, const RandomBlock& block, int first_iter,
                              int n) const {
  if (first_iter < 0 || first_iter + n > block.iters)
    throw std::invalid_argument("normal mcmc: block exhausted");
  const int d = params_.dim;
  const double sigma = params_.effective_sigma();
  ChainState proposal(d);
  double u_cur = normal_negloglik(x);
  for (int it = first_iter; it < first_iter + n; ++it) {
    const auto eta = block.mcmc_normals(it);
    double u_prop = 0.0;
    for (int c = 0; c < d; ++c) {
      proposal[c] = x[c] + sigma * eta[c];
      u_prop += proposal[c] * proposal[c];
    }
    u_prop *= 0.5;
    if (block.mcmc_uniform(it) <= std::exp(u_cur - u_prop)) {
      x.swap(proposal);
      u_cur = u_prop;
    }
  }
  return x;
}

void normal_mcmc_block(std::vector<ChainState>& states, const RandomBlock& block, int first_iter,
                       int n, const NormalParams& params) {
  const NormalKernel kernel(params);
  for (ChainState& s : states) s = kernel.mcmc(std::move(s), block, first_iter, n);
}

}  // namespace psim
