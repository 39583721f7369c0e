#pragma once

#include <cmath>

#include "psim/kernel.hpp"

namespace psim {

// ---------------------------------------------------------------------------
// Two-state discrete process.
//
// States are labelled 1 and 2. A single uniform draw S drives one transition:
// from state 1 the chain moves to 2 iff S > 1 - theta*p, from state 2 it
// moves to 1 iff S < p. Two chains sharing a draw therefore coalesce exactly
// when S < p or S > 1 - theta*p.
// ---------------------------------------------------------------------------

struct TwoStateParams {
  double theta = 1.0 / 9.0;
  double p = 0.1;
};

/// One transition of the two-state chain under draw s.
int twostate_step(int state, double s, const TwoStateParams& params);

/// Closed-form quantities for the two-state process.
struct TwoStateAnalytics {
  double stationary1 = 0.0;  // 1 / (1 + theta)
  double stationary2 = 0.0;  // theta / (1 + theta)
  double delta = 0.0;        // transition-matrix determinant 1 - p - theta*p

  /// P(X_i != Y_{i-1}) for lag-1 coupled chains from independent starts:
  /// 0.5 * delta^(i-1).
  double p_noncoal(long i) const { return 0.5 * std::pow(delta, static_cast<double>(i - 1)); }
  /// Correlation of two stationary states B iterations apart: delta^B.
  double rho(long block_len) const { return std::pow(delta, static_cast<double>(block_len)); }
};

TwoStateAnalytics twostate_analytics(const TwoStateParams& params);

class TwoStateKernel : public Kernel {
 public:
  explicit TwoStateKernel(TwoStateParams params = {});

  int dimension() const override { return 1; }
  Metric metric() const override { return Metric::zero_one; }
  BlockLayout block_layout() const override { return {0, 1}; }

  /// States 1 and 2 with probabilities (0.5, 0.5).
  ChainState start(const StreamKey& key) const override;
  ChainState mcmc(ChainState x, const RandomBlock& block, int first_iter, int n) const override;

  const TwoStateParams& params() const { return params_; }

 private:
  TwoStateParams params_;
};

// ---------------------------------------------------------------------------
// Standard normal target in d dimensions, random-walk MCMC.
//
// Internal iterations propose x + sigma*eta with a shared eta ~ N(0, I) and
// accept with the shared uniform against U(z) = |z|^2 / 2, so all chains in a
// column consume identical draws at identical positions.
// ---------------------------------------------------------------------------

struct NormalParams {
  int dim = 1;
  double sigma = 0.0;  // 0 selects the default 2 / sqrt(dim)
  double radius = 3.0;
  double start_halfwidth = 6.0;

  double effective_sigma() const { return sigma > 0.0 ? sigma : 2.0 / std::sqrt(dim); }
};

/// Negative log-likelihood of the standard normal: |z|^2 / 2.
double normal_negloglik(const ChainState& z);

class NormalKernel : public Kernel {
 public:
  explicit NormalKernel(NormalParams params = {});

  int dimension() const override { return params_.dim; }
  Metric metric() const override { return Metric::euclidean; }
  BlockLayout block_layout() const override { return {params_.dim, 1}; }

  /// Each coordinate uniform on (-start_halfwidth, start_halfwidth).
  ChainState start(const StreamKey& key) const override;
  ChainState mcmc(ChainState x, const RandomBlock& block, int first_iter, int n) const override;

  double neg_log_lik(const ChainState& x) const override { return normal_negloglik(x); }
  bool supports_maximal() const override { return true; }

  const NormalParams& params() const { return params_; }

 private:
  NormalParams params_;
};

/// Advances every state in the list through the same n iterations of the
/// block, i.e. the column-wise common-random-numbers update.
void normal_mcmc_block(std::vector<ChainState>& states, const RandomBlock& block, int first_iter,
                       int n, const NormalParams& params);

}  // namespace psim
