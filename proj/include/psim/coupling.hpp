#pragma once

#include <cmath>
#include <span>

#include "psim/kernel.hpp"

namespace psim {

/// Uniform draw over the solid d-ball of radius r centred at x:
/// x + r * mag^(1/d) * dir/|dir|, with dir standard normal and mag uniform.
/// Throws std::domain_error on a zero-norm direction draw; redrawing is not
/// allowed because the draws are fixed by the block.
ChainState jump(const ChainState& x, double r, std::span<const double> r_dir, double r_mag);

/// Maximally coupled destination for the chain at y, given the partner's
/// jump x -> x_star (|x_star - x| <= r). If x_star lands within r of y the
/// destination is copied verbatim; otherwise the jump vector is translated
/// along the centre line so the result stays inside the y-sphere but outside
/// the overlap zone. The marginal law of the result is solid-ball uniform
/// around y whenever x_star is solid-ball uniform around x.
ChainState max_couple(const ChainState& x, const ChainState& x_star, const ChainState& y,
                      double r);

/// Metropolis-Hastings acceptance: x_star if r_mh <= exp(U(x) - U(x_star)),
/// else x. U(x_star) = +inf rejects naturally.
template <class NegLogLik>
const ChainState& mh_test(NegLogLik&& u, const ChainState& x, const ChainState& x_star,
                          double r_mh) {
  return r_mh <= std::exp(u(x) - u(x_star)) ? x_star : x;
}

/// One block of free evolution for a single chain: M internal iterations then
/// a free jump + M-H test, repeated for each coupling step of the block.
void advance_free_maximal(const Kernel& kernel, ChainState& x, const RandomBlock& block,
                          double radius);

/// One block of coupled evolution for a pair: x jumps freely, y's jumps are
/// maximally coupled to x's, sub-block by sub-block under shared draws.
void advance_pair_maximal(const Kernel& kernel, ChainState& x, ChainState& y,
                          const RandomBlock& block, double radius);

}  // namespace psim
