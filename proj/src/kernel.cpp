#include "psim/kernel.hpp"

#include <stdexcept>

namespace psim {

double state_distance_sq(const ChainState& a, const ChainState& b, Metric metric) {
  if (metric == Metric::zero_one) return states_equal(a, b) ? 0.0 : 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

std::size_t min_ind(const std::vector<ChainState>& points, std::size_t i1, std::size_t i2,
                    Metric metric) {
  if (i1 >= i2) throw std::invalid_argument("min_ind: empty candidate range");
  if (i2 >= points.size()) throw std::invalid_argument("min_ind: target index out of range");
  std::size_t best = i1;
  double best_d = state_distance_sq(points[i1], points[i2], metric);
  for (std::size_t i = i1 + 1; i < i2; ++i) {
    const double d = state_distance_sq(points[i], points[i2], metric);
    if (d < best_d) {  // strict: first index wins ties
      best = i;
      best_d = d;
    }
  }
  return best;
}

double Kernel::neg_log_lik(const ChainState&) const {
  throw std::logic_error("kernel does not provide a likelihood");
}

}  // namespace psim
