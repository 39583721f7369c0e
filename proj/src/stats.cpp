#include "psim/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace psim {

namespace {

struct PairAccumulator {
  double sum = 0.0;
  long count = 0;
  std::vector<std::pair<double, double>> pairs;

  void add_value(double v) {
    sum += v;
    ++count;
  }
};

SetCorrelation correlation_from(const PairAccumulator& acc) {
  if (acc.pairs.empty()) throw std::invalid_argument("correlation: no pairs");
  const double mean = acc.sum / static_cast<double>(acc.count);
  double num = 0.0, den_u = 0.0, den_v = 0.0;
  for (const auto& [u, v] : acc.pairs) {
    num += (u - mean) * (v - mean);
    den_u += (u - mean) * (u - mean);
    den_v += (v - mean) * (v - mean);
  }
  if (den_u == 0.0 || den_v == 0.0)
    throw std::domain_error("correlation: zero variance (degenerate values)");
  SetCorrelation out;
  out.rho = num / std::sqrt(den_u * den_v);
  out.n_pairs = static_cast<long>(acc.pairs.size());
  return out;
}

}  // namespace

SetCorrelation serial_correlation_values(const std::vector<std::vector<double>>& sets) {
  if (sets.empty()) throw std::invalid_argument("serial_correlation: no sets");
  PairAccumulator acc;
  for (const auto& set : sets) {
    if (set.size() < 2) throw std::invalid_argument("serial_correlation: set with fewer than 2 points");
    for (double v : set) acc.add_value(v);
    for (std::size_t i = 0; i + 1 < set.size(); ++i) acc.pairs.push_back({set[i], set[i + 1]});
  }
  return correlation_from(acc);
}

SetCorrelation cross_set_correlation_values(const std::vector<std::vector<double>>& sets) {
  if (sets.size() < 2) throw std::invalid_argument("cross_set_correlation: need at least 2 sets");
  PairAccumulator acc;
  for (const auto& set : sets) {
    if (set.empty()) throw std::invalid_argument("cross_set_correlation: empty set");
    for (double v : set) acc.add_value(v);
  }
  for (std::size_t s = 0; s + 1 < sets.size(); ++s)
    acc.pairs.push_back({sets[s].back(), sets[s + 1].front()});
  return correlation_from(acc);
}

CoalescenceSummary coalescence_summary_values(std::span<const int> counts) {
  CoalescenceSummary out;
  double acc = 0.0;
  for (int c : counts) {
    if (c <= 0) continue;  // unresolved row
    ++out.n;
    acc += c;
    out.max = std::max(out.max, c);
    ++out.histogram[c];
  }
  if (out.n == 0) throw std::invalid_argument("coalescence_summary: no resolved chains");
  out.mean = acc / static_cast<double>(out.n);
  return out;
}

CoalescenceSummary coalescence_summary(std::span<const SampleSet> sets) {
  std::vector<int> counts;
  for (const SampleSet& set : sets)
    counts.insert(counts.end(), set.blocks_to_coalesce.begin(), set.blocks_to_coalesce.end());
  return coalescence_summary_values(counts);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = (static_cast<double>(i) + 1.0) / n - f;
    d = std::max({d, lo, hi});
  }
  return d;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double acc = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    acc += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

double ks_pvalue(double d_stat, long n) {
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d_stat;
  return kolmogorov_sf(lambda);
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // series for P(a,x), return 1 - P
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // continued fraction for Q(a,x), modified Lentz
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double chi2_pvalue(double stat, int dof) {
  if (stat <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * stat);
}

}  // namespace psim
