#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "psim/perfect.hpp"
#include "psim/unbiased.hpp"

namespace psim {

/// Summary statistics of a batch of strings under a function g, matching the
/// columns of the two-state results table: the unadjusted estimate uses only
/// each string's first entry, the adjusted estimate is the mean weighted sum,
/// and sd_weight_sum is the sample standard deviation of the per-string
/// weighted sums (whose mean the adjusted estimate is).
struct WeightedSummary {
  double unadjusted = 0.0;
  double adjusted = 0.0;
  double prop_nu_gt1 = 0.0;
  double holes_per_sim = 0.0;
  double sd_weight_sum = 0.0;
  long n = 0;

  double se_adjusted() const { return sd_weight_sum / std::sqrt(static_cast<double>(n)); }
};

template <class G>
WeightedSummary weighted_estimate(const std::vector<StringSample>& strings, G&& g) {
  if (strings.empty()) throw std::invalid_argument("weighted_estimate: empty input");
  WeightedSummary out;
  out.n = static_cast<long>(strings.size());
  std::vector<double> sums;
  sums.reserve(strings.size());
  double unadj_acc = 0.0;
  long holes = 0, with_tail = 0;
  for (const StringSample& s : strings) {
    unadj_acc += g(s.entries.front().value);
    sums.push_back(weighted_sum(s, g));
    if (s.nu() > 1) ++with_tail;
    holes += (s.nu() - 1) / 2;
  }
  const double n = static_cast<double>(out.n);
  out.unadjusted = unadj_acc / n;
  double adj_acc = 0.0;
  for (double w : sums) adj_acc += w;
  out.adjusted = adj_acc / n;
  out.prop_nu_gt1 = static_cast<double>(with_tail) / n;
  out.holes_per_sim = static_cast<double>(holes) / n;
  double m2 = 0.0;
  for (double w : sums) m2 += (w - out.adjusted) * (w - out.adjusted);
  out.sd_weight_sum = std::sqrt(m2 / (n - 1.0));  // NaN marker when n == 1
  return out;
}

struct SetCorrelation {
  double rho = 0.0;
  long n_pairs = 0;

  /// Null-hypothesis standard error, 1/sqrt(n_pairs).
  double se() const { return 1.0 / std::sqrt(static_cast<double>(n_pairs)); }
};

/// Pooled lag-1 Pearson correlation of consecutive values within each set,
/// centred on the global mean; pairs never span sets. Throws on fewer than
/// two values per set or zero variance.
SetCorrelation serial_correlation_values(const std::vector<std::vector<double>>& sets);

/// Correlation of (last value of set s, first value of set s+1): the
/// across-set analogue that should be statistically zero.
SetCorrelation cross_set_correlation_values(const std::vector<std::vector<double>>& sets);

/// Adapter over sample sets: g(point) per chain, default the coordinate.
template <class G>
SetCorrelation serial_correlation(std::span<const SampleSet> sets, G&& g) {
  std::vector<std::vector<double>> values;
  values.reserve(sets.size());
  for (const SampleSet& set : sets) {
    if (set.error) throw std::invalid_argument("serial_correlation: error-flagged set");
    std::vector<double> row;
    row.reserve(set.points.size());
    for (const StringSample& p : set.points) row.push_back(g(p.entries.front().value));
    values.push_back(std::move(row));
  }
  return serial_correlation_values(values);
}

inline SetCorrelation serial_correlation(std::span<const SampleSet> sets, int coordinate = 0) {
  return serial_correlation(sets,
                            [coordinate](const ChainState& x) { return x[coordinate]; });
}

struct CoalescenceSummary {
  double mean = 0.0;
  int max = 0;
  std::map<int, long> histogram;
  long n = 0;
};

/// Pools blocks-to-coalesce counts over all chains in all sets. Unresolved
/// rows (count 0) are skipped.
CoalescenceSummary coalescence_summary(std::span<const SampleSet> sets);
CoalescenceSummary coalescence_summary_values(std::span<const int> counts);

// --- goodness-of-fit helpers -----------------------------------------------

double normal_cdf(double z);

/// One-sample Kolmogorov-Smirnov statistic against a callable CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Asymptotic p-value with Stephens' small-sample correction of the argument.
double ks_pvalue(double d_stat, long n);

/// Survival function of the Kolmogorov distribution.
double kolmogorov_sf(double lambda);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// P(chi2_dof >= stat).
double chi2_pvalue(double stat, int dof);

}  // namespace psim
