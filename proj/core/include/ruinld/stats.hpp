#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ruinld {

/// Pairwise (cascade) summation. Result depends only on element order, not on
/// how work was split across threads, which keeps reductions worker-count
/// invariant.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wald interval value +/- 1.96 se for a proportion.
inline ConfidenceInterval wald_ci(double p_hat, std::uint64_t n) {
  const double se = std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) /
                              static_cast<double>(n));
  return {p_hat - 1.96 * se, p_hat + 1.96 * se};
}

/// Wilson score interval; behaves sanely for rare events and zero hits.
inline ConfidenceInterval wilson_ci(std::uint64_t hits, std::uint64_t n) {
  const double z = 1.96;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = p + z2 / (2.0 * nn);
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, (centre - half) / denom),
          std::min(1.0, (centre + half) / denom)};
}

/// Two-sided Kolmogorov-Smirnov distance between a sample and a CDF.
/// `cdf` must be nondecreasing on the sample range.
template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

/// Asymptotic KS critical value at significance level alpha.
inline double ks_critical(double alpha, std::size_t n) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) /
         std::sqrt(static_cast<double>(n));
}

/// Kendall rank correlation, O(n^2); adequate for the sample sizes used in
/// dependence diagnostics.
inline double kendall_tau(std::span<const double> x,
                          std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (s > 0.0)
        ++concordant;
      else if (s < 0.0)
        ++discordant;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) *
                       static_cast<double>(n - 1);
  return static_cast<double>(concordant - discordant) / pairs;
}

/// Running mean/variance/min/max accumulator (Welford).
class OnlineMoments {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
    const double d2 = x - mean_;
    m4_ += d * d2 * d * d2;  // coarse 4th-moment tracker, used for warnings
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double stderr_of_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }
  double kurtosis_proxy() const {
    const double v = variance();
    return (n_ > 3 && v > 0.0)
               ? (m4_ / static_cast<double>(n_)) / (v * v)
               : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m4_ = 0.0;
};

}  // namespace ruinld
