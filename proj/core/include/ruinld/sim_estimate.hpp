#pragma once

#include <cstdint>

#include "ruinld/stats.hpp"

namespace ruinld {

/// A Monte Carlo point estimate with its sampling error and reproducibility
/// metadata. For proportions the interval is Wald (value +/- 1.96 se) with a
/// Wilson fallback when hits < 30 or the proportion is below 1e-3.
struct SimEstimate {
  enum class Method { Crude, BigJumpStratified };

  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n_paths = 0;
  std::uint64_t seed = 0;
  ConfidenceInterval ci95;
  Method method = Method::Crude;
  std::uint64_t hits = 0;          // exceedance count (proportions)
  bool insufficient_hits = false;  // starved cell; value is a bound, not data
  bool high_variance = false;      // heavy-tailed summand warning (means)

  static SimEstimate proportion(std::uint64_t hits, std::uint64_t n,
                                std::uint64_t seed, Method method) {
    SimEstimate e;
    e.n_paths = n;
    e.seed = seed;
    e.method = method;
    e.hits = hits;
    const double p = n == 0 ? 0.0 : static_cast<double>(hits) /
                                        static_cast<double>(n);
    e.value = p;
    e.stderr_ = n == 0 ? 0.0
                       : std::sqrt(std::max(p * (1.0 - p), 0.0) /
                                   static_cast<double>(n));
    e.ci95 = (hits < 30 || p < 1e-3) ? wilson_ci(hits, n) : wald_ci(p, n);
    return e;
  }
};

}  // namespace ruinld
