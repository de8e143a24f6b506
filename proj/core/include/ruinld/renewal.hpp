#pragma once

#include <cstdint>
#include <vector>

#include "ruinld/dependence.hpp"
#include "ruinld/sim_estimate.hpp"
#include "ruinld/tails.hpp"

namespace ruinld {

/// A materialized arrival path: inter-arrival times and their prefix sums.
struct ArrivalPath {
  std::vector<double> inter_arrivals;
  std::vector<double> cum_times;
  double horizon = 0.0;

  static ArrivalPath from_inter_arrivals(std::vector<double> gaps,
                                         double horizon);
};

/// N(t): number of arrivals with cumulative time <= t; 0 before the first.
std::int64_t count(const ArrivalPath& path, double t);

/// Lazily extended arrival stream. Inter-arrivals are generated in fixed
/// chunks whose RNG keys depend only on (seed, path_index, chunk index), so a
/// path is identical however far it is extended and on any worker.
class ArrivalGenerator {
 public:
  ArrivalGenerator(const TailModel& law, const DependencePlan& plan,
                   std::uint64_t seed, std::uint64_t path_index)
      : gaps_(law, plan, seed, path_index, Substream::Arrivals) {}

  /// Inter-arrival i (0-based), extending as needed.
  double gap(std::size_t i);
  /// Cumulative arrival time of claim i+1.
  double arrival_time(std::size_t i);
  /// N(t), extending the path past t on demand.
  std::int64_t count_up_to(double t);

 private:
  ChunkedSequence gaps_;
  std::vector<double> cum_;
};

/// Estimate of E N^k(t) normalized by (t / mean_gap)^k.
SimEstimate renewal_moments(const TailModel& law, const DependencePlan& plan,
                            double t, int k, std::uint64_t reps,
                            std::uint64_t seed, int threads = 0);

struct SllnReport {
  std::vector<double> t_grid;
  std::vector<double> fraction_in_band;  // per t, share of paths within eps
  std::vector<double> mean_ratio;        // per t, mean of N(t) mean_gap / t
  double eps = 0.05;
};

/// Almost-sure ratio N(t) mean_gap / t checked as a fraction-in-band
/// statement across paths.
SllnReport slln_check(const TailModel& law, const DependencePlan& plan,
                      std::span<const double> t_grid, std::uint64_t paths,
                      std::uint64_t seed, double eps = 0.05, int threads = 0);

struct ExpMomentTrace {
  std::vector<double> t_grid;
  std::vector<double> trace;  // E e^{rN(t)} 1{N(t) > (1+delta) t / mean_gap}
  bool overflowed = false;
  bool monotone_nonincreasing = false;
};

/// Exponential-moment tail of the counting process above the (1+delta) band.
/// Computed in log space; r is a diagnostic knob and must be small enough
/// for the product r*(1+delta) to stay below the count's deviation rate.
ExpMomentTrace exp_moment_tail(const TailModel& law,
                               const DependencePlan& plan, double r,
                               double delta, std::span<const double> t_grid,
                               std::uint64_t paths, std::uint64_t seed,
                               int threads = 0);

}  // namespace ruinld
