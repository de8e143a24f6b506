#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ruinld/processes.hpp"
#include "ruinld/sim_estimate.hpp"

namespace ruinld {

/// Path functional whose exceedance probability is estimated.
enum class PathTarget {
  RuinRunningMax,   // max over claim epochs of the net-loss prefix sums
  NetLossLast,      // net loss at the horizon
  TotalClaims,      // claim sum at the horizon
  ProportionalNet,  // q1-claims minus q2-premium at the horizon
  ExcessNet,        // per-claim excess minus q2-premium at the horizon
};

struct RunPolicy {
  int threads = 0;                 // 0: hardware concurrency
  std::uint64_t min_hits = 100;    // starvation threshold per cell
  bool allow_stratified = true;    // rescue starved cells when supported
  std::uint64_t strat_paths = 0;   // 0: same as the crude path count
};

struct CellEstimate {
  double t = 0.0;
  double x = 0.0;
  SimEstimate estimate;
};

/// Exceedance probabilities of a path functional over a (t, x) grid. One set
/// of simulated paths serves every cell of the crude pass (so estimates are
/// comparable across t and x on shared seeds); cells starved below
/// policy.min_hits switch to the big-jump stratified estimator when the claim
/// side is independent, and otherwise stay flagged as bounds.
std::vector<std::vector<CellEstimate>> exceedance_grid(
    const RiskModel& model, PathTarget target, std::span<const double> t_grid,
    const std::vector<std::vector<double>>& x_grids, std::uint64_t n_paths,
    std::uint64_t seed, const RunPolicy& policy = {});

/// P(running-max net loss by t exceeds x).
SimEstimate ruin_prob_finite(const RiskModel& model, double x, double t,
                             std::uint64_t n_paths, std::uint64_t seed,
                             const RunPolicy& policy = {});

/// P(running-max net loss by an independent random horizon exceeds x).
/// The horizon draws from a dedicated substream, so the claim and arrival
/// randomness is shared with fixed-horizon runs on the same seed.
SimEstimate ruin_prob_random_time(const RiskModel& model, double x,
                                  std::uint64_t n_paths, std::uint64_t seed,
                                  const RunPolicy& policy = {});

/// P(net loss at t exceeds x).
SimEstimate net_loss_exceed(const RiskModel& model, double x, double t,
                            std::uint64_t n_paths, std::uint64_t seed,
                            const RunPolicy& policy = {});

/// P(total claims by t exceed x).
SimEstimate total_claims_exceed(const RiskModel& model, double x, double t,
                                std::uint64_t n_paths, std::uint64_t seed,
                                const RunPolicy& policy = {});

struct StoplossMeanResult {
  SimEstimate estimate;
  bool retention_gate_ok = true;  // q2 == 0 or K above the retention bound
  double kurtosis = 0.0;
};

/// Mean of the stop-loss transform at t.
StoplossMeanResult stoploss_mean(const RiskModel& model, double t,
                                 std::uint64_t n_paths, std::uint64_t seed,
                                 const RunPolicy& policy = {});

/// Big-jump stratified estimator for the same exceedance targets: paths are
/// stratified on whether any claim exceeds u = x/2; the big-claim stratum is
/// sampled conditionally with its analytic weight 1 - (1 - tail(u))^m given
/// the realized claim count m. Unbiased by total probability; requires
/// independent claims (falls back to crude otherwise or on weight underflow).
SimEstimate big_jump_stratified(const RiskModel& model, PathTarget target,
                                double x, double t, std::uint64_t n_paths,
                                std::uint64_t seed,
                                const RunPolicy& policy = {});

/// Stratified estimate with the horizon drawn from the model's random time.
SimEstimate big_jump_stratified_random_time(const RiskModel& model, double x,
                                            std::uint64_t n_paths,
                                            std::uint64_t seed,
                                            const RunPolicy& policy = {});

/// Truncation bound for P(S_n > x) with nonnegative upper-orthant dependent
/// summands: n tail(x/v) + M (e mu n / x)^v.
double nagaev_bound(std::uint64_t n, double x, double v, double m_bound,
                    double mu, const TailModel& claims);

struct LdeRatioRow {
  double x = 0.0;
  SimEstimate estimate;
  double reference = 0.0;  // n * tail(x - mu n)
  double ratio = 0.0;
};

struct LdeOracleReport {
  std::uint64_t n = 0;
  std::vector<LdeRatioRow> rows;
  double sup_abs_dev = 0.0;  // sup |ratio - 1| over non-starved rows
  std::size_t starved = 0;
};

/// Large-deviation ratio table for fixed-n claim sums:
/// P(S_n > x) / (n tail(x - mu n)) over a grid with x >= gamma n.
LdeOracleReport lde_sum_oracle(const TailModel& claims,
                               const DependencePlan& plan, std::uint64_t n,
                               double gamma, std::span<const double> x_grid,
                               std::uint64_t reps, std::uint64_t seed,
                               const RunPolicy& policy = {});

/// True when the model's claim side is independent across claims, which the
/// stratified estimator requires.
bool stratification_supported(const RiskModel& model);

}  // namespace ruinld
