#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ruinld/dependence.hpp"
#include "ruinld/sim_estimate.hpp"
#include "ruinld/tails.hpp"

namespace ruinld {

/// Full risk model: claim law, inter-arrival law, premium rate, dependence
/// configuration and reinsurance parameters.
struct RiskModel {
  enum class Case { Case1, Case2 };

  TailModel claims;          // per-claim size law
  TailModel inter_arrivals;  // gap law between claims
  double premium_rate = 1.0;
  Case dependence_case = Case::Case1;
  DependencePlan claim_plan = DependencePlan::iid();     // Case 1
  DependencePlan arrival_plan = DependencePlan::iid();   // Case 1
  DependencePlan pair_plan =
      DependencePlan::pairs(DependencePlan::PairCoupling::Independent);  // Case 2
  double q1 = 1.0;          // ceded claim fraction, (0, 1]
  double q2 = 1.0;          // ceded premium fraction, [0, 1]
  double deductible = 0.0;  // per-claim excess threshold
  double stop_loss_k = 1.0; // stop-loss retention multiple
  std::optional<TailModel> random_time;
  bool mu0_literal_paper = false;

  double mu_claims() const { return claims.mean(); }
  double mu_gaps() const { return inter_arrivals.mean(); }

  /// Stop-loss centering constant. Default form |q2 c mu_gaps - q1 mu_claims|
  /// reduces to q1*mu_claims when q2 = 0; the literal override uses
  /// |q2 mu_gaps - q1 c mu_claims| instead.
  double mu0() const;

  /// Basic safety load mu_claims < c * mu_gaps; the generalized load
  /// q1 mu_claims < q2 c mu_gaps is enforced only when q2 > 0 and a
  /// reinsurance functional is requested.
  void validate(bool reinsurance_requested = false) const;

  nlohmann::json descriptor() const;
  static RiskModel from_descriptor(const nlohmann::json& j);
};

/// Prefix sums S_k = sum_{i<=k} (Y_i - c Z_i), accumulated left to right.
std::vector<double> net_loss_partial_sums(std::span<const double> claims,
                                          std::span<const double> gaps,
                                          double premium_rate, std::size_t n);

/// Per-path aggregates of the first n claims, enough to evaluate every
/// process transform at a time horizon. Pure function of the inputs.
struct PathAggregates {
  std::int64_t n_claims = 0;
  double sum_claims = 0.0;        // sum Y_i
  double sum_gaps = 0.0;          // sum Z_i up to the last claim
  double net_loss = 0.0;          // sum (Y_i - c Z_i)
  double max_net_loss = 0.0;      // max over 0 <= k <= n of prefix sums (>= 0)
  double weighted_net = 0.0;      // sum (q1 Y_i - q2 c Z_i)
  double excess_net = 0.0;        // sum ((Y_i - D)^+ - q2 c Z_i)
};

struct ProcessParams {
  double premium_rate = 1.0;
  double q1 = 1.0;
  double q2 = 1.0;
  double deductible = 0.0;
};

/// Applies one (claim, gap) pair to the aggregates; the single source of
/// truth for every process transform.
inline void add_claim(PathAggregates& agg, double y, double z,
                      const ProcessParams& p) {
  agg.sum_claims += y;
  agg.sum_gaps += z;
  agg.net_loss += y - p.premium_rate * z;
  if (agg.net_loss > agg.max_net_loss) agg.max_net_loss = agg.net_loss;
  agg.weighted_net += p.q1 * y - p.q2 * p.premium_rate * z;
  agg.excess_net +=
      std::max(y - p.deductible, 0.0) - p.q2 * p.premium_rate * z;
  ++agg.n_claims;
}

PathAggregates accumulate_path(std::span<const double> claims,
                               std::span<const double> gaps, std::size_t n,
                               const ProcessParams& params);

/// Running maximum of the net-loss prefix sums over 0 <= k <= N(t); the k=0
/// term makes it nonnegative.
double running_max_net_loss(std::span<const double> claims,
                            std::span<const double> gaps, double premium_rate,
                            double t);

/// Total claim amount by t.
double total_claims(std::span<const double> claims,
                    std::span<const double> gaps, double t);

/// q1 * sum Y_i - q2 * c * sum Z_i over claims arriving by t.
double proportional_net_loss(std::span<const double> claims,
                             std::span<const double> gaps, double t, double q1,
                             double q2, double premium_rate);

/// sum ((Y_i - D)^+ - q2 c Z_i) over claims arriving by t.
double excess_of_net_loss(std::span<const double> claims,
                          std::span<const double> gaps, double t, double D,
                          double q2, double premium_rate);

/// Stop-loss transform ( sum(q1 Y - q2 c Z) / (mu0 t / mu_gaps) - K )^+.
double stop_net_loss(std::span<const double> claims,
                     std::span<const double> gaps, double t, double q1,
                     double q2, double premium_rate, double k_retention,
                     double mu0, double mu_gaps);

/// Monte Carlo moments of the auxiliary laws Y + cZ, max(Y, cZ) and
/// (Y - D)^+, with the exact cross-check E(Y + cZ) = mu_claims + c mu_gaps.
struct AuxLawMoments {
  double mu_sum = 0.0;      // E (Y + cZ)
  double mu_max = 0.0;      // E max(Y, cZ)
  double mu_excess = 0.0;   // E (Y - D)^+
  double mu0 = 0.0;
  double se_sum = 0.0;
  double se_max = 0.0;
  double se_excess = 0.0;
  double exact_mu_sum = 0.0;
};

AuxLawMoments aux_moments(const RiskModel& model, std::uint64_t reps,
                          std::uint64_t seed);

/// E max(Y, cZ) by quadrature of the joint exceedance tail; exact per the
/// model's coupling (MC only for the Gaussian intra-pair case).
double mean_max_claim_income(const RiskModel& model);

/// E (Y - D)^+ = integral_D^inf tail(y) dy, by quadrature.
double mean_excess_claim(const TailModel& claims, double deductible);

}  // namespace ruinld
