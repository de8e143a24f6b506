#include "ruinld/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "ruinld/parallel.hpp"
#include "ruinld/renewal.hpp"

namespace ruinld {

namespace {

constexpr std::size_t kMaxClaimsPerPath = std::size_t{1} << 26;

double target_value(const PathAggregates& agg, PathTarget target) {
  switch (target) {
    case PathTarget::RuinRunningMax:
      return agg.max_net_loss;
    case PathTarget::NetLossLast:
      return agg.net_loss;
    case PathTarget::TotalClaims:
      return agg.sum_claims;
    case PathTarget::ProportionalNet:
      return agg.weighted_net;
    case PathTarget::ExcessNet:
      return agg.excess_net;
  }
  return 0.0;
}

ProcessParams params_of(const RiskModel& m) {
  return {.premium_rate = m.premium_rate,
          .q1 = m.q1,
          .q2 = m.q2,
          .deductible = m.deductible};
}

// Unified claim/gap view over the two dependence cases.
struct ClaimGapSource {
  std::optional<ChunkedSequence> claims;
  std::optional<ChunkedSequence> gaps;
  std::optional<ChunkedPairs> pairs;

  double claim(std::size_t i) {
    return pairs ? pairs->at(i).first : claims->at(i);
  }
  double gap(std::size_t i) {
    return pairs ? pairs->at(i).second : gaps->at(i);
  }
};

ClaimGapSource make_source(const RiskModel& m, std::uint64_t seed,
                           std::uint64_t path) {
  ClaimGapSource s;
  if (m.dependence_case == RiskModel::Case::Case2) {
    s.pairs.emplace(m.claims, m.inter_arrivals, m.pair_plan, seed, path,
                    Substream::Claims);
  } else {
    s.claims.emplace(m.claims, m.claim_plan, seed, path, Substream::Claims);
    s.gaps.emplace(m.inter_arrivals, m.arrival_plan, seed, path,
                   Substream::Arrivals);
  }
  return s;
}

// Aggregates of one simulated path at each horizon of the ascending grid.
void walk_path(const RiskModel& model, std::uint64_t seed, std::uint64_t path,
               std::span<const double> t_sorted,
               std::span<PathAggregates> out) {
  ClaimGapSource src = make_source(model, seed, path);
  const ProcessParams params = params_of(model);
  PathAggregates agg;
  std::size_t i = 0;
  double next_arrival = src.gap(0);
  for (std::size_t ti = 0; ti < t_sorted.size(); ++ti) {
    while (next_arrival <= t_sorted[ti]) {
      add_claim(agg, src.claim(i), src.gap(i), params);
      ++i;
      if (i > kMaxClaimsPerPath)
        throw std::runtime_error("path exceeded claim budget before horizon");
      next_arrival += src.gap(i);
    }
    out[ti] = agg;
  }
}

double sample_random_time(const RiskModel& model, std::uint64_t seed,
                          std::uint64_t path) {
  RngStream rng = RngStream::derive(
      seed, path, static_cast<std::uint64_t>(Substream::RandomTime));
  return model.random_time->sample(rng);
}

struct MeanAccumulator {
  std::vector<double> sums;
  std::vector<double> sq_sums;
  void init(std::uint64_t n_blocks) {
    sums.assign(n_blocks, 0.0);
    sq_sums.assign(n_blocks, 0.0);
  }
};

SimEstimate finish_mean(const MeanAccumulator& acc, std::uint64_t n,
                        std::uint64_t seed, SimEstimate::Method method) {
  SimEstimate e;
  e.n_paths = n;
  e.seed = seed;
  e.method = method;
  const double mean = pairwise_sum(acc.sums) / static_cast<double>(n);
  const double mean_sq = pairwise_sum(acc.sq_sums) / static_cast<double>(n);
  e.value = mean;
  e.stderr_ =
      std::sqrt(std::max(0.0, mean_sq - mean * mean) / static_cast<double>(n));
  e.ci95 = {e.value - 1.96 * e.stderr_, e.value + 1.96 * e.stderr_};
  return e;
}

// ---- crude grid engine ----------------------------------------------------

std::vector<std::vector<CellEstimate>> crude_grid(
    const RiskModel& model, PathTarget target, std::span<const double> t_grid,
    const std::vector<std::vector<double>>& x_grids, std::uint64_t n_paths,
    std::uint64_t seed, const RunPolicy& policy, bool random_horizon) {
  const std::size_t nt = random_horizon ? 1 : t_grid.size();
  std::vector<double> t_sorted(t_grid.begin(), t_grid.end());
  if (!random_horizon &&
      !std::is_sorted(t_sorted.begin(), t_sorted.end()))
    throw std::invalid_argument("exceedance_grid: t grid must be ascending");

  std::vector<std::size_t> cell_offset(nt + 1, 0);
  for (std::size_t ti = 0; ti < nt; ++ti)
    cell_offset[ti + 1] = cell_offset[ti] + x_grids[ti].size();
  const std::size_t n_cells = cell_offset[nt];

  const std::uint64_t n_blocks =
      (n_paths + kDefaultBlock - 1) / kDefaultBlock;
  std::vector<std::vector<std::uint64_t>> hits(
      n_cells, std::vector<std::uint64_t>(n_blocks, 0));

  for_each_block(
      n_paths, kDefaultBlock, policy.threads,
      [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        std::vector<PathAggregates> aggs(nt);
        std::vector<double> horizon(1);
        for (std::uint64_t p = begin; p < end; ++p) {
          std::span<const double> ts(t_sorted);
          if (random_horizon) {
            horizon[0] = sample_random_time(model, seed, p);
            ts = horizon;
          }
          walk_path(model, seed, p, ts, std::span<PathAggregates>(aggs));
          for (std::size_t ti = 0; ti < nt; ++ti) {
            const double value = target_value(aggs[ti], target);
            const auto& xs = x_grids[ti];
            for (std::size_t xi = 0; xi < xs.size(); ++xi) {
              if (value > xs[xi]) ++hits[cell_offset[ti] + xi][b];
            }
          }
        }
      });

  std::vector<std::vector<CellEstimate>> out(nt);
  for (std::size_t ti = 0; ti < nt; ++ti) {
    for (std::size_t xi = 0; xi < x_grids[ti].size(); ++xi) {
      const auto& blocks = hits[cell_offset[ti] + xi];
      const std::uint64_t h =
          std::accumulate(blocks.begin(), blocks.end(), std::uint64_t{0});
      CellEstimate cell;
      cell.t = random_horizon ? 0.0 : t_sorted[ti];
      cell.x = x_grids[ti][xi];
      cell.estimate =
          SimEstimate::proportion(h, n_paths, seed, SimEstimate::Method::Crude);
      cell.estimate.insufficient_hits = h < policy.min_hits;
      out[ti].push_back(std::move(cell));
    }
  }
  return out;
}

// ---- big-jump stratified engine -------------------------------------------

// Claim draw conditioned to stay at or below u: tail prob uniform on
// (tail(u), 1).
double truncated_claim(const TailModel& law, double tail_u, RngStream& rng) {
  const double p = tail_u + rng.uniform01() * (1.0 - tail_u);
  return law.quantile_from_tail(std::min(p, 1.0));
}

// Claim draw conditioned to exceed u: tail prob uniform on (0, tail(u)).
double tail_claim(const TailModel& law, double tail_u, RngStream& rng) {
  return law.quantile_from_tail(rng.uniform01() * tail_u);
}

SimEstimate stratified_impl(const RiskModel& model, PathTarget target,
                            double x, double fixed_t, bool random_horizon,
                            std::uint64_t n_paths, std::uint64_t seed,
                            const RunPolicy& policy) {
  const double u = 0.5 * x;
  const double tail_u = model.claims.tail(u);
  const ProcessParams params = params_of(model);

  const std::uint64_t n_blocks =
      (n_paths + kDefaultBlock - 1) / kDefaultBlock;
  MeanAccumulator acc;
  acc.init(n_blocks);
  std::vector<std::uint64_t> strat_hits(n_blocks, 0);

  for_each_block(
      n_paths, kDefaultBlock, policy.threads,
      [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        double sum = 0.0, sq = 0.0;
        std::uint64_t hits_b = 0;
        for (std::uint64_t p = begin; p < end; ++p) {
          const double t = random_horizon
                               ? sample_random_time(model, seed, p)
                               : fixed_t;
          // Arrival path first; the claim strata share it.
          ChunkedSequence gaps(model.inter_arrivals, model.arrival_plan, seed,
                               p, Substream::Arrivals);
          std::vector<double> g;
          double cum = gaps.at(0);
          std::size_t m = 0;
          while (cum <= t) {
            g.push_back(gaps.at(m));
            ++m;
            if (m > kMaxClaimsPerPath)
              throw std::runtime_error(
                  "path exceeded claim budget before horizon");
            cum += gaps.at(m);
          }
          double contribution = 0.0;
          if (m > 0) {
            const double log_wa =
                static_cast<double>(m) * std::log1p(-tail_u);
            const double wa = std::exp(log_wa);
            const double wb = -std::expm1(log_wa);

            RngStream ra = RngStream::derive(
                seed, p,
                static_cast<std::uint64_t>(Substream::StratifiedClaims));
            PathAggregates agg_a;
            for (std::size_t i = 0; i < m; ++i)
              add_claim(agg_a, truncated_claim(model.claims, tail_u, ra), g[i],
                        params);
            if (target_value(agg_a, target) > x) contribution += wa;

            if (wb > 0.0 && tail_u > 0.0) {
              RngStream rb = RngStream::derive(
                  seed, p,
                  static_cast<std::uint64_t>(Substream::StratifiedTail));
              // First index whose claim exceeds u, truncated geometric on
              // {1..m}: J = ceil(log(1 - V wb) / log(1 - tail_u)).
              const double v = rb.uniform01();
              double jr = std::ceil(std::log1p(-v * wb) / std::log1p(-tail_u));
              const std::size_t j = static_cast<std::size_t>(std::clamp(
                  jr, 1.0, static_cast<double>(m)));
              PathAggregates agg_b;
              for (std::size_t i = 0; i < m; ++i) {
                double y;
                if (i + 1 < j)
                  y = truncated_claim(model.claims, tail_u, rb);
                else if (i + 1 == j)
                  y = tail_claim(model.claims, tail_u, rb);
                else
                  y = model.claims.quantile_from_tail(rb.uniform01());
                add_claim(agg_b, y, g[i], params);
              }
              if (target_value(agg_b, target) > x) {
                contribution += wb;
                ++hits_b;
              }
            }
          }
          sum += contribution;
          sq += contribution * contribution;
        }
        acc.sums[b] = sum;
        acc.sq_sums[b] = sq;
        strat_hits[b] = hits_b;
      });

  SimEstimate e = finish_mean(acc, n_paths, seed,
                              SimEstimate::Method::BigJumpStratified);
  e.hits = std::accumulate(strat_hits.begin(), strat_hits.end(),
                           std::uint64_t{0});
  e.insufficient_hits = e.hits < policy.min_hits;
  return e;
}

std::uint64_t strat_path_count(std::uint64_t n_paths,
                               const RunPolicy& policy) {
  return policy.strat_paths > 0 ? policy.strat_paths : n_paths;
}

}  // namespace

bool stratification_supported(const RiskModel& model) {
  return model.dependence_case == RiskModel::Case::Case1 &&
         model.claim_plan.mode() == DependencePlan::Mode::IID;
}

std::vector<std::vector<CellEstimate>> exceedance_grid(
    const RiskModel& model, PathTarget target, std::span<const double> t_grid,
    const std::vector<std::vector<double>>& x_grids, std::uint64_t n_paths,
    std::uint64_t seed, const RunPolicy& policy) {
  if (t_grid.size() != x_grids.size())
    throw std::invalid_argument("exceedance_grid: one x grid per t required");
  auto cells = crude_grid(model, target, t_grid, x_grids, n_paths, seed,
                          policy, /*random_horizon=*/false);
  if (policy.allow_stratified && stratification_supported(model)) {
    for (auto& row : cells) {
      for (auto& cell : row) {
        if (!cell.estimate.insufficient_hits) continue;
        cell.estimate = stratified_impl(model, target, cell.x, cell.t,
                                        /*random_horizon=*/false,
                                        strat_path_count(n_paths, policy),
                                        seed, policy);
      }
    }
  }
  return cells;
}

SimEstimate ruin_prob_finite(const RiskModel& model, double x, double t,
                             std::uint64_t n_paths, std::uint64_t seed,
                             const RunPolicy& policy) {
  if (!(x >= 0.0)) throw std::domain_error("ruin_prob_finite: x must be >= 0");
  if (!(t >= 0.0)) throw std::domain_error("ruin_prob_finite: t must be >= 0");
  model.validate();
  const std::vector<double> ts{t};
  const std::vector<std::vector<double>> xs{{x}};
  auto cells = exceedance_grid(model, PathTarget::RuinRunningMax, ts, xs,
                               n_paths, seed, policy);
  return cells[0][0].estimate;
}

SimEstimate ruin_prob_random_time(const RiskModel& model, double x,
                                  std::uint64_t n_paths, std::uint64_t seed,
                                  const RunPolicy& policy) {
  if (!(x >= 0.0))
    throw std::domain_error("ruin_prob_random_time: x must be >= 0");
  if (!model.random_time)
    throw std::domain_error("ruin_prob_random_time: model has no random time");
  model.validate();
  const std::vector<std::vector<double>> xs{{x}};
  auto cells = crude_grid(model, PathTarget::RuinRunningMax, {}, xs, n_paths,
                          seed, policy, /*random_horizon=*/true);
  SimEstimate est = cells[0][0].estimate;
  if (est.insufficient_hits && policy.allow_stratified &&
      stratification_supported(model)) {
    est = stratified_impl(model, PathTarget::RuinRunningMax, x, 0.0,
                          /*random_horizon=*/true,
                          strat_path_count(n_paths, policy), seed, policy);
  }
  return est;
}

SimEstimate net_loss_exceed(const RiskModel& model, double x, double t,
                            std::uint64_t n_paths, std::uint64_t seed,
                            const RunPolicy& policy) {
  if (!(t >= 0.0)) throw std::domain_error("net_loss_exceed: t must be >= 0");
  model.validate();
  const std::vector<double> ts{t};
  const std::vector<std::vector<double>> xs{{x}};
  auto cells = exceedance_grid(model, PathTarget::NetLossLast, ts, xs,
                               n_paths, seed, policy);
  return cells[0][0].estimate;
}

SimEstimate total_claims_exceed(const RiskModel& model, double x, double t,
                                std::uint64_t n_paths, std::uint64_t seed,
                                const RunPolicy& policy) {
  if (!(t >= 0.0))
    throw std::domain_error("total_claims_exceed: t must be >= 0");
  model.validate();
  const std::vector<double> ts{t};
  const std::vector<std::vector<double>> xs{{x}};
  auto cells = exceedance_grid(model, PathTarget::TotalClaims, ts, xs,
                               n_paths, seed, policy);
  return cells[0][0].estimate;
}

SimEstimate big_jump_stratified(const RiskModel& model, PathTarget target,
                                double x, double t, std::uint64_t n_paths,
                                std::uint64_t seed, const RunPolicy& policy) {
  if (!(x > 0.0))
    throw std::domain_error("big_jump_stratified: x must be > 0");
  model.validate();
  if (!stratification_supported(model)) {
    const std::vector<double> ts{t};
    const std::vector<std::vector<double>> xs{{x}};
    auto cells = crude_grid(model, target, ts, xs, n_paths, seed, policy,
                            /*random_horizon=*/false);
    return cells[0][0].estimate;
  }
  return stratified_impl(model, target, x, t, /*random_horizon=*/false,
                         n_paths, seed, policy);
}

SimEstimate big_jump_stratified_random_time(const RiskModel& model, double x,
                                            std::uint64_t n_paths,
                                            std::uint64_t seed,
                                            const RunPolicy& policy) {
  if (!model.random_time)
    throw std::domain_error(
        "big_jump_stratified_random_time: model has no random time");
  model.validate();
  if (!stratification_supported(model)) {
    const std::vector<std::vector<double>> xs{{x}};
    auto cells = crude_grid(model, PathTarget::RuinRunningMax, {}, xs,
                            n_paths, seed, policy, /*random_horizon=*/true);
    return cells[0][0].estimate;
  }
  return stratified_impl(model, PathTarget::RuinRunningMax, x, 0.0,
                         /*random_horizon=*/true, n_paths, seed, policy);
}

StoplossMeanResult stoploss_mean(const RiskModel& model, double t,
                                 std::uint64_t n_paths, std::uint64_t seed,
                                 const RunPolicy& policy) {
  if (!(t > 0.0)) throw std::domain_error("stoploss_mean: t must be > 0");
  model.validate(/*reinsurance_requested=*/model.q2 > 0.0);
  const double mu0 = model.mu0();
  if (!(mu0 > 0.0)) throw std::domain_error("stoploss_mean: mu0 must be > 0");
  const double mu_h = model.mu_gaps();
  const double k_ret = model.stop_loss_k;

  StoplossMeanResult out;
  out.retention_gate_ok =
      model.q2 == 0.0 ||
      k_ret > model.q1 * mu_h * model.mu_claims() / mu0;

  const std::uint64_t n_blocks =
      (n_paths + kDefaultBlock - 1) / kDefaultBlock;
  MeanAccumulator acc;
  acc.init(n_blocks);
  std::vector<double> cubes(n_blocks, 0.0), quads(n_blocks, 0.0);
  const double scale = mu0 * t / mu_h;
  const std::vector<double> ts{t};

  for_each_block(n_paths, kDefaultBlock, policy.threads,
                 [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
                   double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
                   std::vector<PathAggregates> agg(1);
                   for (std::uint64_t p = begin; p < end; ++p) {
                     walk_path(model, seed, p, ts,
                               std::span<PathAggregates>(agg));
                     const double v =
                         std::max(agg[0].weighted_net / scale - k_ret, 0.0);
                     s1 += v;
                     s2 += v * v;
                     s3 += v * v * v;
                     s4 += v * v * v * v;
                   }
                   acc.sums[b] = s1;
                   acc.sq_sums[b] = s2;
                   cubes[b] = s3;
                   quads[b] = s4;
                 });
  out.estimate =
      finish_mean(acc, n_paths, seed, SimEstimate::Method::Crude);
  const double n = static_cast<double>(n_paths);
  const double m1 = out.estimate.value;
  const double m2 = pairwise_sum(acc.sq_sums) / n;
  const double m3 = pairwise_sum(cubes) / n;
  const double m4 = pairwise_sum(quads) / n;
  const double var = std::max(m2 - m1 * m1, 0.0);
  if (var > 0.0) {
    const double c4 =
        m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1 * m1 - 3.0 * m1 * m1 * m1 * m1;
    out.kurtosis = c4 / (var * var);
    out.estimate.high_variance = out.kurtosis > 1e4;
  }
  return out;
}

double nagaev_bound(std::uint64_t n, double x, double v, double m_bound,
                    double mu, const TailModel& claims) {
  if (!(x > 0.0) || !(v > 0.0))
    throw std::domain_error("nagaev_bound: x and v must be positive");
  const double nn = static_cast<double>(n);
  return nn * claims.tail(x / v) +
         m_bound * std::pow(std::exp(1.0) * mu * nn / x, v);
}

LdeOracleReport lde_sum_oracle(const TailModel& claims,
                               const DependencePlan& plan, std::uint64_t n,
                               double gamma, std::span<const double> x_grid,
                               std::uint64_t reps, std::uint64_t seed,
                               const RunPolicy& policy) {
  const double mu = claims.mean();
  if (!(gamma > mu))
    throw std::domain_error("lde_sum_oracle: gamma must exceed the mean");
  LdeOracleReport rep;
  rep.n = n;
  std::vector<double> xs;
  for (double x : x_grid) {
    if (x < gamma * static_cast<double>(n) * (1.0 - 1e-12))
      throw std::domain_error("lde_sum_oracle: grid must satisfy x >= gamma n");
    xs.push_back(x);
  }

  const std::uint64_t n_blocks = (reps + kDefaultBlock - 1) / kDefaultBlock;
  std::vector<std::vector<std::uint64_t>> hits(
      xs.size(), std::vector<std::uint64_t>(n_blocks, 0));
  for_each_block(reps, kDefaultBlock, policy.threads,
                 [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
                   for (std::uint64_t p = begin; p < end; ++p) {
                     ChunkedSequence ys(claims, plan, seed, p,
                                        Substream::Claims);
                     double s = 0.0;
                     for (std::uint64_t i = 0; i < n; ++i)
                       s += ys.at(static_cast<std::size_t>(i));
                     for (std::size_t xi = 0; xi < xs.size(); ++xi)
                       if (s > xs[xi]) ++hits[xi][b];
                   }
                 });

  for (std::size_t xi = 0; xi < xs.size(); ++xi) {
    LdeRatioRow row;
    row.x = xs[xi];
    const std::uint64_t h = std::accumulate(
        hits[xi].begin(), hits[xi].end(), std::uint64_t{0});
    row.estimate =
        SimEstimate::proportion(h, reps, seed, SimEstimate::Method::Crude);
    row.estimate.insufficient_hits = h < policy.min_hits;
    if (row.estimate.insufficient_hits && policy.allow_stratified &&
        plan.mode() == DependencePlan::Mode::IID) {
      // Fixed-n sum as a degenerate path: unit gaps, horizon n.
      RiskModel sum_model{.claims = claims,
                          .inter_arrivals = TailModel::point(1.0)};
      sum_model.premium_rate = 1e-30;  // negligible premium; target TotalClaims
      sum_model.claim_plan = DependencePlan::iid();
      sum_model.arrival_plan = DependencePlan::iid();
      row.estimate = stratified_impl(
          sum_model, PathTarget::TotalClaims, row.x,
          static_cast<double>(n) + 0.5, /*random_horizon=*/false,
          strat_path_count(reps, policy), seed, policy);
    }
    row.reference =
        static_cast<double>(n) *
        claims.tail(row.x - mu * static_cast<double>(n));
    row.ratio = row.reference > 0.0 ? row.estimate.value / row.reference : 0.0;
    rep.rows.push_back(std::move(row));
  }
  double sup = 0.0;
  std::size_t starved = 0;
  for (const auto& row : rep.rows) {
    if (row.estimate.insufficient_hits) {
      ++starved;
      continue;
    }
    sup = std::max(sup, std::abs(row.ratio - 1.0));
  }
  rep.sup_abs_dev = sup;
  rep.starved = starved;
  return rep;
}

}  // namespace ruinld
