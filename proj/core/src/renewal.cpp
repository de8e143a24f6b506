#include "ruinld/renewal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "ruinld/parallel.hpp"

namespace ruinld {

ArrivalPath ArrivalPath::from_inter_arrivals(std::vector<double> gaps,
                                             double horizon) {
  ArrivalPath p;
  p.inter_arrivals = std::move(gaps);
  p.cum_times.reserve(p.inter_arrivals.size());
  double acc = 0.0;
  for (double g : p.inter_arrivals) {
    if (!(g >= 0.0))
      throw std::invalid_argument("inter-arrival times must be >= 0");
    acc += g;
    p.cum_times.push_back(acc);
  }
  p.horizon = horizon;
  return p;
}

std::int64_t count(const ArrivalPath& path, double t) {
  if (!(t >= 0.0)) throw std::domain_error("count: t must be >= 0");
  const auto it = std::upper_bound(path.cum_times.begin(),
                                   path.cum_times.end(), t);
  return static_cast<std::int64_t>(it - path.cum_times.begin());
}

double ArrivalGenerator::gap(std::size_t i) { return gaps_.at(i); }

double ArrivalGenerator::arrival_time(std::size_t i) {
  while (i >= cum_.size()) {
    const double prev = cum_.empty() ? 0.0 : cum_.back();
    cum_.push_back(prev + gaps_.at(cum_.size()));
  }
  return cum_[i];
}

std::int64_t ArrivalGenerator::count_up_to(double t) {
  if (!(t >= 0.0)) throw std::domain_error("count_up_to: t must be >= 0");
  while (cum_.empty() || cum_.back() <= t) {
    // A degenerate all-zero gap law would never cross t; refuse to spin.
    if (cum_.size() > (1u << 24))
      throw std::runtime_error("arrival path failed to reach horizon");
    const double prev = cum_.empty() ? 0.0 : cum_.back();
    cum_.push_back(prev + gaps_.at(cum_.size()));
  }
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), t);
  return static_cast<std::int64_t>(it - cum_.begin());
}

SimEstimate renewal_moments(const TailModel& law, const DependencePlan& plan,
                            double t, int k, std::uint64_t reps,
                            std::uint64_t seed, int threads) {
  if (k < 1 || k > 3)
    throw std::invalid_argument("renewal_moments: k must be 1, 2 or 3");
  const double norm = std::pow(t / law.mean(), k);

  const std::uint64_t n_blocks = (reps + kDefaultBlock - 1) / kDefaultBlock;
  std::vector<double> sums(n_blocks, 0.0), sq_sums(n_blocks, 0.0);
  for_each_block(reps, kDefaultBlock, threads,
                 [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
                   double acc = 0.0, acc2 = 0.0;
                   for (std::uint64_t p = begin; p < end; ++p) {
                     ArrivalGenerator gen(law, plan, seed, p);
                     const double nk =
                         std::pow(static_cast<double>(gen.count_up_to(t)),
                                  static_cast<double>(k));
                     acc += nk;
                     acc2 += nk * nk;
                   }
                   sums[b] = acc;
                   sq_sums[b] = acc2;
                 });
  const double mean_nk = pairwise_sum(sums) / static_cast<double>(reps);
  const double mean_sq = pairwise_sum(sq_sums) / static_cast<double>(reps);
  const double var = std::max(0.0, mean_sq - mean_nk * mean_nk);

  SimEstimate e;
  e.n_paths = reps;
  e.seed = seed;
  e.value = mean_nk / norm;
  e.stderr_ = std::sqrt(var / static_cast<double>(reps)) / norm;
  e.ci95 = {e.value - 1.96 * e.stderr_, e.value + 1.96 * e.stderr_};
  return e;
}

SllnReport slln_check(const TailModel& law, const DependencePlan& plan,
                      std::span<const double> t_grid, std::uint64_t paths,
                      std::uint64_t seed, double eps, int threads) {
  SllnReport rep;
  rep.eps = eps;
  rep.t_grid.assign(t_grid.begin(), t_grid.end());
  const double mu = law.mean();
  const std::size_t nt = rep.t_grid.size();
  const double t_max = *std::max_element(rep.t_grid.begin(), rep.t_grid.end());

  std::vector<std::vector<double>> in_band(nt), ratio_sum(nt);
  const std::uint64_t n_blocks = (paths + kDefaultBlock - 1) / kDefaultBlock;
  for (auto& v : in_band) v.assign(n_blocks, 0.0);
  for (auto& v : ratio_sum) v.assign(n_blocks, 0.0);

  for_each_block(paths, kDefaultBlock, threads,
                 [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
                   for (std::uint64_t p = begin; p < end; ++p) {
                     ArrivalGenerator gen(law, plan, seed, p);
                     gen.count_up_to(t_max);  // extend once
                     for (std::size_t j = 0; j < nt; ++j) {
                       const double t = rep.t_grid[j];
                       const double r =
                           static_cast<double>(gen.count_up_to(t)) * mu / t;
                       ratio_sum[j][b] += r;
                       if (std::abs(r - 1.0) <= eps) in_band[j][b] += 1.0;
                     }
                   }
                 });
  for (std::size_t j = 0; j < nt; ++j) {
    rep.fraction_in_band.push_back(pairwise_sum(in_band[j]) /
                                   static_cast<double>(paths));
    rep.mean_ratio.push_back(pairwise_sum(ratio_sum[j]) /
                             static_cast<double>(paths));
  }
  return rep;
}

ExpMomentTrace exp_moment_tail(const TailModel& law,
                               const DependencePlan& plan, double r,
                               double delta, std::span<const double> t_grid,
                               std::uint64_t paths, std::uint64_t seed,
                               int threads) {
  if (!(r >= 0.0)) throw std::invalid_argument("exp_moment_tail: r >= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("exp_moment_tail: delta > 0");
  ExpMomentTrace out;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  const double mu = law.mean();
  const std::size_t nt = out.t_grid.size();
  const double t_max =
      *std::max_element(out.t_grid.begin(), out.t_grid.end());

  std::vector<std::vector<double>> sums(nt);
  const std::uint64_t n_blocks = (paths + kDefaultBlock - 1) / kDefaultBlock;
  for (auto& v : sums) v.assign(n_blocks, 0.0);
  std::atomic<bool> overflow{false};

  for_each_block(paths, kDefaultBlock, threads,
                 [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
                   for (std::uint64_t p = begin; p < end; ++p) {
                     ArrivalGenerator gen(law, plan, seed, p);
                     gen.count_up_to(t_max);
                     for (std::size_t j = 0; j < nt; ++j) {
                       const double t = out.t_grid[j];
                       const double n =
                           static_cast<double>(gen.count_up_to(t));
                       if (n > (1.0 + delta) * t / mu) {
                         const double log_w = r * n;
                         if (log_w > 700.0) {
                           overflow.store(true, std::memory_order_relaxed);
                           sums[j][b] += std::exp(700.0);
                         } else {
                           sums[j][b] += std::exp(log_w);
                         }
                       }
                     }
                   }
                 });
  for (std::size_t j = 0; j < nt; ++j)
    out.trace.push_back(pairwise_sum(sums[j]) / static_cast<double>(paths));
  out.overflowed = overflow.load();
  out.monotone_nonincreasing = true;
  for (std::size_t j = 1; j < out.trace.size(); ++j)
    if (out.trace[j] > out.trace[j - 1]) out.monotone_nonincreasing = false;
  return out;
}

}  // namespace ruinld
