#include "ruinld/processes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "ruinld/renewal.hpp"

namespace ruinld {

double RiskModel::mu0() const {
  if (mu0_literal_paper)
    return std::abs(q2 * mu_gaps() - q1 * premium_rate * mu_claims());
  return std::abs(q2 * premium_rate * mu_gaps() - q1 * mu_claims());
}

void RiskModel::validate(bool reinsurance_requested) const {
  if (!claims.finite_mean())
    throw std::domain_error("risk model: claim law must have a finite mean");
  if (!(inter_arrivals.mean() > 0.0))
    throw std::domain_error("risk model: mean inter-arrival must be positive");
  if (!(premium_rate > 0.0))
    throw std::domain_error("risk model: premium rate must be positive");
  if (!(mu_claims() < premium_rate * mu_gaps()))
    throw std::domain_error(
        "risk model: safety load requires mu_claims < c * mu_gaps");
  if (!(q1 > 0.0 && q1 <= 1.0))
    throw std::domain_error("risk model: q1 must lie in (0, 1]");
  if (!(q2 >= 0.0 && q2 <= 1.0))
    throw std::domain_error("risk model: q2 must lie in [0, 1]");
  if (reinsurance_requested && q2 > 0.0 &&
      !(q1 * mu_claims() < q2 * premium_rate * mu_gaps()))
    throw std::domain_error(
        "risk model: generalized load requires q1 mu_claims < q2 c mu_gaps");
  if (dependence_case == Case::Case2 &&
      pair_plan.mode() != DependencePlan::Mode::PairCopula)
    throw std::domain_error("risk model: Case 2 requires a pair-copula plan");
}

nlohmann::json RiskModel::descriptor() const {
  nlohmann::json j;
  j["claims"] = claims.descriptor();
  j["inter_arrivals"] = inter_arrivals.descriptor();
  j["premium_rate"] = premium_rate;
  j["case"] = dependence_case == Case::Case1 ? "case1" : "case2";
  j["claims_plan"] = claim_plan.descriptor();
  j["arrivals_plan"] = arrival_plan.descriptor();
  j["pair_plan"] = pair_plan.descriptor();
  j["q1"] = q1;
  j["q2"] = q2;
  j["deductible"] = deductible;
  j["stop_loss_k"] = stop_loss_k;
  if (random_time) j["random_time"] = random_time->descriptor();
  if (mu0_literal_paper) j["mu0_literal_paper"] = true;
  return j;
}

RiskModel RiskModel::from_descriptor(const nlohmann::json& j) {
  RiskModel m{.claims = TailModel::from_descriptor(j.at("claims")),
              .inter_arrivals =
                  TailModel::from_descriptor(j.at("inter_arrivals"))};
  m.premium_rate = j.at("premium_rate").get<double>();
  if (j.contains("case"))
    m.dependence_case =
        j.at("case").get<std::string>() == "case2" ? Case::Case2 : Case::Case1;
  if (j.contains("claims_plan"))
    m.claim_plan = DependencePlan::from_descriptor(j.at("claims_plan"));
  if (j.contains("arrivals_plan"))
    m.arrival_plan = DependencePlan::from_descriptor(j.at("arrivals_plan"));
  if (j.contains("pair_plan"))
    m.pair_plan = DependencePlan::from_descriptor(j.at("pair_plan"));
  m.q1 = j.value("q1", 1.0);
  m.q2 = j.value("q2", 1.0);
  m.deductible = j.value("deductible", 0.0);
  m.stop_loss_k = j.value("stop_loss_k", 1.0);
  if (j.contains("random_time"))
    m.random_time = TailModel::from_descriptor(j.at("random_time"));
  m.mu0_literal_paper = j.value("mu0_literal_paper", false);
  return m;
}

std::vector<double> net_loss_partial_sums(std::span<const double> claims,
                                          std::span<const double> gaps,
                                          double premium_rate, std::size_t n) {
  if (claims.size() < n || gaps.size() < n)
    throw std::invalid_argument("net_loss_partial_sums: paths shorter than n");
  std::vector<double> out;
  out.reserve(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += claims[i] - premium_rate * gaps[i];
    out.push_back(acc);
  }
  return out;
}

PathAggregates accumulate_path(std::span<const double> claims,
                               std::span<const double> gaps, std::size_t n,
                               const ProcessParams& params) {
  if (claims.size() < n || gaps.size() < n)
    throw std::invalid_argument("accumulate_path: paths shorter than n");
  PathAggregates agg;
  for (std::size_t i = 0; i < n; ++i)
    add_claim(agg, claims[i], gaps[i], params);
  return agg;
}

namespace {

std::size_t claims_by(std::span<const double> gaps, double t) {
  double acc = 0.0;
  std::size_t n = 0;
  for (double g : gaps) {
    acc += g;
    if (acc > t) break;
    ++n;
  }
  return n;
}

}  // namespace

double running_max_net_loss(std::span<const double> claims,
                            std::span<const double> gaps, double premium_rate,
                            double t) {
  const std::size_t n = claims_by(gaps, t);
  return accumulate_path(claims, gaps, n, {.premium_rate = premium_rate})
      .max_net_loss;
}

double total_claims(std::span<const double> claims,
                    std::span<const double> gaps, double t) {
  const std::size_t n = claims_by(gaps, t);
  return accumulate_path(claims, gaps, n, {}).sum_claims;
}

double proportional_net_loss(std::span<const double> claims,
                             std::span<const double> gaps, double t, double q1,
                             double q2, double premium_rate) {
  const std::size_t n = claims_by(gaps, t);
  return accumulate_path(claims, gaps, n,
                         {.premium_rate = premium_rate, .q1 = q1, .q2 = q2})
      .weighted_net;
}

double excess_of_net_loss(std::span<const double> claims,
                          std::span<const double> gaps, double t, double D,
                          double q2, double premium_rate) {
  const std::size_t n = claims_by(gaps, t);
  return accumulate_path(
             claims, gaps, n,
             {.premium_rate = premium_rate, .q2 = q2, .deductible = D})
      .excess_net;
}

double stop_net_loss(std::span<const double> claims,
                     std::span<const double> gaps, double t, double q1,
                     double q2, double premium_rate, double k_retention,
                     double mu0, double mu_gaps) {
  if (!(mu0 > 0.0)) throw std::domain_error("stop_net_loss: mu0 must be > 0");
  if (!(t > 0.0)) throw std::domain_error("stop_net_loss: t must be > 0");
  const std::size_t n = claims_by(gaps, t);
  const double w =
      accumulate_path(claims, gaps, n,
                      {.premium_rate = premium_rate, .q1 = q1, .q2 = q2})
          .weighted_net;
  return std::max(w / (mu0 * t / mu_gaps) - k_retention, 0.0);
}

double mean_excess_claim(const TailModel& claims, double deductible) {
  if (!(deductible >= 0.0))
    throw std::domain_error("mean_excess_claim: deductible must be >= 0");
  return quadrature::tail_integral(claims, deductible);
}

double mean_max_claim_income(const RiskModel& model) {
  const TailModel& g = model.claims;
  const TailModel& h = model.inter_arrivals;
  const double c = model.premium_rate;
  using PC = DependencePlan::PairCoupling;

  PC coupling = PC::Independent;
  if (model.dependence_case == RiskModel::Case::Case2)
    coupling = model.pair_plan.coupling();

  auto joint_tail = [&](double u) -> double {
    // P(max(Y, cZ) > u) under the configured intra-pair coupling.
    double tz = 0.0;
    try {
      tz = h.tail(u / c);
    } catch (const TailRangeError&) {
      tz = 0.0;
    }
    const double ty = g.tail(u);
    switch (coupling) {
      case PC::Independent:
        return ty + tz - ty * tz;
      case PC::Comonotone:
        return std::max(ty, tz);
      case PC::Countermonotone:
        return std::min(1.0, ty + tz);
      case PC::Gaussian:
        return -1.0;  // no closed form; caller falls back to MC
    }
    return ty + tz - ty * tz;
  };
  if (coupling == PC::Gaussian) {
    RiskModel probe = model;
    return aux_moments(probe, 400000, 9041).mu_max;
  }
  namespace bq = boost::math::quadrature;
  const double split =
      std::max(g.quantile_from_tail(1e-12),
               c * h.quantile_from_tail(1e-12));
  const double near = bq::gauss_kronrod<double, 31>::integrate(
      joint_tail, 0.0, split, 12, 1e-8);
  bq::exp_sinh<double> integrator;
  const double far = integrator.integrate(
      joint_tail, split, std::numeric_limits<double>::infinity(), 1e-8);
  return near + far;
}

AuxLawMoments aux_moments(const RiskModel& model, std::uint64_t reps,
                          std::uint64_t seed) {
  AuxLawMoments out;
  out.exact_mu_sum =
      model.mu_claims() + model.premium_rate * model.mu_gaps();
  out.mu0 = model.mu0();

  OnlineMoments acc_sum, acc_max, acc_excess;
  const double c = model.premium_rate;

  if (model.dependence_case == RiskModel::Case::Case2) {
    RngStream rng = RngStream::derive(seed, 0,
                                      static_cast<std::uint64_t>(
                                          Substream::Claims));
    std::vector<std::pair<double, double>> buf(1024);
    std::uint64_t done = 0;
    while (done < reps) {
      const std::size_t take =
          static_cast<std::size_t>(std::min<std::uint64_t>(reps - done,
                                                           buf.size()));
      fill_pairs(model.pair_plan, model.claims, model.inter_arrivals,
                 std::span(buf).first(take), rng);
      for (std::size_t i = 0; i < take; ++i) {
        const auto [y, z] = buf[i];
        acc_sum.add(y + c * z);
        acc_max.add(std::max(y, c * z));
        acc_excess.add(std::max(y - model.deductible, 0.0));
      }
      done += take;
    }
  } else {
    RngStream rng_y = RngStream::derive(
        seed, 0, static_cast<std::uint64_t>(Substream::Claims));
    RngStream rng_z = RngStream::derive(
        seed, 0, static_cast<std::uint64_t>(Substream::Arrivals));
    for (std::uint64_t i = 0; i < reps; ++i) {
      const double y = model.claims.sample(rng_y);
      const double z = model.inter_arrivals.sample(rng_z);
      acc_sum.add(y + c * z);
      acc_max.add(std::max(y, c * z));
      acc_excess.add(std::max(y - model.deductible, 0.0));
    }
  }
  out.mu_sum = acc_sum.mean();
  out.mu_max = acc_max.mean();
  out.mu_excess = acc_excess.mean();
  out.se_sum = acc_sum.stderr_of_mean();
  out.se_max = acc_max.stderr_of_mean();
  out.se_excess = acc_excess.stderr_of_mean();
  return out;
}

}  // namespace ruinld
