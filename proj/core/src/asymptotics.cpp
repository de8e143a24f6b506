#include "ruinld/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ruinld {

namespace {

AsymptoticReport invalid_report(double kernel_argument, std::string why) {
  AsymptoticReport r;
  r.kernel_argument = kernel_argument;
  r.valid = false;
  r.violated.push_back(std::move(why));
  return r;
}

AsymptoticReport kernel_report(const TailModel& claims, double prefactor,
                               double argument) {
  if (prefactor == 0.0) {
    AsymptoticReport r;
    r.kernel_argument = argument;
    r.value = 0.0;
    return r;
  }
  if (!(argument > 0.0))
    return invalid_report(argument, "kernel argument must be positive");
  AsymptoticReport r;
  r.kernel_argument = argument;
  r.value = prefactor * claims.tail(argument);
  return r;
}

}  // namespace

double lower_ratio_at(const TailModel& model, double y) {
  if (!(y >= 1.0))
    throw std::domain_error("lower_ratio_at: y must be >= 1");
  if (y == 1.0) return 1.0;
  if (model.tags().reg_varying) {
    const double idx = moment_index(model);
    return std::pow(y, -idx);
  }
  const std::vector<double> grid{y};
  return limit_ratios(model, grid).lower_ratio.front();
}

AsymptoticReport psi_kernel(const RiskModel& model, double x, double t,
                            Centering centering) {
  if (!(t >= 0.0)) throw std::domain_error("psi_kernel: t must be >= 0");
  const double mu_h = model.mu_gaps();
  const double mu_center = centering == Centering::MuClaims
                               ? model.mu_claims()
                               : mean_max_claim_income(model);
  const double arg =
      x - mu_center * t / mu_h + model.premium_rate * t;
  return kernel_report(model.claims, t / mu_h, arg);
}

TheoremConstants theorem_constants(const RiskModel& model, double gamma) {
  const double mu_g = model.mu_claims();
  const double mu_h = model.mu_gaps();
  const double c = model.premium_rate;
  const double mu_g2 = mean_max_claim_income(model);
  const double threshold =
      std::max({1.0, mu_g, mu_g / mu_h});
  if (!(gamma > threshold))
    throw std::domain_error(
        "theorem_constants: gamma must exceed max(1, mu_claims, "
        "mu_claims/mu_gaps)");

  const double denom_a = gamma - mu_g2 / mu_h + c;
  if (!(denom_a > 0.0))
    throw std::domain_error("theorem_constants: max-centered denominator <= 0");
  TheoremConstants k;
  k.a = lower_ratio_at(model.claims,
                       1.0 + (mu_g2 - mu_g) / mu_h / denom_a);
  const double b1 =
      lower_ratio_at(model.claims,
                     1.0 + (mu_g2 - mu_g) / mu_h / (gamma - mu_g / mu_h + c));
  const double b2 = lower_ratio_at(
      model.claims, 1.0 + 1.0 / (gamma - 1.0 + c - mu_g / mu_h));
  k.b = std::max(b1, b2);
  k.d = lower_ratio_at(model.claims, 1.0 + c / (gamma - mu_g / mu_h));
  return k;
}

AsymptoticReport random_time_asymptote(const RiskModel& model, double x,
                                       double expected_count) {
  if (!(x >= 0.0))
    throw std::domain_error("random_time_asymptote: x must be >= 0");
  if (!(expected_count >= 0.0))
    throw std::domain_error("random_time_asymptote: count must be >= 0");
  AsymptoticReport r;
  r.kernel_argument = x;
  if (model.random_time) {
    const auto dom = tail_dominance(*model.random_time, model.claims);
    if (!dom.holds) {
      r.valid = false;
      r.violated.push_back("random-time tail is not dominated by claim tail");
      return r;
    }
  }
  r.value = x > 0.0 ? expected_count * model.claims.tail(x)
                    : expected_count;
  return r;
}

AsymptoticReport total_claims_asymptote(const RiskModel& model, double x,
                                        double t) {
  if (!(t >= 0.0))
    throw std::domain_error("total_claims_asymptote: t must be >= 0");
  const double mu_h = model.mu_gaps();
  const double arg = x - model.mu_claims() * t / mu_h;
  return kernel_report(model.claims, t / mu_h, arg);
}

AsymptoticReport proportional_asymptote(const RiskModel& model, double x,
                                        double t) {
  if (!(t >= 0.0))
    throw std::domain_error("proportional_asymptote: t must be >= 0");
  const double mu_h = model.mu_gaps();
  const double arg = x / model.q1 - model.mu_claims() * t / mu_h +
                     model.q2 * model.premium_rate * t / model.q1;
  return kernel_report(model.claims, t / mu_h, arg);
}

AsymptoticReport excess_asymptote(const RiskModel& model, double x, double t) {
  if (!(t >= 0.0))
    throw std::domain_error("excess_asymptote: t must be >= 0");
  const double mu_h = model.mu_gaps();
  const double mu_excess =
      mean_excess_claim(model.claims, model.deductible);
  const double arg = x + model.deductible - mu_excess * t / mu_h +
                     model.q2 * model.premium_rate * t;
  return kernel_report(model.claims, t / mu_h, arg);
}

AsymptoticReport stoploss_asymptote(const RiskModel& model, double t) {
  if (!(t > 0.0))
    throw std::domain_error("stoploss_asymptote: t must be > 0");
  const double mu0 = model.mu0();
  const double mu_g = model.mu_claims();
  const double mu_h = model.mu_gaps();
  if (!(mu0 > 0.0)) return invalid_report(0.0, "mu0 must be positive");
  if (model.q2 > 0.0 &&
      !(model.stop_loss_k > model.q1 * mu_h * mu_g / mu0))
    return invalid_report(0.0, "retention K below the q2>0 threshold");
  const double arg = mu0 * model.stop_loss_k * t / (model.q1 * mu_h) -
                     mu_g * t / mu_h +
                     model.q2 * model.premium_rate * t / model.q1;
  if (!(arg > 0.0))
    return invalid_report(arg, "kernel argument must be positive");
  AsymptoticReport r;
  r.kernel_argument = arg;
  r.value =
      model.q1 / mu0 * mu_g * integral_tail(model.claims, arg);
  return r;
}

Example41Triplet example41_equivalents(const RiskModel& model, double t) {
  if (model.claims.family() != TailModel::Family::LogPareto)
    throw std::domain_error(
        "example41_equivalents: claims must be the log-corrected index-1 law");
  if (!(t > 1.0))
    throw std::domain_error("example41_equivalents: t must exceed 1");
  const double mu0 = model.mu0();
  const double mu_g = model.mu_claims();
  const double mu_h = model.mu_gaps();
  const double slope = mu0 * model.stop_loss_k / (model.q1 * mu_h) -
                       mu_g / mu_h +
                       model.q2 * model.premium_rate / model.q1;
  if (!(slope > 0.0))
    throw std::domain_error("example41_equivalents: argument slope <= 0");

  Example41Triplet out;
  const AsymptoticReport exact = stoploss_asymptote(model, t);
  out.exact_integral_form = exact.value;
  out.log_closed_form = model.q1 / mu0 / std::log(slope * t);
  out.scaled_form =
      model.q1 / mu0 * model.claims.tail(t) * t * std::log(t);
  return out;
}

GateReport validity(const RiskModel& model, double gamma, double Gamma,
                    std::string_view theorem_id) {
  GateReport rep;
  auto check = [&](bool ok, const std::string& what) {
    rep.checked.push_back(what);
    if (!ok) rep.violated.push_back(what);
  };
  const double mu_g = model.mu_claims();
  const double mu_h = model.mu_gaps();
  const double c = model.premium_rate;
  const std::string id(theorem_id);

  const bool needs_load = id != "thm4.3" || model.q2 == 0.0;
  if (needs_load)
    check(mu_g < c * mu_h, "safety load mu_claims < c mu_gaps");

  auto check_dominance = [&] {
    const auto dom = tail_dominance(model.inter_arrivals, model.claims);
    check(dom.holds, "gap tail dominated by claim tail");
  };

  if (id == "thm1.1") {
    check(gamma > std::max(1.0, mu_g), "gamma > max(1, mu_claims)");
    check_dominance();
  } else if (id == "thm1.1-wide") {
    check(gamma > 0.0, "gamma > 0");
    check_dominance();
  } else if (id == "thm1.2") {
    check(gamma > std::max(mu_g, mu_g / mu_h),
          "gamma > max(mu_claims, mu_claims/mu_gaps)");
    check(gamma < Gamma && std::isfinite(Gamma), "gamma < Gamma < inf");
    check_dominance();
  } else if (id == "thm1.3") {
    check(gamma > mu_g, "gamma > mu_claims");
    if (model.dependence_case == RiskModel::Case::Case2)
      check(gamma < Gamma && std::isfinite(Gamma), "gamma < Gamma < inf");
    check_dominance();
  } else if (id == "cor1.1") {
    check(gamma > mu_g, "gamma > mu_claims");
    check(gamma < Gamma && std::isfinite(Gamma), "gamma < Gamma < inf");
  } else if (id == "thm1.5") {
    check(model.random_time.has_value(), "random horizon configured");
    if (model.random_time) {
      check(model.random_time->finite_mean(), "finite mean random horizon");
      const auto dom = tail_dominance(*model.random_time, model.claims);
      check(dom.holds, "random-time tail dominated by claim tail");
    }
    check_dominance();
  } else if (id == "thm4.1") {
    check(gamma > model.q1 * mu_g, "gamma > q1 mu_claims");
    if (model.q2 > 0.0)
      check(model.q1 * mu_g < model.q2 * c * mu_h,
            "generalized load q1 mu_claims < q2 c mu_gaps");
    check_dominance();
  } else if (id == "thm4.2") {
    const double mu_excess =
        mean_excess_claim(model.claims, model.deductible);
    check(gamma > mu_excess, "gamma > mean excess claim");
    check_dominance();
  } else if (id == "thm4.3") {
    const double mu0 = model.mu0();
    check(mu0 > 0.0, "mu0 > 0");
    check(model.q2 == 0.0 ||
              model.stop_loss_k > model.q1 * mu_h * mu_g / mu0,
          "q2 == 0 or K above retention threshold");
    check_dominance();
  } else {
    rep.checked.push_back("known theorem id");
    rep.violated.push_back("unknown theorem id: " + id);
  }
  rep.pass = rep.violated.empty();
  return rep;
}

}  // namespace ruinld
