#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ruinld/processes.hpp"

namespace ruinld {

/// Constants bracketing the ruin-probability ratio bands: `a` lower-bounds
/// the max-centered ratio, `1/b` upper-bounds the mean-centered one, `1/d`
/// upper-bounds the banded two-sided form.
struct TheoremConstants {
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;
};

/// A closed-form asymptotic value with its kernel argument and validity
/// gating. `value` is meaningful only when `valid` is true (t = 0 yields a
/// valid zero).
struct AsymptoticReport {
  double value = 0.0;
  double kernel_argument = 0.0;
  std::optional<TheoremConstants> constants;
  bool valid = true;
  std::vector<std::string> violated;
};

/// Which drift constant centers the deviation kernel.
enum class Centering {
  MuClaims,  // mean claim size
  MuMax,     // mean of max(claim, premium income per gap)
};

/// Deviation kernel for the running-max ruin probability:
/// (t / mu_gaps) * tail(x - mu_center t / mu_gaps + c t).
AsymptoticReport psi_kernel(const RiskModel& model, double x, double t,
                            Centering centering = Centering::MuClaims);

/// Liminf tail-ratio functional at y >= 1: exact power form for
/// regularly-varying-tagged models, numeric limit proxy otherwise.
double lower_ratio_at(const TailModel& model, double y);

/// Band constants at a given gamma; gamma must exceed
/// max(1, mu_claims, mu_claims/mu_gaps).
TheoremConstants theorem_constants(const RiskModel& model, double gamma);

/// Random-horizon asymptote: expected_count * tail(x). Marks the report
/// invalid when the horizon's tail is not dominated by the claim tail.
AsymptoticReport random_time_asymptote(const RiskModel& model, double x,
                                       double expected_count);

/// (t / mu_gaps) * tail(x - mu_claims t / mu_gaps); the premium term drops.
AsymptoticReport total_claims_asymptote(const RiskModel& model, double x,
                                        double t);

/// (t / mu_gaps) * tail(x/q1 - mu_claims t / mu_gaps + q2 c t / q1).
AsymptoticReport proportional_asymptote(const RiskModel& model, double x,
                                        double t);

/// (t / mu_gaps) * tail(x + D - mu_excess t / mu_gaps + q2 c t).
AsymptoticReport excess_asymptote(const RiskModel& model, double x, double t);

/// Stop-loss mean asymptote via the integrated-tail law:
/// (q1 mu_claims / mu0) * integral_tail(K mu0 t / (q1 mu_gaps)
///                                      - mu_claims t / mu_gaps
///                                      + q2 c t / q1).
AsymptoticReport stoploss_asymptote(const RiskModel& model, double t);

/// The three asymptotically equivalent stop-loss expressions for the
/// index-1 log-corrected claim law; their pairwise ratios tend to 1.
struct Example41Triplet {
  double exact_integral_form = 0.0;
  double log_closed_form = 0.0;
  double scaled_form = 0.0;
};

Example41Triplet example41_equivalents(const RiskModel& model, double t);

struct GateReport {
  bool pass = false;
  std::vector<std::string> checked;
  std::vector<std::string> violated;
};

/// Validity gate for a named result bundle: gamma/Gamma thresholds, safety
/// loads and tail-dominance preconditions.
GateReport validity(const RiskModel& model, double gamma, double Gamma,
                    std::string_view theorem_id);

}  // namespace ruinld
