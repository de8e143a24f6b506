#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ruinld/asymptotics.hpp"
#include "ruinld/estimators.hpp"

namespace ruinld::harness {

/// A validity-gate violation; the CLI maps it to exit code 2.
struct GateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configuration / usage problem; the CLI maps it to exit code 64.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// How the x grid is built for each t: a band [gamma t, Gamma t], a ray
/// [gamma t, factor gamma t], or the wide regime [gamma t ln t, ...]. For the
/// random-horizon target gamma/Gamma are absolute x bounds.
struct XRule {
  enum class Kind { Band, Ray, Wide };
  Kind kind = Kind::Band;
  double gamma = 0.0;
  double Gamma = 0.0;
  int points = 20;
  double x_max_factor = 8.0;
};

enum class Target {
  PsiFinite,
  PsiRandomTime,
  NetLoss,
  TotalClaims,
  Proportional,
  Excess,
  StoplossMean,
  Lemma21Oracle,
  RenewalChecks,
  DependenceChecks,
};

Target target_from_string(const std::string& s);
std::string to_string(Target t);

struct ExperimentConfig {
  RiskModel model;
  Target target = Target::PsiFinite;
  std::vector<double> t_grid;  // horizons; claim counts for the sum oracle
  XRule x_rule;
  std::uint64_t n_paths = 100000;
  std::uint64_t seed = 1;
  int threads = 0;
  double tolerance = 0.35;  // final sup-deviation tolerance for the verdict
  std::string out_dir = "out";
  std::string format = "csv";  // csv | json (summary is always written)

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// One empirical/asymptote comparison cell.
struct RatioRow {
  double t = 0.0;
  double x = 0.0;
  SimEstimate empirical;
  double asymptote = 0.0;
  double ratio = 0.0;
  double ratio_lo = 0.0;
  double ratio_hi = 0.0;
};

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

/// Pass when the sup deviations strictly decrease along the grid and the
/// final one is at or below tol; a single point is inconclusive.
Verdict convergence_verdict(std::span<const double> sup_devs, double tol);

struct RunResult {
  std::vector<RatioRow> rows;
  std::vector<double> group_keys;    // t per group (n for the sum oracle)
  std::vector<double> sup_abs_dev;   // per group, over non-starved cells
  std::vector<std::pair<double, double>> starved;  // (t, x) left as bounds
  Verdict verdict = Verdict::Inconclusive;
  double tolerance = 0.0;
  nlohmann::json summary;

  bool pass() const { return verdict == Verdict::Pass; }
};

/// Runs one experiment: gates first (GateError on violation), then the
/// Monte Carlo + asymptote grid, then the convergence verdict.
RunResult run(const ExperimentConfig& config);

/// Fixed-schema CSV: t,x,empirical,stderr,ci_lo,ci_hi,asymptote,ratio with
/// 17-significant-digit decimal formatting.
std::string csv_text(std::span<const RatioRow> rows);

/// Asymptote-only CSV (t,x,asymptote) for the formulas-only subcommand.
std::string asymptote_csv_text(const ExperimentConfig& config);

/// Writes rows.csv / rows.json and summary.json under config.out_dir.
void write_outputs(const ExperimentConfig& config, const RunResult& result);

/// Deterministic %.17g rendering used everywhere a double reaches a report.
std::string format_g17(double v);

/// Named verification bundle: a frozen config plus its pass criteria.
struct VerifyOutcome {
  std::string id;
  bool pass = false;
  nlohmann::json summary;
  std::vector<RatioRow> rows;
};

std::vector<std::string> verify_ids();

struct VerifyOverrides {
  std::uint64_t seed = 0;      // 0: bundle default
  int threads = 0;             // 0: hardware
  std::uint64_t n_paths = 0;   // 0: bundle default
};

/// Runs a named bundle; throws UsageError for unknown ids.
VerifyOutcome run_verify(const std::string& id,
                         const VerifyOverrides& overrides = {});

/// Command line entry: simulate / asymptotic / verify / tail-diag.
/// Returns 0 on success, 2 on gate failure, 64 on usage errors, 70 on
/// internal errors.
int cli(const std::vector<std::string>& args);

inline constexpr const char* kConfigVersion = "1";

}  // namespace ruinld::harness
