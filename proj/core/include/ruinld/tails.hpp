#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ruinld/rng.hpp"

namespace ruinld {

/// Raised when a tabulated tail is evaluated outside its knot range.
struct TailRangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// Tail-heaviness class memberships. The inclusion chain
/// reg_varying => erv => consistent => (dominated and long_tailed and
/// subexponential) is enforced by closure().
struct ClassTags {
  bool reg_varying = false;    // power tail with a single index
  bool erv = false;            // extended regular variation
  bool consistent = false;     // limit of lower ratio at y->1 equals 1
  bool dominated = false;      // lower ratio positive for every y > 1
  bool subexponential = false;
  bool long_tailed = false;

  void closure();
  bool chain_consistent() const;
};

/// An analytic heavy-tailed law on [0, inf): tail function, mean, quantile
/// sampler and class tags. Immutable after construction; safe to share across
/// threads. Sampling draws from a caller-owned stream.
class TailModel {
 public:
  enum class Family { Pareto, LogPareto, Weibull, Point, UserTable };

  /// Lomax form: tail(x) = (1 + x/scale)^(-alpha), support [0, inf).
  static TailModel pareto(double alpha, double scale);
  /// tail(x) = (1+x)^(-1) * ln^(-2)(e+x); index-1 power tail with a slowly
  /// varying factor, finite mean, infinite moments of every order > 1.
  static TailModel log_pareto();
  /// tail(x) = exp(-(x/scale)^shape). shape < 1 is heavy but not dominated
  /// varying; shape >= 1 is light-tailed. Used as a negative example.
  static TailModel weibull(double shape, double scale);
  /// Dirac mass at value >= 0. For value == 0 the tail is identically 0.
  static TailModel point(double value);
  /// Tabulated tail, piecewise linear between knots (x, tail). Knots must
  /// start at x = 0, have nondecreasing x and nonincreasing tail in [0,1].
  /// Class tags come from numeric diagnostics only.
  static TailModel user_table(std::vector<std::pair<double, double>> knots);

  double tail(double x) const;
  double cdf(double x) const { return 1.0 - tail(x); }

  /// inf{x >= 0 : tail(x) <= p} for p in (0,1].
  double quantile_from_tail(double p) const;

  double sample(RngStream& rng) const {
    return quantile_from_tail(rng.uniform01());
  }
  std::vector<double> sample_n(RngStream& rng, std::size_t n) const;

  /// Mean of the law; +inf when the mean diverges.
  double mean() const { return mean_; }
  bool finite_mean() const;

  Family family() const { return family_; }
  double shape() const { return shape_; }
  double scale() const { return scale_; }
  const std::vector<std::pair<double, double>>& knots() const {
    return knots_;
  }
  const ClassTags& tags() const { return tags_; }

  nlohmann::json descriptor() const;
  static TailModel from_descriptor(const nlohmann::json& j);

 private:
  TailModel() = default;

  Family family_ = Family::Pareto;
  double shape_ = 0.0;  // Pareto alpha / Weibull shape / Point value
  double scale_ = 1.0;
  std::vector<std::pair<double, double>> knots_;
  double mean_ = 0.0;
  ClassTags tags_;
};

/// Numeric proxies for the limiting tail-ratio functionals, plus the
/// Matuszewska / moment indices of the model.
struct TailFunctionalReport {
  std::vector<double> y_grid;
  std::vector<double> lower_ratio;  // liminf proxy of tail(xy)/tail(x)
  std::vector<double> upper_ratio;  // limsup proxy
  double l_f = 0.0;                 // lower ratio extrapolated to y -> 1
  double j_minus = 0.0;
  double j_plus = 0.0;
  double moment_idx = 0.0;
  bool window_shrunk = false;
};

struct MatuszewskaEstimate {
  double j_minus = 0.0;
  double j_plus = 0.0;
  bool diverged = false;  // model not dominated varying
};

/// Windowed liminf/limsup proxies of tail(xy)/tail(x) over a geometric x-scan
/// up to x_max, extrapolated in 1/ln x to wash out slowly varying factors.
TailFunctionalReport limit_ratios(const TailModel& model,
                                  std::span<const double> y_grid,
                                  double x_max = 1e8);

/// Matuszewska index estimates from the decay slope of the ratio functionals
/// between two large y values.
MatuszewskaEstimate matuszewska(const TailModel& model);

/// sup{s : E X^s < inf}; analytic per family, end-slope fit for tables.
double moment_index(const TailModel& model);

/// Integrated-tail distribution's tail: mean^-1 * integral_x^inf tail(y) dy.
/// Requires a finite mean.
double integral_tail(const TailModel& model, double x);

struct DominanceReport {
  bool holds = false;
  std::vector<double> x_grid;
  std::vector<double> ratios;  // small.tail / big.tail
};

/// Checks small.tail(x) = o(big.tail(x)) on a grid: the ratio must decay
/// below a small threshold without rising along the way.
DominanceReport tail_dominance(const TailModel& small_tail,
                               const TailModel& big_tail,
                               std::span<const double> x_grid = {});

namespace quadrature {
/// integral_a^inf f(y) dy for a nonnegative decaying integrand; rel tol 1e-8,
/// split at the point where the model tail passes 1e-12 when available.
double tail_integral(const TailModel& model, double a);
}  // namespace quadrature

}  // namespace ruinld
