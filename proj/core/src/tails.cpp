#include "ruinld/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

namespace ruinld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_tail(double alpha, double scale, double x) {
  return std::pow(1.0 + x / scale, -alpha);
}

double log_pareto_tail(double x) {
  const double l = std::log(std::exp(1.0) + x);
  return 1.0 / ((1.0 + x) * l * l);
}

}  // namespace

void ClassTags::closure() {
  if (reg_varying) erv = true;
  if (erv) consistent = true;
  if (consistent) {
    dominated = true;
    long_tailed = true;
    subexponential = true;
  }
  if (subexponential) long_tailed = true;
}

bool ClassTags::chain_consistent() const {
  ClassTags c = *this;
  c.closure();
  return c.reg_varying == reg_varying && c.erv == erv &&
         c.consistent == consistent && c.dominated == dominated &&
         c.subexponential == subexponential && c.long_tailed == long_tailed;
}

TailModel TailModel::pareto(double alpha, double scale) {
  if (!(alpha > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("pareto: alpha and scale must be positive");
  TailModel m;
  m.family_ = Family::Pareto;
  m.shape_ = alpha;
  m.scale_ = scale;
  m.mean_ = alpha > 1.0 ? scale / (alpha - 1.0) : kInf;
  m.tags_.reg_varying = true;
  m.tags_.closure();
  return m;
}

TailModel TailModel::log_pareto() {
  TailModel m;
  m.family_ = Family::LogPareto;
  m.tags_.reg_varying = true;  // index 1, slowly varying factor
  m.tags_.closure();
  // Finite mean; evaluated once by quadrature.
  m.mean_ = 0.0;
  namespace bq = boost::math::quadrature;
  bq::exp_sinh<double> integrator;
  m.mean_ = integrator.integrate([](double y) { return log_pareto_tail(y); },
                                 0.0, kInf, 1e-10);
  return m;
}

TailModel TailModel::weibull(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("weibull: shape and scale must be positive");
  TailModel m;
  m.family_ = Family::Weibull;
  m.shape_ = shape;
  m.scale_ = scale;
  m.mean_ = scale * std::tgamma(1.0 + 1.0 / shape);
  if (shape < 1.0) {
    m.tags_.subexponential = true;
    m.tags_.long_tailed = true;
  }
  return m;
}

TailModel TailModel::point(double value) {
  if (!(value >= 0.0)) throw std::invalid_argument("point: value must be >= 0");
  TailModel m;
  m.family_ = Family::Point;
  m.shape_ = value;
  m.mean_ = value;
  return m;
}

TailModel TailModel::user_table(
    std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2)
    throw std::invalid_argument("user_table: need at least two knots");
  if (knots.front().first != 0.0)
    throw std::invalid_argument("user_table: first knot must be at x = 0");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto& [x, t] = knots[i];
    if (!(t >= 0.0) || !(t <= 1.0))
      throw std::invalid_argument("user_table: tail values must lie in [0,1]");
    if (i > 0) {
      if (!(x > knots[i - 1].first))
        throw std::invalid_argument("user_table: x must be increasing");
      if (t > knots[i - 1].second)
        throw std::invalid_argument("user_table: tail must be nonincreasing");
    }
  }
  TailModel m;
  m.family_ = Family::UserTable;
  m.knots_ = std::move(knots);
  // Exact integral of the piecewise-linear tail.
  double mean = 0.0;
  for (std::size_t i = 1; i < m.knots_.size(); ++i) {
    const auto& [x0, t0] = m.knots_[i - 1];
    const auto& [x1, t1] = m.knots_[i];
    mean += 0.5 * (t0 + t1) * (x1 - x0);
  }
  m.mean_ = mean;
  // Tags from diagnostics only: require a few decades of usable range.
  const double x_hi = m.knots_.back().first;
  const double t_hi = m.knots_.back().second;
  if (x_hi >= 1e4 && t_hi > 0.0) {
    const MatuszewskaEstimate est = matuszewska(m);
    if (!est.diverged) {
      m.tags_.dominated = true;
      std::vector<double> probe{1.01, 1.05, 1.1};
      const auto rep = limit_ratios(m, probe, x_hi / 2.0);
      if (rep.l_f >= 0.95) m.tags_.consistent = true;
      if (std::abs(est.j_plus - est.j_minus) <= 0.2) m.tags_.reg_varying = true;
      m.tags_.closure();
    }
  }
  return m;
}

double TailModel::tail(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("tail: x must be >= 0");
  switch (family_) {
    case Family::Pareto:
      return pow_tail(shape_, scale_, x);
    case Family::LogPareto:
      return log_pareto_tail(x);
    case Family::Weibull:
      return std::exp(-std::pow(x / scale_, shape_));
    case Family::Point:
      return x < shape_ ? 1.0 : 0.0;
    case Family::UserTable: {
      if (x > knots_.back().first)
        throw TailRangeError("user_table: tail evaluated beyond last knot");
      auto it = std::lower_bound(
          knots_.begin(), knots_.end(), x,
          [](const auto& k, double v) { return k.first < v; });
      if (it == knots_.begin()) return it->second;
      const auto& [x1, t1] = *it;
      const auto& [x0, t0] = *(it - 1);
      const double w = (x - x0) / (x1 - x0);
      return t0 + w * (t1 - t0);
    }
  }
  return 0.0;
}

double TailModel::quantile_from_tail(double p) const {
  if (!(p > 0.0) || !(p <= 1.0))
    throw std::domain_error("quantile_from_tail: p must be in (0,1]");
  switch (family_) {
    case Family::Pareto:
      return scale_ * (std::pow(p, -1.0 / shape_) - 1.0);
    case Family::Weibull:
      return p >= 1.0 ? 0.0 : scale_ * std::pow(-std::log(p), 1.0 / shape_);
    case Family::Point:
      return p >= 1.0 ? 0.0 : shape_;
    case Family::LogPareto: {
      if (p >= 1.0) return 0.0;
      // Bisection in log(1+x); the tail is strictly decreasing.
      double lo = 0.0, hi = 1.0;
      while (log_pareto_tail(std::expm1(hi)) > p && hi < 745.0) hi *= 2.0;
      for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (log_pareto_tail(std::expm1(mid)) > p ? lo : hi) = mid;
      }
      return std::expm1(0.5 * (lo + hi));
    }
    case Family::UserTable: {
      if (p >= knots_.front().second) return 0.0;
      if (p <= knots_.back().second) return knots_.back().first;
      auto it = std::lower_bound(
          knots_.begin(), knots_.end(), p,
          [](const auto& k, double v) { return k.second > v; });
      const auto& [x1, t1] = *it;
      const auto& [x0, t0] = *(it - 1);
      if (t0 == t1) return x1;
      const double w = (t0 - p) / (t0 - t1);
      return x0 + w * (x1 - x0);
    }
  }
  return 0.0;
}

std::vector<double> TailModel::sample_n(RngStream& rng, std::size_t n) const {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(rng));
  return out;
}

bool TailModel::finite_mean() const { return std::isfinite(mean_); }

nlohmann::json TailModel::descriptor() const {
  nlohmann::json j;
  switch (family_) {
    case Family::Pareto:
      j = {{"family", "pareto"}, {"alpha", shape_}, {"scale", scale_}};
      break;
    case Family::LogPareto:
      j = {{"family", "log_pareto"}};
      break;
    case Family::Weibull:
      j = {{"family", "weibull"}, {"shape", shape_}, {"scale", scale_}};
      break;
    case Family::Point:
      j = {{"family", "point"}, {"value", shape_}};
      break;
    case Family::UserTable: {
      nlohmann::json k = nlohmann::json::array();
      for (const auto& [x, t] : knots_) k.push_back({x, t});
      j = {{"family", "table"}, {"knots", std::move(k)}};
      break;
    }
  }
  return j;
}

TailModel TailModel::from_descriptor(const nlohmann::json& j) {
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "pareto")
    return pareto(j.at("alpha").get<double>(), j.at("scale").get<double>());
  if (fam == "log_pareto") return log_pareto();
  if (fam == "weibull")
    return weibull(j.at("shape").get<double>(), j.at("scale").get<double>());
  if (fam == "point") return point(j.at("value").get<double>());
  if (fam == "table") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : j.at("knots"))
      knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
    return user_table(std::move(knots));
  }
  throw std::invalid_argument("unknown tail model family: " + fam);
}

namespace {

struct WindowedRatio {
  double lower = 0.0;
  double upper = 0.0;
  bool shrunk = false;
  bool dead = false;  // tail vanished over the whole window
};

// Ratio tail(xy)/tail(x) scanned geometrically over [x_lo, x_hi], split into
// two half-windows; each half's extremum is extrapolated linearly in 1/ln x
// to strip slowly varying factors. Values are clamped to [0,1], valid for
// y >= 1 since the tail is nonincreasing.
WindowedRatio windowed_ratio(const TailModel& model, double y, double x_lo,
                             double x_hi) {
  WindowedRatio out;
  constexpr double kTiny = 1e-300;
  while (x_hi > 4.0 * x_lo) {
    double probe = 0.0;
    try {
      probe = model.tail(x_hi * y);
    } catch (const TailRangeError&) {
      probe = 0.0;
    }
    if (probe > kTiny) break;
    x_hi /= 10.0;
    out.shrunk = true;
  }
  if (x_hi <= 4.0 * x_lo) {
    out.dead = true;
    return out;
  }

  const double mid = std::sqrt(x_lo * x_hi);
  auto scan = [&](double lo, double hi, double& mn, double& mx) {
    const int pts = 16;
    mn = kInf;
    mx = 0.0;
    for (int i = 0; i <= pts; ++i) {
      const double x =
          lo * std::pow(hi / lo, static_cast<double>(i) / pts);
      double num = 0.0, den = 0.0;
      try {
        num = model.tail(x * y);
        den = model.tail(x);
      } catch (const TailRangeError&) {
        continue;
      }
      if (den <= kTiny) continue;
      const double r = num / den;
      mn = std::min(mn, r);
      mx = std::max(mx, r);
    }
  };
  double lo1, hi1, lo2, hi2;
  scan(x_lo, mid, lo1, hi1);
  scan(mid, x_hi, lo2, hi2);
  if (!std::isfinite(lo1) || !std::isfinite(lo2)) {
    out.dead = true;
    return out;
  }
  // Representative abscissa of each half-window on the 1/ln x axis.
  const double u1 = 1.0 / std::log(std::sqrt(x_lo * mid));
  const double u2 = 1.0 / std::log(std::sqrt(mid * x_hi));
  auto extrapolate = [&](double v1, double v2) {
    const double v0 = v2 + (v2 - v1) * u2 / (u1 - u2);
    return std::clamp(v0, 0.0, 1.0);
  };
  out.lower = extrapolate(lo1, lo2);
  out.upper = extrapolate(hi1, hi2);
  if (out.lower > out.upper) std::swap(out.lower, out.upper);
  return out;
}

double table_end_slope(const TailModel& model) {
  const auto& kn = model.knots();
  const double x_hi = kn.back().first;
  const double x_lo = std::max(kn.front().first + 1.0, x_hi / 100.0);
  // Log-log least squares over the last decades of the table.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [x, t] : kn) {
    if (x < x_lo || t <= 0.0) continue;
    const double lx = std::log(x), lt = std::log(t);
    sx += lx;
    sy += lt;
    sxx += lx * lx;
    sxy += lx * lt;
    ++n;
  }
  if (n < 2) return kInf;
  const double slope = (static_cast<double>(n) * sxy - sx * sy) /
                       (static_cast<double>(n) * sxx - sx * sx);
  return -slope;
}

}  // namespace

TailFunctionalReport limit_ratios(const TailModel& model,
                                  std::span<const double> y_grid,
                                  double x_max) {
  TailFunctionalReport rep;
  const double x_lo = 1e2;
  for (double y : y_grid) {
    if (!(y > 1.0))
      throw std::domain_error("limit_ratios: grid values must exceed 1");
    const WindowedRatio w = windowed_ratio(model, y, x_lo, x_max);
    rep.y_grid.push_back(y);
    rep.lower_ratio.push_back(w.dead ? 0.0 : w.lower);
    rep.upper_ratio.push_back(w.dead ? 0.0 : w.upper);
    rep.window_shrunk = rep.window_shrunk || w.shrunk;
  }
  // Keep the liminf proxy monotone in y; numeric jitter only.
  for (std::size_t i = 1; i < rep.lower_ratio.size(); ++i) {
    if (rep.y_grid[i] > rep.y_grid[i - 1])
      rep.lower_ratio[i] = std::min(rep.lower_ratio[i], rep.lower_ratio[i - 1]);
  }

  // Lower ratio extrapolated linearly to y -> 1.
  const double probe_y[3] = {1.01, 1.05, 1.1};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double y : probe_y) {
    const WindowedRatio w = windowed_ratio(model, y, x_lo, x_max);
    const double v = w.dead ? 0.0 : w.lower;
    sx += y;
    sy += v;
    sxx += y * y;
    sxy += y * v;
  }
  const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / 3.0;
  rep.l_f = std::clamp(intercept + slope * 1.0, 0.0, 1.0);

  const MatuszewskaEstimate mat = matuszewska(model);
  rep.j_minus = mat.j_minus;
  rep.j_plus = mat.j_plus;
  rep.moment_idx = moment_index(model);
  return rep;
}

MatuszewskaEstimate matuszewska(const TailModel& model) {
  MatuszewskaEstimate est;
  double x_lo = 1e6, x_hi = 1e10, y1 = 1e3, y2 = 1e6;
  if (model.family() == TailModel::Family::UserTable) {
    // Confine the scan to the table range.
    const double last = model.knots().back().first;
    x_hi = last / 8.0;
    x_lo = std::max(1.0, x_hi / 1e4);
    y2 = std::min(y2, std::sqrt(last / x_hi));
    y1 = std::sqrt(y2);
    if (!(y2 > 4.0) || !(x_hi > 4.0 * x_lo)) {
      est.diverged = true;
      return est;
    }
  }
  const WindowedRatio w1 = windowed_ratio(model, y1, x_lo, x_hi);
  const WindowedRatio w2 = windowed_ratio(model, y2, x_lo, x_hi);
  if (w1.dead || w2.dead || w1.lower <= 0.0 || w2.lower <= 0.0) {
    est.diverged = true;
    return est;
  }
  const double dly = std::log(y2) - std::log(y1);
  est.j_plus = -(std::log(w2.lower) - std::log(w1.lower)) / dly;
  est.j_minus = -(std::log(w2.upper) - std::log(w1.upper)) / dly;
  if (!std::isfinite(est.j_plus) || !std::isfinite(est.j_minus) ||
      est.j_plus > 50.0) {
    est.diverged = true;
  }
  return est;
}

double moment_index(const TailModel& model) {
  switch (model.family()) {
    case TailModel::Family::Pareto:
      return model.shape();
    case TailModel::Family::LogPareto:
      return 1.0;
    case TailModel::Family::Weibull:
    case TailModel::Family::Point:
      return kInf;  // all power moments finite
    case TailModel::Family::UserTable:
      return table_end_slope(model);
  }
  return kInf;
}

namespace quadrature {

double tail_integral(const TailModel& model, double a) {
  namespace bq = boost::math::quadrature;
  switch (model.family()) {
    case TailModel::Family::Pareto: {
      const double alpha = model.shape(), s = model.scale();
      if (!(alpha > 1.0))
        throw std::domain_error("tail_integral: infinite-mean model");
      return s / (alpha - 1.0) * std::pow(1.0 + a / s, 1.0 - alpha);
    }
    case TailModel::Family::Point:
      return std::max(model.shape() - a, 0.0);
    case TailModel::Family::UserTable: {
      const auto& kn = model.knots();
      if (a >= kn.back().first) return 0.0;
      double acc = 0.0;
      for (std::size_t i = 1; i < kn.size(); ++i) {
        const auto& [x0, t0] = kn[i - 1];
        const auto& [x1, t1] = kn[i];
        if (x1 <= a) continue;
        const double lo = std::max(a, x0);
        const double tl = t0 + (t1 - t0) * (lo - x0) / (x1 - x0);
        acc += 0.5 * (tl + t1) * (x1 - lo);
      }
      return acc;
    }
    default:
      break;
  }
  auto f = [&](double y) { return model.tail(y); };
  // Split where the tail passes 1e-12; the near piece is done by adaptive
  // Gauss-Kronrod, the far piece by exp-sinh on the semi-infinite interval.
  const double split = std::max(a, model.quantile_from_tail(1e-12));
  double total = 0.0;
  if (split > a) {
    total += bq::gauss_kronrod<double, 31>::integrate(f, a, split, 12, 1e-8);
  }
  bq::exp_sinh<double> integrator;
  total += integrator.integrate(f, split, kInf, 1e-8);
  return total;
}

}  // namespace quadrature

double integral_tail(const TailModel& model, double x) {
  if (!(x >= 0.0)) throw std::domain_error("integral_tail: x must be >= 0");
  if (!model.finite_mean())
    throw std::domain_error("integral_tail: model has infinite mean");
  if (model.mean() <= 0.0) return 0.0;
  return quadrature::tail_integral(model, x) / model.mean();
}

DominanceReport tail_dominance(const TailModel& small_tail,
                               const TailModel& big_tail,
                               std::span<const double> x_grid) {
  DominanceReport rep;
  std::vector<double> grid(x_grid.begin(), x_grid.end());
  if (grid.empty()) {
    double hi = 1e6;
    for (const TailModel* m : {&small_tail, &big_tail}) {
      if (m->family() == TailModel::Family::UserTable)
        hi = std::min(hi, m->knots().back().first);
    }
    for (int i = 0; i <= 24; ++i)
      grid.push_back(std::pow(10.0, 6.0 * i / 24.0) * hi / 1e6);
  }
  for (double x : grid) {
    const double den = big_tail.tail(x);
    if (den <= 0.0) continue;
    rep.x_grid.push_back(x);
    rep.ratios.push_back(small_tail.tail(x) / den);
  }
  if (rep.ratios.size() < 2) return rep;
  bool nonincreasing = true;
  for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
    if (rep.ratios[i] > rep.ratios[i - 1] * 1.01 + 1e-12)
      nonincreasing = false;
  }
  rep.holds = nonincreasing && rep.ratios.back() <= 0.05 &&
              rep.ratios.back() < 0.5 * rep.ratios.front();
  return rep;
}

}  // namespace ruinld
