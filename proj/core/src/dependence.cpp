#include "ruinld/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ruinld/stats.hpp"

namespace ruinld {

DependencePlan DependencePlan::gaussian_na(double rho, int block_size) {
  if (block_size < 2 || block_size > 64)
    throw std::invalid_argument("gaussian_na: block size must be in [2, 64]");
  const double lo = -1.0 / (block_size - 1);
  if (!(rho > lo) || !(rho <= 0.0))
    throw std::invalid_argument(
        "gaussian_na: rho must lie in (-1/(m-1), 0]");
  DependencePlan p;
  p.mode_ = Mode::GaussianCopulaNA;
  p.rho_ = rho;
  p.block_ = block_size;
  p.certified_ = CertifiedClass::NA;
  return p;
}

DependencePlan DependencePlan::pairs(PairCoupling coupling, double rho) {
  if (coupling == PairCoupling::Gaussian && !(rho > -1.0 && rho < 1.0))
    throw std::invalid_argument("pairs: gaussian rho must lie in (-1, 1)");
  DependencePlan p;
  p.mode_ = Mode::PairCopula;
  p.coupling_ = coupling;
  p.rho_ = coupling == PairCoupling::Gaussian ? rho : 0.0;
  p.certified_ = CertifiedClass::ArbitraryWithinPair;
  return p;
}

nlohmann::json DependencePlan::descriptor() const {
  switch (mode_) {
    case Mode::IID:
      return {{"mode", "iid"}};
    case Mode::GaussianCopulaNA:
      return {{"mode", "na"}, {"rho", rho_}, {"block", block_}};
    case Mode::PairCopula: {
      const char* name = "independent";
      switch (coupling_) {
        case PairCoupling::Independent: name = "independent"; break;
        case PairCoupling::Comonotone: name = "comonotone"; break;
        case PairCoupling::Countermonotone: name = "countermonotone"; break;
        case PairCoupling::Gaussian: name = "gaussian"; break;
      }
      nlohmann::json j{{"mode", "pairs"}, {"coupling", name}};
      if (coupling_ == PairCoupling::Gaussian) j["rho"] = rho_;
      return j;
    }
  }
  return {};
}

DependencePlan DependencePlan::from_descriptor(const nlohmann::json& j) {
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "iid") return iid();
  if (mode == "na")
    return gaussian_na(j.at("rho").get<double>(), j.at("block").get<int>());
  if (mode == "pairs") {
    const std::string c = j.at("coupling").get<std::string>();
    if (c == "independent") return pairs(PairCoupling::Independent);
    if (c == "comonotone") return pairs(PairCoupling::Comonotone);
    if (c == "countermonotone") return pairs(PairCoupling::Countermonotone);
    if (c == "gaussian")
      return pairs(PairCoupling::Gaussian, j.at("rho").get<double>());
    throw std::invalid_argument("unknown pair coupling: " + c);
  }
  throw std::invalid_argument("unknown dependence mode: " + mode);
}

void fill_sequence(const DependencePlan& plan, const TailModel& marginal,
                   std::span<double> out, RngStream& rng) {
  switch (plan.mode()) {
    case DependencePlan::Mode::IID:
    case DependencePlan::Mode::PairCopula:
      for (double& v : out) v = marginal.sample(rng);
      return;
    case DependencePlan::Mode::GaussianCopulaNA: {
      const int m = plan.block_size();
      const double rho = plan.rho();
      // Equicorrelated normals: x_i = a z_i + b sum(z); a^2 + 2ab + m b^2 = 1
      // and 2ab + m b^2 = rho, valid for rho > -1/(m-1).
      const double a = std::sqrt(1.0 - rho);
      const double b =
          (std::sqrt(1.0 + (m - 1) * rho) - std::sqrt(1.0 - rho)) / m;
      std::vector<double> z(static_cast<std::size_t>(m));
      std::size_t i = 0;
      while (i < out.size()) {
        double s = 0.0;
        for (auto& zz : z) {
          zz = rng.normal();
          s += zz;
        }
        for (int k = 0; k < m && i < out.size(); ++k, ++i) {
          const double x = a * z[static_cast<std::size_t>(k)] + b * s;
          out[i] = marginal.quantile_from_tail(normal_tail(x));
        }
      }
      return;
    }
  }
}

std::vector<double> gen_sequence(const DependencePlan& plan,
                                 const TailModel& marginal, std::size_t n,
                                 RngStream& rng) {
  std::vector<double> out(n);
  fill_sequence(plan, marginal, out, rng);
  return out;
}

void fill_pairs(const DependencePlan& plan, const TailModel& claim_law,
                const TailModel& inter_law,
                std::span<std::pair<double, double>> out, RngStream& rng) {
  if (plan.mode() != DependencePlan::Mode::PairCopula)
    throw std::invalid_argument("fill_pairs: plan must be a pair copula");
  using PC = DependencePlan::PairCoupling;
  const double rho = plan.rho();
  const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  for (auto& pr : out) {
    double sy = 0.0, sz = 0.0;  // tail probabilities
    switch (plan.coupling()) {
      case PC::Independent:
        sy = rng.uniform01();
        sz = rng.uniform01();
        break;
      case PC::Comonotone:
        sy = sz = rng.uniform01();
        break;
      case PC::Countermonotone:
        sy = rng.uniform01();
        sz = 1.0 - sy;
        break;
      case PC::Gaussian: {
        const double z1 = rng.normal();
        const double z2 = rho * z1 + rho_c * rng.normal();
        sy = normal_tail(z1);
        sz = normal_tail(z2);
        break;
      }
    }
    pr.first = claim_law.quantile_from_tail(sy);
    pr.second = inter_law.quantile_from_tail(sz);
  }
}

std::vector<std::pair<double, double>> gen_pairs(const DependencePlan& plan,
                                                 const TailModel& claim_law,
                                                 const TailModel& inter_law,
                                                 std::size_t n,
                                                 RngStream& rng) {
  std::vector<std::pair<double, double>> out(n);
  fill_pairs(plan, claim_law, inter_law, out, rng);
  return out;
}

ChunkedSequence::ChunkedSequence(const TailModel& law,
                                 const DependencePlan& plan,
                                 std::uint64_t seed, std::uint64_t path,
                                 Substream substream)
    : law_(&law),
      plan_(plan),
      seed_(seed),
      path_(path),
      substream_(static_cast<std::uint64_t>(substream)) {
  if (plan_.mode() == DependencePlan::Mode::GaussianCopulaNA) {
    const std::size_t m = static_cast<std::size_t>(plan_.block_size());
    chunk_len_ = ((kChunk + m - 1) / m) * m;
  }
}

double ChunkedSequence::at(std::size_t i) {
  while (i >= values_.size()) {
    RngStream rng =
        RngStream::derive(seed_, path_, substream_ + (next_chunk_ << 8));
    ++next_chunk_;
    const std::size_t old = values_.size();
    values_.resize(old + chunk_len_);
    fill_sequence(plan_, *law_, std::span<double>(values_).subspan(old), rng);
  }
  return values_[i];
}

ChunkedPairs::ChunkedPairs(const TailModel& claim_law,
                           const TailModel& inter_law,
                           const DependencePlan& plan, std::uint64_t seed,
                           std::uint64_t path, Substream substream)
    : claim_law_(&claim_law),
      inter_law_(&inter_law),
      plan_(plan),
      seed_(seed),
      path_(path),
      substream_(static_cast<std::uint64_t>(substream)) {
  if (plan_.mode() != DependencePlan::Mode::PairCopula)
    throw std::invalid_argument("ChunkedPairs: plan must be a pair copula");
}

std::pair<double, double> ChunkedPairs::at(std::size_t i) {
  while (i >= values_.size()) {
    RngStream rng =
        RngStream::derive(seed_, path_, substream_ + (next_chunk_ << 8));
    ++next_chunk_;
    const std::size_t old = values_.size();
    values_.resize(old + kChunk);
    fill_pairs(plan_, *claim_law_, *inter_law_,
               std::span<std::pair<double, double>>(values_).subspan(old),
               rng);
  }
  return values_[i];
}

namespace {

// Shared machinery for the two orthant checks; `upper` picks the direction.
OrthantCheckReport orthant_check(const std::vector<std::vector<double>>& rows,
                                 std::span<const double> levels, double m_bound,
                                 std::uint64_t min_hits, bool upper) {
  OrthantCheckReport rep;
  rep.m_bound = m_bound;
  if (rows.empty()) return rep;
  const std::size_t dim = rows.front().size();
  const std::size_t n = rows.size();

  // Per-coordinate sorted copies for empirical quantiles.
  std::vector<std::vector<double>> cols(dim, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) cols[d][i] = rows[i][d];
  for (auto& c : cols) std::sort(c.begin(), c.end());

  bool ok = true;
  for (double level : levels) {
    OrthantCell cell;
    cell.level = level;
    const auto idx = static_cast<std::size_t>(
        std::clamp(level, 0.0, 1.0) * static_cast<double>(n - 1));
    for (std::size_t d = 0; d < dim; ++d)
      cell.thresholds.push_back(cols[d][idx]);

    std::uint64_t joint = 0;
    std::vector<std::uint64_t> marg(dim, 0);
    for (const auto& row : rows) {
      bool all = true;
      for (std::size_t d = 0; d < dim; ++d) {
        const bool hit = upper ? row[d] > cell.thresholds[d]
                               : row[d] <= cell.thresholds[d];
        if (hit) ++marg[d];
        all = all && hit;
      }
      if (all) ++joint;
    }
    cell.joint_hits = joint;
    if (joint < min_hits) {
      cell.skipped = true;
      ++rep.skipped_cells;
      rep.cells.push_back(std::move(cell));
      continue;
    }
    const double nn = static_cast<double>(n);
    const double pj = static_cast<double>(joint) / nn;
    double prod = 1.0;
    double var_log = (1.0 - pj) / (nn * pj);
    for (std::size_t d = 0; d < dim; ++d) {
      const double pm = static_cast<double>(marg[d]) / nn;
      prod *= pm;
      var_log += (1.0 - pm) / (nn * pm);
    }
    cell.ratio = pj / prod;
    cell.stderr_propagated = cell.ratio * std::sqrt(var_log);
    if (cell.ratio > m_bound + 3.0 * cell.stderr_propagated) ok = false;
    rep.cells.push_back(std::move(cell));
  }
  rep.pass = ok && rep.skipped_cells < rep.cells.size();
  return rep;
}

}  // namespace

OrthantCheckReport check_wuod(const std::vector<std::vector<double>>& samples,
                              std::span<const double> levels, double m_bound,
                              std::uint64_t min_hits) {
  return orthant_check(samples, levels, m_bound, min_hits, /*upper=*/true);
}

OrthantCheckReport check_wlod(const std::vector<std::vector<double>>& samples,
                              std::span<const double> levels, double m_bound,
                              std::uint64_t min_hits) {
  return orthant_check(samples, levels, m_bound, min_hits, /*upper=*/false);
}

ProductMomentReport product_moment_check(
    const std::vector<std::vector<double>>& samples, double m_bound) {
  ProductMomentReport rep;
  if (samples.empty()) return rep;
  const std::size_t dim = samples.front().size();
  const std::size_t n = samples.size();
  const double nn = static_cast<double>(n);

  OnlineMoments prod_acc;
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (const auto& row : samples) {
    double p = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      if (row[d] < 0.0)
        throw std::domain_error(
            "product_moment_check: coordinates must be nonnegative");
      p *= row[d];
    }
    prod_acc.add(p);
  }
  for (std::size_t d = 0; d < dim; ++d) {
    for (const auto& row : samples) mean[d] += row[d];
    mean[d] /= nn;
    for (const auto& row : samples)
      var[d] += (row[d] - mean[d]) * (row[d] - mean[d]);
    var[d] /= std::max(1.0, nn - 1.0);
  }

  rep.lhs = prod_acc.mean();
  double prod_means = 1.0;
  double rel_var = 0.0;  // delta method on the product of means
  for (std::size_t d = 0; d < dim; ++d) {
    prod_means *= mean[d];
    if (mean[d] > 0.0) rel_var += var[d] / (nn * mean[d] * mean[d]);
  }
  rep.rhs = m_bound * prod_means;
  const double se_lhs = prod_acc.stderr_of_mean();
  const double se_rhs = std::abs(rep.rhs) * std::sqrt(rel_var);
  rep.stderr_combined = std::sqrt(se_lhs * se_lhs + se_rhs * se_rhs);
  double k = 3.0;
  if (prod_acc.kurtosis_proxy() > 100.0) {
    rep.high_variance = true;
    k = 5.0;
  }
  rep.margin = rep.rhs + k * rep.stderr_combined - rep.lhs;
  rep.pass = rep.margin >= 0.0;
  return rep;
}

}  // namespace ruinld
