#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ruinld/rng.hpp"
#include "ruinld/tails.hpp"

namespace ruinld {

/// Orthant-dependence direction tags carried by a sequence.
struct DependenceTags {
  bool wuod = false;
  bool wlod = false;
  bool operator==(const DependenceTags&) const = default;
};

enum class MonotoneDirection { Nondecreasing, Nonincreasing };

/// Tag algebra for coordinatewise monotone maps: nondecreasing maps preserve
/// the orthant directions, nonincreasing maps swap them.
inline DependenceTags monotone_transform(DependenceTags tags,
                                         MonotoneDirection dir) {
  if (dir == MonotoneDirection::Nonincreasing) std::swap(tags.wuod, tags.wlod);
  return tags;
}

/// How a sequence (or paired sequence) is coupled, with the certified
/// dependence class and the dominating-coefficient constants it guarantees.
/// Only constant-coefficient classes are constructible: negatively associated
/// sequences are realized by a Gaussian copula with nonpositive
/// equicorrelation in blocks, so every shipped plan certifies M = 1.
class DependencePlan {
 public:
  enum class Mode { IID, GaussianCopulaNA, PairCopula };
  enum class PairCoupling { Independent, Comonotone, Countermonotone, Gaussian };
  enum class CertifiedClass { Independent, NA, ArbitraryWithinPair };

  static DependencePlan iid() { return DependencePlan(); }

  /// Blockwise Gaussian copula with equicorrelation rho in (-1/(m-1), 0].
  static DependencePlan gaussian_na(double rho, int block_size);

  /// Pairs i.i.d. across index; intra-pair coupling unconstrained.
  static DependencePlan pairs(PairCoupling coupling, double rho = 0.0);

  Mode mode() const { return mode_; }
  double rho() const { return rho_; }
  int block_size() const { return block_; }
  PairCoupling coupling() const { return coupling_; }
  CertifiedClass certified_class() const { return certified_; }
  double m_upper() const { return 1.0; }
  double m_lower() const { return 1.0; }

  /// True when distinct coordinates of the generated sequence are
  /// independent (IID, or pairs seen as a sequence over the pair index).
  bool independent_coordinates() const {
    return mode_ != Mode::GaussianCopulaNA;
  }

  DependenceTags tags() const { return {true, true}; }

  nlohmann::json descriptor() const;
  static DependencePlan from_descriptor(const nlohmann::json& j);

 private:
  DependencePlan() = default;

  Mode mode_ = Mode::IID;
  double rho_ = 0.0;
  int block_ = 1;
  PairCoupling coupling_ = PairCoupling::Independent;
  CertifiedClass certified_ = CertifiedClass::Independent;
};

/// Fills `out` with draws whose coordinates follow `marginal` and whose joint
/// law follows the plan. Generation is a pure function of the stream state;
/// NA blocks are emitted whole, so `out.size()` should be a multiple of the
/// plan's block size when lazily chunked (fill pads internally otherwise).
void fill_sequence(const DependencePlan& plan, const TailModel& marginal,
                   std::span<double> out, RngStream& rng);

std::vector<double> gen_sequence(const DependencePlan& plan,
                                 const TailModel& marginal, std::size_t n,
                                 RngStream& rng);

/// Pairs (Y_i, Z_i), i.i.d. across i, intra-pair coupling per plan.
void fill_pairs(const DependencePlan& plan, const TailModel& claim_law,
                const TailModel& inter_law,
                std::span<std::pair<double, double>> out, RngStream& rng);

std::vector<std::pair<double, double>> gen_pairs(const DependencePlan& plan,
                                                 const TailModel& claim_law,
                                                 const TailModel& inter_law,
                                                 std::size_t n,
                                                 RngStream& rng);

/// One orthant-ratio cell: empirical joint orthant probability over the
/// product of marginals at a common quantile level.
struct OrthantCell {
  double level = 0.0;
  std::vector<double> thresholds;
  std::uint64_t joint_hits = 0;
  double ratio = 0.0;
  double stderr_propagated = 0.0;
  bool skipped = false;  // fewer than the required joint hits
};

struct OrthantCheckReport {
  std::vector<OrthantCell> cells;
  double m_bound = 1.0;
  bool pass = false;
  std::size_t skipped_cells = 0;
};

/// Upper-orthant check: sup over cells of P(all X_i > x_i) / prod P(X_i > x_i)
/// must not exceed M + 3 propagated stderr. Cells with fewer than
/// `min_hits` joint hits are skipped with a note.
OrthantCheckReport check_wuod(
    const std::vector<std::vector<double>>& samples,
    std::span<const double> levels, double m_bound,
    std::uint64_t min_hits = 100);

/// Lower-orthant mirror: P(all X_i <= x_i) / prod P(X_i <= x_i).
OrthantCheckReport check_wlod(
    const std::vector<std::vector<double>>& samples,
    std::span<const double> levels, double m_bound,
    std::uint64_t min_hits = 100);

/// Lazily extended dependent sequence. Elements are generated in chunks whose
/// RNG keys depend only on (seed, path, substream, chunk index), so element i
/// is the same value however far the sequence was extended and on any worker.
/// Chunks are padded to whole copula blocks.
class ChunkedSequence {
 public:
  static constexpr std::size_t kChunk = 256;

  ChunkedSequence(const TailModel& law, const DependencePlan& plan,
                  std::uint64_t seed, std::uint64_t path, Substream substream);

  double at(std::size_t i);

 private:
  const TailModel* law_;
  DependencePlan plan_;
  std::uint64_t seed_, path_, substream_;
  std::size_t chunk_len_ = kChunk;
  std::uint64_t next_chunk_ = 0;
  std::vector<double> values_;
};

/// Lazy pair sequence for intra-pair-coupled (claim, gap) draws.
class ChunkedPairs {
 public:
  static constexpr std::size_t kChunk = 256;

  ChunkedPairs(const TailModel& claim_law, const TailModel& inter_law,
               const DependencePlan& plan, std::uint64_t seed,
               std::uint64_t path, Substream substream);

  std::pair<double, double> at(std::size_t i);

 private:
  const TailModel* claim_law_;
  const TailModel* inter_law_;
  DependencePlan plan_;
  std::uint64_t seed_, path_, substream_;
  std::uint64_t next_chunk_ = 0;
  std::vector<std::pair<double, double>> values_;
};

struct ProductMomentReport {
  bool pass = false;
  double lhs = 0.0;    // empirical E prod X_i
  double rhs = 0.0;    // M * prod of empirical means
  double margin = 0.0; // rhs + k*se - lhs
  double stderr_combined = 0.0;
  bool high_variance = false;  // CI widened for a heavy-tailed product
};

/// Product-moment inequality for nonnegative coordinates:
/// E prod X_i <= M prod E X_i within Monte Carlo error.
ProductMomentReport product_moment_check(
    const std::vector<std::vector<double>>& samples, double m_bound);

}  // namespace ruinld
