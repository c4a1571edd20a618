#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "momentsnet/grid.hpp"
#include "momentsnet/kernels.hpp"

namespace momentsnet {

/// Upper bound on hashed bits per map; 2^20 histogram bins per block.
inline constexpr unsigned kMaxHashBits = 20;

/// Overlapping block layout over an extent, with partial border blocks dropped.
struct BlockGeometry {
  std::size_t stride_rows = 1;
  std::size_t stride_cols = 1;
  std::size_t blocks_rows = 0;
  std::size_t blocks_cols = 0;

  std::size_t count() const noexcept { return blocks_rows * blocks_cols; }
};

/// stride = max(1, round(h (1 - overlap))), count = floor((extent - h) / stride) + 1.
/// Throws GeometryError when a block does not fit.
BlockGeometry block_geometry(std::size_t rows, std::size_t cols, std::size_t block_rows,
                             std::size_t block_cols, double overlap);

/// Network hyper-parameters. The paper-style quintet (L1, k1, h1, R, t) maps to
/// l1, k1, h1, overlap and threshold, with l2 = l1, k2 = k1 and h2 = h1 by default.
struct NetConfig {
  int stages = 1;
  std::size_t l1 = 9;
  std::size_t l2 = 9;
  std::size_t k1 = 11;
  std::size_t k2 = 11;
  std::size_t h1 = 8;
  std::size_t h2 = 8;
  double overlap = 0.5;
  double threshold = 0.1;
  MomentFamily family{};
  ComplexReduction reduction = ComplexReduction::Modulus;
  std::size_t input_rows = 32;
  std::size_t input_cols = 32;

  /// Throws ConfigError / GeometryError naming the offending parameter.
  void validate() const;

  /// Number of binary maps hashed together: l2 for two stages, l1 for one.
  unsigned hash_bits() const noexcept {
    return static_cast<unsigned>(stages == 2 ? l2 : l1);
  }
  std::size_t bins() const noexcept { return std::size_t{1} << hash_bits(); }
  /// Number of hashed maps per image: l1 for two stages, 1 for one.
  std::size_t hashed_maps() const noexcept { return stages == 2 ? l1 : 1; }
  BlockGeometry blocks() const;
  /// l1 * B * 2^l2 (two stages) or B * 2^l1 (one stage).
  std::size_t feature_dim() const;
};

struct Provenance {
  std::size_t image_id = 0;
  int stage = 0;                  // 0 for the raw image
  std::vector<std::size_t> path;  // filter index per stage
};

struct FeatureMap {
  RealGrid grid;
  Provenance provenance;
};

struct HashedMap {
  Grid<std::uint32_t> grid;
  unsigned bits = 0;
};

/// Sparse non-negative feature vector; indices strictly ascending.
class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nonzeros() const noexcept { return index_.size(); }
  std::span<const std::uint32_t> indices() const noexcept { return index_; }
  std::span<const float> values() const noexcept { return value_; }

  /// Appends an entry; `index` must exceed every index already present.
  void push_back(std::size_t index, float value);
  double at(std::size_t index) const;
  std::vector<double> dense() const;
  double sum() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint32_t> index_;
  std::vector<float> value_;
};

/// Flattened (row-major) mean-centred k1 x k2 patch anchored at (u, v), zero
/// padded outside `input`. The anchor sits at offset ((k1-1)/2, (k2-1)/2).
void centered_patch(const RealGrid& input, std::size_t u, std::size_t v, std::size_t k1,
                    std::size_t k2, std::span<double> out);

/// Every stride-1 patch of `image`, zero padded so that each pixel anchors
/// one patch (M*N patches in row-major anchor order), each mean-centred.
std::vector<RealGrid> extract_patches(const RealGrid& image, std::size_t k1, std::size_t k2);

/// One map per filter: map j at (u, v) is component j of the moment
/// projection of the centred patch anchored at (u, v).
std::vector<RealGrid> apply_bank(const RealGrid& input, const KernelBank& bank);

/// apply_bank over a list of maps with provenance bookkeeping; the output is
/// input-major (all L maps of input 0, then input 1, ...).
std::vector<FeatureMap> run_stage(std::span<const FeatureMap> inputs, const KernelBank& bank);

/// Modified Heaviside: 1 where value >= t.
BinaryGrid binarize(const RealGrid& map, double t);

/// T = sum_k 2^(k-1) J_k. Throws ShapeError on mismatched maps and
/// ConfigError outside 1 <= L <= 20.
HashedMap hash_maps(std::span<const BinaryGrid> maps);

/// Inverse of hash_maps: bit k-1 of every pixel becomes map k.
std::vector<BinaryGrid> unhash(const HashedMap& hashed);

/// Concatenated per-block histograms (dense), block-major in row-major block
/// order, `bins` entries per block.
std::vector<double> block_histogram(const HashedMap& hashed, std::size_t h1, std::size_t h2,
                                    double overlap, std::size_t bins);

/// Banks for each stage; `second` is present for two-stage networks.
struct NetBanks {
  KernelBank first;
  std::optional<KernelBank> second;
};

/// Moment banks for the configured family (not valid for the PCA family).
NetBanks build_net_banks(const NetConfig& config);

/// The real-valued maps that get binarized: the l1 first-stage maps for a
/// one-stage network, the l1*l2 second-stage maps (parent-major) for two.
std::vector<RealGrid> output_maps(const RealGrid& image, const NetConfig& config,
                                  const NetBanks& banks);

/// Binarize, hash and pool `maps` (as produced by output_maps) at threshold t.
FeatureVector pool_features(std::span<const RealGrid> maps, const NetConfig& config,
                            double threshold);

/// End-to-end forward pass at config.threshold.
FeatureVector extract_features(const RealGrid& image, const NetConfig& config,
                               const NetBanks& banks);

/// extract_features over a batch, parallel over images, output in input order.
std::vector<FeatureVector> extract_features_batch(std::span<const RealGrid> images,
                                                  const NetConfig& config,
                                                  const NetBanks& banks, double threshold,
                                                  unsigned threads);

/// Proportion of ones across `maps`. Throws ShapeError when empty.
double ones_fraction(std::span<const BinaryGrid> maps);
/// Proportion of entries >= t across real maps (binarize + count, fused).
double ones_fraction(std::span<const RealGrid> maps, double t);

struct Interval {
  double lo = 0.4;
  double hi = 0.5;
};

/// Smallest threshold whose ones fraction over `maps` lies in `target`,
/// found by bisection on the pooled values to `resolution` times the value
/// spread. Throws SearchError (with the achievable fractions around the
/// target) when the value distribution jumps across the interval.
double auto_threshold(std::span<const RealGrid> maps, Interval target,
                      double resolution = 1e-4);

}  // namespace momentsnet
