#include "momentsnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "momentsnet/errors.hpp"
#include "momentsnet/parallel.hpp"

namespace momentsnet {

namespace {

std::string to_string_compact(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void centered_patch(const RealGrid& input, std::size_t u, std::size_t v,
                    std::size_t k1, std::size_t k2, std::span<double> out) {
  const auto rows = static_cast<std::ptrdiff_t>(input.rows());
  const auto cols = static_cast<std::ptrdiff_t>(input.cols());
  const auto r0 = static_cast<std::ptrdiff_t>(u) - static_cast<std::ptrdiff_t>((k1 - 1) / 2);
  const auto c0 = static_cast<std::ptrdiff_t>(v) - static_cast<std::ptrdiff_t>((k2 - 1) / 2);
  double sum = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < k1; ++i) {
    const auto r = r0 + static_cast<std::ptrdiff_t>(i);
    for (std::size_t j = 0; j < k2; ++j, ++idx) {
      const auto c = c0 + static_cast<std::ptrdiff_t>(j);
      const double value = (r >= 0 && r < rows && c >= 0 && c < cols)
                               ? input(static_cast<std::size_t>(r), static_cast<std::size_t>(c))
                               : 0.0;
      out[idx] = value;
      sum += value;
    }
  }
  const double mean = sum / static_cast<double>(k1 * k2);
  for (auto& value : out) value -= mean;
}

BlockGeometry block_geometry(std::size_t rows, std::size_t cols, std::size_t block_rows,
                             std::size_t block_cols, double overlap) {
  if (block_rows == 0 || block_cols == 0) throw GeometryError("h: block size must be positive");
  if (block_rows > rows || block_cols > cols) {
    throw GeometryError("h: block " + std::to_string(block_rows) + "x" +
                        std::to_string(block_cols) + " exceeds map extent " +
                        std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw GeometryError("overlap: ratio " + to_string_compact(overlap) + " outside [0, 1)");
  }
  auto stride = [overlap](std::size_t h) {
    const auto s = static_cast<long>(std::lround(static_cast<double>(h) * (1.0 - overlap)));
    return static_cast<std::size_t>(std::max(1L, s));
  };
  BlockGeometry g;
  g.stride_rows = stride(block_rows);
  g.stride_cols = stride(block_cols);
  g.blocks_rows = (rows - block_rows) / g.stride_rows + 1;
  g.blocks_cols = (cols - block_cols) / g.stride_cols + 1;
  return g;
}

void NetConfig::validate() const {
  if (stages != 1 && stages != 2) {
    throw ConfigError("stages: must be 1 or 2, got " + std::to_string(stages));
  }
  if (l1 == 0) throw ConfigError("l1: need at least one first-stage filter");
  if (stages == 2 && l2 == 0) throw ConfigError("l2: need at least one second-stage filter");
  if (hash_bits() > kMaxHashBits) {
    throw ConfigError(std::string(stages == 2 ? "l2" : "l1") + ": " +
                      std::to_string(hash_bits()) + " hashed maps exceed the 2^" +
                      std::to_string(kMaxHashBits) + " bin cap");
  }
  if (input_rows == 0 || input_cols == 0) throw GeometryError("input size must be positive");
  if (!(k1 > 1 && k1 < input_rows) || !(k2 > 1 && k2 < input_cols)) {
    throw GeometryError("k: patch " + std::to_string(k1) + "x" + std::to_string(k2) +
                        " must satisfy 1 < k < input extent " + std::to_string(input_rows) +
                        "x" + std::to_string(input_cols));
  }
  if (h1 == 0 || h2 == 0 || h1 > input_rows || h2 > input_cols) {
    throw GeometryError("h: block " + std::to_string(h1) + "x" + std::to_string(h2) +
                        " does not fit input " + std::to_string(input_rows) + "x" +
                        std::to_string(input_cols));
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw ConfigError("overlap: ratio " + to_string_compact(overlap) + " outside [0, 1)");
  }
  if (!std::isfinite(threshold)) throw ConfigError("threshold: must be finite");
  family.validate();
}

BlockGeometry NetConfig::blocks() const {
  return block_geometry(input_rows, input_cols, h1, h2, overlap);
}

std::size_t NetConfig::feature_dim() const {
  return hashed_maps() * blocks().count() * bins();
}

// ---------------------------------------------------------------------------

void FeatureVector::push_back(std::size_t index, float value) {
  if (index >= dim_ || (!index_.empty() && index <= index_.back())) {
    throw ShapeError("feature vector: index out of order or out of range");
  }
  index_.push_back(static_cast<std::uint32_t>(index));
  value_.push_back(value);
}

double FeatureVector::at(std::size_t index) const {
  if (index >= dim_) throw ShapeError("feature vector: index out of range");
  const auto it = std::lower_bound(index_.begin(), index_.end(), index);
  if (it == index_.end() || *it != index) return 0.0;
  return value_[static_cast<std::size_t>(it - index_.begin())];
}

std::vector<double> FeatureVector::dense() const {
  std::vector<double> out(dim_, 0.0);
  for (std::size_t i = 0; i < index_.size(); ++i) out[index_[i]] = value_[i];
  return out;
}

double FeatureVector::sum() const {
  return std::accumulate(value_.begin(), value_.end(), 0.0);
}

// ---------------------------------------------------------------------------

std::vector<RealGrid> extract_patches(const RealGrid& image, std::size_t k1, std::size_t k2) {
  if (k1 == 0 || k2 == 0) throw GeometryError("k: patch size must be positive");
  std::vector<RealGrid> patches;
  patches.reserve(image.size());
  for (std::size_t u = 0; u < image.rows(); ++u) {
    for (std::size_t v = 0; v < image.cols(); ++v) {
      RealGrid patch(k1, k2);
      centered_patch(image, u, v, k1, k2, patch.values());
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

std::vector<RealGrid> apply_bank(const RealGrid& input, const KernelBank& bank) {
  const std::size_t k1 = bank.rows();
  const std::size_t k2 = bank.cols();
  const std::size_t count = bank.size();
  std::vector<RealGrid> maps(count, RealGrid(input.rows(), input.cols()));
  std::vector<double> patch(k1 * k2);
  std::vector<double> response(count);
  for (std::size_t u = 0; u < input.rows(); ++u) {
    for (std::size_t v = 0; v < input.cols(); ++v) {
      centered_patch(input, u, v, k1, k2, patch);
      bank.project(patch, response);
      for (std::size_t j = 0; j < count; ++j) maps[j](u, v) = response[j];
    }
  }
  return maps;
}

std::vector<FeatureMap> run_stage(std::span<const FeatureMap> inputs, const KernelBank& bank) {
  std::vector<FeatureMap> out;
  out.reserve(inputs.size() * bank.size());
  for (const auto& input : inputs) {
    auto maps = apply_bank(input.grid, bank);
    for (std::size_t j = 0; j < maps.size(); ++j) {
      FeatureMap fm;
      fm.grid = std::move(maps[j]);
      fm.provenance.image_id = input.provenance.image_id;
      fm.provenance.stage = input.provenance.stage + 1;
      fm.provenance.path = input.provenance.path;
      fm.provenance.path.push_back(j);
      out.push_back(std::move(fm));
    }
  }
  return out;
}

BinaryGrid binarize(const RealGrid& map, double t) {
  BinaryGrid out(map.rows(), map.cols());
  auto src = map.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] >= t ? 1 : 0;
  return out;
}

HashedMap hash_maps(std::span<const BinaryGrid> maps) {
  if (maps.empty() || maps.size() > kMaxHashBits) {
    throw ConfigError("hash_maps: need between 1 and " + std::to_string(kMaxHashBits) +
                      " binary maps, got " + std::to_string(maps.size()));
  }
  HashedMap out{Grid<std::uint32_t>(maps[0].rows(), maps[0].cols()),
                static_cast<unsigned>(maps.size())};
  auto dst = out.grid.values();
  for (std::size_t k = 0; k < maps.size(); ++k) {
    if (!maps[k].same_shape(maps[0])) throw ShapeError("hash_maps: binary maps differ in shape");
    auto src = maps[k].values();
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i]) dst[i] |= std::uint32_t{1} << k;
    }
  }
  return out;
}

std::vector<BinaryGrid> unhash(const HashedMap& hashed) {
  std::vector<BinaryGrid> maps(hashed.bits, BinaryGrid(hashed.grid.rows(), hashed.grid.cols()));
  auto src = hashed.grid.values();
  for (unsigned k = 0; k < hashed.bits; ++k) {
    auto dst = maps[k].values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] >> k) & 1u;
  }
  return maps;
}

namespace {

// Appends the block histograms of one hashed map to `out` starting at `offset`.
// `counts` is scratch space of `bins` entries.
void append_histograms(const HashedMap& hashed, std::size_t h1, std::size_t h2,
                       const BlockGeometry& geometry, std::size_t bins, std::size_t offset,
                       std::vector<std::uint32_t>& counts, std::vector<std::uint32_t>& touched,
                       FeatureVector& out) {
  for (std::size_t br = 0; br < geometry.blocks_rows; ++br) {
    for (std::size_t bc = 0; bc < geometry.blocks_cols; ++bc) {
      touched.clear();
      const std::size_t r0 = br * geometry.stride_rows;
      const std::size_t c0 = bc * geometry.stride_cols;
      for (std::size_t r = r0; r < r0 + h1; ++r) {
        for (std::size_t c = c0; c < c0 + h2; ++c) {
          const std::uint32_t value = hashed.grid(r, c);
          if (counts[value]++ == 0) touched.push_back(value);
        }
      }
      std::sort(touched.begin(), touched.end());
      const std::size_t base = offset + (br * geometry.blocks_cols + bc) * bins;
      for (auto value : touched) {
        out.push_back(base + value, static_cast<float>(counts[value]));
        counts[value] = 0;
      }
    }
  }
}

}  // namespace

std::vector<double> block_histogram(const HashedMap& hashed, std::size_t h1, std::size_t h2,
                                    double overlap, std::size_t bins) {
  const auto geometry = block_geometry(hashed.grid.rows(), hashed.grid.cols(), h1, h2, overlap);
  if (bins < (std::size_t{1} << hashed.bits)) {
    throw ConfigError("block_histogram: " + std::to_string(bins) + " bins cannot hold " +
                      std::to_string(hashed.bits) + "-bit hashes");
  }
  FeatureVector fv(geometry.count() * bins);
  std::vector<std::uint32_t> counts(bins, 0);
  std::vector<std::uint32_t> touched;
  append_histograms(hashed, h1, h2, geometry, bins, 0, counts, touched, fv);
  return fv.dense();
}

// ---------------------------------------------------------------------------

NetBanks build_net_banks(const NetConfig& config) {
  config.validate();
  if (config.family.tag == Family::PCA) {
    throw ConfigError("family: pca filters must be learned, see learn_pca_banks");
  }
  NetBanks banks{build_kernel_bank(config.family, config.k1, config.k2, config.l1,
                                   config.reduction),
                 std::nullopt};
  if (config.stages == 2) {
    banks.second = build_kernel_bank(config.family, config.k1, config.k2, config.l2,
                                      config.reduction);
  }
  return banks;
}

std::vector<RealGrid> output_maps(const RealGrid& image, const NetConfig& config,
                                  const NetBanks& banks) {
  if (banks.first.size() != config.l1) {
    throw ShapeError("first-stage bank has " + std::to_string(banks.first.size()) +
                     " filters, config expects l1 = " + std::to_string(config.l1));
  }
  auto first = apply_bank(image, banks.first);
  if (config.stages == 1) return first;
  if (!banks.second || banks.second->size() != config.l2) {
    throw ShapeError("second-stage bank missing or not matching l2");
  }
  std::vector<RealGrid> out;
  out.reserve(config.l1 * config.l2);
  for (const auto& parent : first) {
    auto children = apply_bank(parent, *banks.second);
    for (auto& child : children) out.push_back(std::move(child));
  }
  return out;
}

FeatureVector pool_features(std::span<const RealGrid> maps, const NetConfig& config,
                            double threshold) {
  const std::size_t group = config.hash_bits();
  const std::size_t groups = config.hashed_maps();
  if (maps.size() != group * groups) {
    throw ShapeError("pool_features: expected " + std::to_string(group * groups) +
                     " maps, got " + std::to_string(maps.size()));
  }
  const auto geometry =
      block_geometry(maps[0].rows(), maps[0].cols(), config.h1, config.h2, config.overlap);
  const std::size_t bins = config.bins();
  const std::size_t segment = geometry.count() * bins;
  FeatureVector fv(groups * segment);
  std::vector<std::uint32_t> counts(bins, 0);
  std::vector<std::uint32_t> touched;
  std::vector<BinaryGrid> binary(group);
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t k = 0; k < group; ++k) binary[k] = binarize(maps[g * group + k], threshold);
    const auto hashed = hash_maps(binary);
    append_histograms(hashed, config.h1, config.h2, geometry, bins, g * segment, counts,
                      touched, fv);
  }
  return fv;
}

FeatureVector extract_features(const RealGrid& image, const NetConfig& config,
                               const NetBanks& banks) {
  const auto maps = output_maps(image, config, banks);
  return pool_features(maps, config, config.threshold);
}

std::vector<FeatureVector> extract_features_batch(std::span<const RealGrid> images,
                                                  const NetConfig& config,
                                                  const NetBanks& banks, double threshold,
                                                  unsigned threads) {
  std::vector<FeatureVector> out(images.size());
  parallel_for(images.size(), threads, [&](std::size_t i) {
    const auto maps = output_maps(images[i], config, banks);
    out[i] = pool_features(maps, config, threshold);
  });
  return out;
}

// ---------------------------------------------------------------------------

double ones_fraction(std::span<const BinaryGrid> maps) {
  std::size_t ones = 0;
  std::size_t total = 0;
  for (const auto& m : maps) {
    for (auto b : m.values()) ones += b != 0;
    total += m.size();
  }
  if (total == 0) throw ShapeError("ones_fraction: no entries");
  return static_cast<double>(ones) / static_cast<double>(total);
}

double ones_fraction(std::span<const RealGrid> maps, double t) {
  std::size_t ones = 0;
  std::size_t total = 0;
  for (const auto& m : maps) {
    for (double v : m.values()) ones += v >= t;
    total += m.size();
  }
  if (total == 0) throw ShapeError("ones_fraction: no entries");
  return static_cast<double>(ones) / static_cast<double>(total);
}

double auto_threshold(std::span<const RealGrid> maps, Interval target, double resolution) {
  if (!(target.lo >= 0.0 && target.hi <= 1.0 && target.lo <= target.hi)) {
    throw ConfigError("auto_threshold: target interval must satisfy 0 <= lo <= hi <= 1");
  }
  std::vector<double> pooled;
  for (const auto& m : maps) pooled.insert(pooled.end(), m.values().begin(), m.values().end());
  if (pooled.empty()) throw ShapeError("auto_threshold: no map values");
  std::sort(pooled.begin(), pooled.end());
  const double n = static_cast<double>(pooled.size());
  auto fraction = [&](double t) {
    const auto it = std::lower_bound(pooled.begin(), pooled.end(), t);
    return static_cast<double>(pooled.end() - it) / n;
  };

  const double lo_value = pooled.front();
  const double hi_value = pooled.back();
  // fraction(lo_value) == 1; return it when the whole range is acceptable.
  if (target.hi >= 1.0) return lo_value;

  double below = lo_value;  // fraction > target.hi
  double above = std::nextafter(hi_value, std::numeric_limits<double>::infinity());
  const double tolerance = resolution * std::max(hi_value - lo_value, 0.0);
  while (above - below > tolerance) {
    const double mid = below + 0.5 * (above - below);
    if (mid <= below || mid >= above) break;
    if (fraction(mid) <= target.hi) {
      above = mid;
    } else {
      below = mid;
    }
  }
  const double achieved = fraction(above);
  if (achieved < target.lo) {
    std::ostringstream msg;
    msg << "auto_threshold: ones fraction jumps from " << fraction(below) << " to "
        << achieved << " around t = " << above << ", target [" << target.lo << ", "
        << target.hi << "] unreachable";
    throw SearchError(msg.str());
  }
  return above;
}

}  // namespace momentsnet
