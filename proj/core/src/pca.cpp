#include "momentsnet/pca.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "momentsnet/errors.hpp"
#include "momentsnet/parallel.hpp"

namespace momentsnet {

PatchCovariance::PatchCovariance(std::size_t k1, std::size_t k2)
    : k1_(k1), k2_(k2), dim_(k1 * k2), sum_(dim_ * dim_, 0.0) {
  if (k1 == 0 || k2 == 0) throw GeometryError("k: patch size must be positive");
}

void PatchCovariance::add(std::span<const double> patch) {
  if (patch.size() != dim_) throw ShapeError("patch covariance: patch size mismatch");
  for (std::size_t i = 0; i < dim_; ++i) {
    const double pi = patch[i];
    if (pi == 0.0) continue;
    double* row = sum_.data() + i * dim_;
    for (std::size_t j = i; j < dim_; ++j) row[j] += pi * patch[j];
  }
  ++count_;
}

void PatchCovariance::add_map(const RealGrid& map) {
  std::vector<double> patch(dim_);
  for (std::size_t u = 0; u < map.rows(); ++u) {
    for (std::size_t v = 0; v < map.cols(); ++v) {
      centered_patch(map, u, v, k1_, k2_, patch);
      add(patch);
    }
  }
}

void PatchCovariance::merge(const PatchCovariance& other) {
  if (other.k1_ != k1_ || other.k2_ != k2_) throw ShapeError("patch covariance: size mismatch");
  for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += other.sum_[i];
  count_ += other.count_;
}

std::vector<double> PatchCovariance::matrix() const {
  std::vector<double> out(dim_ * dim_, 0.0);
  if (count_ == 0) return out;
  const double scale = 1.0 / static_cast<double>(count_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      const double v = sum_[i * dim_ + j] * scale;
      out[i * dim_ + j] = v;
      out[j * dim_ + i] = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n, double tolerance,
                            std::size_t max_sweeps) {
  if (a.size() != n * n) throw ShapeError("jacobi_eigen: matrix is not n x n");
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_norm2 = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a[i * n + j] * a[i * n + j];
    }
    return s;
  };
  double total2 = 0.0;
  for (double x : a) total2 += x * x;
  const double target = tolerance * tolerance * std::max(total2, 1e-300);

  SymmetricEigen out;
  out.dim = n;
  while (out.sweeps < max_sweeps && off_norm2() > target) {
    ++out.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        // Rotation angle zeroing a[p][q] (Rutishauser's stable form).
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t col = order[j];
    out.values[j] = a[col * n + col];
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (std::fabs(v[k * n + col]) > std::fabs(v[argmax * n + col])) argmax = k;
    }
    const double sign = v[argmax * n + col] < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.vectors[j * n + k] = sign * v[k * n + col];
  }
  return out;
}

std::vector<double> pca_spectrum(const PatchCovariance& covariance) {
  return jacobi_eigen(covariance.matrix(), covariance.dim()).values;
}

KernelBank learn_pca_filters(const PatchCovariance& covariance, std::size_t count) {
  const std::size_t dim = covariance.dim();
  if (count == 0 || count > dim) {
    throw CapacityError("pca: cannot learn " + std::to_string(count) + " filters from " +
                        std::to_string(dim) + "-dimensional patches");
  }
  if (covariance.sample_count() < dim) {
    throw CapacityError("pca: need at least " + std::to_string(dim) + " patches, got " +
                        std::to_string(covariance.sample_count()));
  }
  const auto eig = jacobi_eigen(covariance.matrix(), dim);
  const double top = std::max(eig.values.front(), 0.0);
  std::size_t rank = 0;
  for (double lambda : eig.values) rank += lambda > 1e-12 * top && lambda > 0.0;
  if (rank < count) {
    throw CapacityError("pca: covariance rank " + std::to_string(rank) + " is below the " +
                        std::to_string(count) + " requested filters");
  }

  std::vector<ComplexGrid> filters;
  std::vector<OrderIndex> orders;
  for (std::size_t j = 0; j < count; ++j) {
    ComplexGrid g(covariance.k1(), covariance.k2());
    auto dst = g.values();
    for (std::size_t k = 0; k < dim; ++k) dst[k] = eig.vectors[j * dim + k];
    filters.push_back(std::move(g));
    orders.push_back({static_cast<int>(j), 0});
  }
  return KernelBank(MomentFamily{Family::PCA, {}}, covariance.k1(), covariance.k2(),
                    std::move(filters), std::move(orders), 1.0);
}

KernelBank learn_pca_filters(std::span<const RealGrid> patches, std::size_t count) {
  if (patches.empty()) throw CapacityError("pca: no patches");
  PatchCovariance cov(patches[0].rows(), patches[0].cols());
  for (const auto& p : patches) {
    if (!p.same_shape(patches[0])) throw ShapeError("pca: patches differ in shape");
    cov.add(p.values());
  }
  return learn_pca_filters(cov, count);
}

namespace {

PatchCovariance sharded_covariance(std::size_t k1, std::size_t k2, std::size_t count,
                                   unsigned threads,
                                   const std::function<void(std::size_t, PatchCovariance&)>& add) {
  // Fixed shard count: the summation order, and so the bits of the result,
  // must not depend on how many threads are available.
  constexpr std::size_t kShards = 16;
  const std::size_t shards = std::max<std::size_t>(1, std::min(kShards, count));
  std::vector<PatchCovariance> parts(shards, PatchCovariance(k1, k2));
  parallel_for(shards, threads, [&](std::size_t s) {
    for (std::size_t i = s; i < count; i += shards) add(i, parts[s]);
  });
  for (std::size_t s = 1; s < shards; ++s) parts[0].merge(parts[s]);
  return std::move(parts[0]);
}

}  // namespace

NetBanks learn_pca_banks(const NetConfig& config, std::span<const RealGrid> training_images,
                         unsigned threads) {
  config.validate();
  if (training_images.empty()) throw CapacityError("pca: no training images");
  const auto first_cov = sharded_covariance(
      config.k1, config.k2, training_images.size(), threads,
      [&](std::size_t i, PatchCovariance& cov) { cov.add_map(training_images[i]); });
  NetBanks banks{learn_pca_filters(first_cov, config.l1), std::nullopt};
  if (config.stages == 2) {
    const auto second_cov = sharded_covariance(
        config.k1, config.k2, training_images.size(), threads,
        [&](std::size_t i, PatchCovariance& cov) {
          for (const auto& map : apply_bank(training_images[i], banks.first)) cov.add_map(map);
        });
    banks.second = learn_pca_filters(second_cov, config.l2);
  }
  return banks;
}

}  // namespace momentsnet
