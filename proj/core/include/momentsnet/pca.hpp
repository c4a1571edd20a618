#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "momentsnet/grid.hpp"
#include "momentsnet/kernels.hpp"
#include "momentsnet/pipeline.hpp"

namespace momentsnet {

/// Second-moment matrix of mean-centred patches, accumulated incrementally.
class PatchCovariance {
 public:
  PatchCovariance(std::size_t k1, std::size_t k2);

  std::size_t k1() const noexcept { return k1_; }
  std::size_t k2() const noexcept { return k2_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t sample_count() const noexcept { return count_; }

  /// Adds one flattened centred patch.
  void add(std::span<const double> patch);
  /// Adds every centred patch of `map` (zero padded, one per pixel).
  void add_map(const RealGrid& map);
  void merge(const PatchCovariance& other);

  /// Symmetric dim x dim matrix (row-major) normalised by the sample count.
  std::vector<double> matrix() const;

 private:
  std::size_t k1_;
  std::size_t k2_;
  std::size_t dim_;
  std::size_t count_ = 0;
  std::vector<double> sum_;  // upper triangle used during accumulation
};

struct SymmetricEigen {
  std::vector<double> values;   // descending
  std::vector<double> vectors;  // row j is the eigenvector of values[j]
  std::size_t dim = 0;
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric row-major n x n matrix until the
/// off-diagonal Frobenius norm falls below `tolerance` times the matrix norm.
/// Eigenpairs are returned in descending eigenvalue order, each eigenvector
/// signed so that its largest-magnitude component is positive.
SymmetricEigen jacobi_eigen(std::vector<double> matrix, std::size_t n,
                            double tolerance = 1e-12, std::size_t max_sweeps = 100);

/// Top-`count` principal directions of the given centred patches, reshaped to
/// k1 x k2 filters in a bank tagged Family::PCA. Throws CapacityError when
/// fewer than `count` patches are supplied or the covariance rank is below
/// `count`.
KernelBank learn_pca_filters(std::span<const RealGrid> patches, std::size_t count);
KernelBank learn_pca_filters(const PatchCovariance& covariance, std::size_t count);

/// Eigenvalues of the covariance behind a learned bank, descending.
std::vector<double> pca_spectrum(const PatchCovariance& covariance);

/// Cascaded PCA banks: stage one from patches of the training images, stage
/// two (if configured) from patches of the stage-one output maps.
NetBanks learn_pca_banks(const NetConfig& config, std::span<const RealGrid> training_images,
                         unsigned threads = 1);

}  // namespace momentsnet
