#pragma once

#include "momentsnet/grid.hpp"

namespace momentsnet {

/// Single-channel image with intensities in [0, 1].
struct Image {
  RealGrid pixels;
  int label = -1;      // -1 when unlabelled
  std::size_t id = 0;  // position in the originating dataset

  std::size_t rows() const noexcept { return pixels.rows(); }
  std::size_t cols() const noexcept { return pixels.cols(); }
};

}  // namespace momentsnet
