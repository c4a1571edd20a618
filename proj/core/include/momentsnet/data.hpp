#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "momentsnet/grid.hpp"
#include "momentsnet/image.hpp"

namespace momentsnet {

struct Dataset {
  std::vector<Image> images;
  std::vector<std::string> class_names;
  std::string provenance;

  std::size_t size() const noexcept { return images.size(); }
  std::vector<std::size_t> class_counts() const;
  std::vector<int> labels() const;
  std::vector<RealGrid> grids() const;

  /// Throws ConfigError when a label is out of range or sizes differ.
  void validate() const;
};

/// Reads a P2/P5 PGM or a single-channel PNG and maps intensities to [0, 1].
/// Throws UnsupportedFormatError, CorruptHeaderError or DimensionOverflowError.
Image load_image(const std::filesystem::path& path);

/// Writes an 8-bit binary (P5) PGM; values are clamped to [0, 1] and scaled to 255.
void save_pgm(const std::filesystem::path& path, const RealGrid& pixels);

/// Bilinear resampling with pixel-centre alignment; output clamped to [0, 1].
/// Identity when the size already matches.
Image rescale(const Image& image, std::size_t rows, std::size_t cols);
RealGrid rescale(const RealGrid& pixels, std::size_t rows, std::size_t cols);

/// Counter-clockwise rotation about the image centre, bilinear, zero fill.
RealGrid rotate(const RealGrid& pixels, double degrees);

// ---------------------------------------------------------------------------
// Synthetic rotated binary shapes

struct ShapeOptions {
  std::size_t num_classes = 9;
  std::size_t rotations = 12;   // evenly spaced angles; must divide 360
  std::size_t replicas = 12;    // jittered copies per angle
  std::size_t size = 32;        // output raster
  std::size_t render_size = 128;
  std::uint64_t seed = 1;
  double max_shift = 0.06;      // in units of the half-width
  double max_scale = 0.08;      // relative
  // Per-replica instance variation so that replicas are different members
  // of a class rather than copies: anisotropic stretch and a smooth warp.
  double max_stretch = 0.15;
  double max_warp = 0.06;
};

/// Names of the built-in silhouette prototypes, in class order.
std::vector<std::string_view> shape_names();

/// Deformation of a prototype in its own frame: a point q belongs to the
/// instance when the prototype contains
///   S(q) + warp * (sin(freq_x * S(q).y + phase_x), sin(freq_y * S(q).x + phase_y)),
/// where S stretches by (1 + stretch) along `stretch_degrees` and shrinks by
/// 1 / (1 + stretch) across it. The default is the prototype itself.
struct ShapeInstance {
  double stretch = 0.0;
  double stretch_degrees = 0.0;
  double warp = 0.0;
  double freq_x = 0.0;
  double freq_y = 0.0;
  double phase_x = 0.0;
  double phase_y = 0.0;
};

/// Pose of a rendered instance; the identity pose is {0, 1, 0, 0}.
struct ShapePose {
  double degrees = 0.0;
  double scale = 1.0;
  double shift_x = 0.0;
  double shift_y = 0.0;
  ShapeInstance instance{};
};

/// Rasterises prototype `index` at `pose` on a render_size grid, downsamples
/// to `size` by area averaging and binarises at 0.5.
RealGrid render_shape(std::size_t index, const ShapePose& pose, std::size_t size,
                      std::size_t render_size = 128);

/// Continuous-tone high-resolution raster of a prototype (no binarisation).
RealGrid render_shape_raw(std::size_t index, const ShapePose& pose, std::size_t render_size);

/// Dataset ordered by (class, rotation, replica), rotations * replicas images
/// per class. Deterministic in (options, seed).
Dataset generate_shapes(const ShapeOptions& options);

/// Stratified seeded split. Per class, round(train_fraction * count) images
/// (at least one on each side) go to the training set. Relative order of the
/// input is kept inside each part. Throws ConfigError for a class with fewer
/// than two images or a fraction outside (0, 1).
std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  std::uint64_t seed);

/// Writes root/<class_name>/<index>.pgm and root/manifest.csv
/// (columns path,label,class_name; paths relative to root).
void write_dataset(const std::filesystem::path& root, const Dataset& dataset);

/// Reads a dataset written by write_dataset (or any directory with the same
/// manifest layout), optionally rescaling every image.
Dataset load_dataset(const std::filesystem::path& root,
                     std::optional<std::pair<std::size_t, std::size_t>> resize = std::nullopt);

}  // namespace momentsnet
