#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "momentsnet/classifier.hpp"
#include "momentsnet/data.hpp"
#include "momentsnet/pipeline.hpp"

namespace momentsnet {

/// One row per image: id,label,v0,v1,... (dense values).
void write_features_csv(std::ostream& out, std::span<const FeatureVector> features,
                        std::span<const Image> images);

/// "MNFV", version byte, LE u32 image count, LE u32 dims, then dense f32
/// values row-major.
void write_features_binary(std::ostream& out, std::span<const FeatureVector> features);
/// Dense rows; throws CorruptHeaderError on a bad magic, version or size.
std::vector<std::vector<float>> read_features_binary(std::istream& in);

/// "MNLM", version byte, LE u32 classes, LE u32 dims, then f64 biases and
/// f64 weights (row-major). Class labels are taken to be 0..classes-1.
void save_model(std::ostream& out, const LinearModel& model);
void save_model(const std::filesystem::path& path, const LinearModel& model);
LinearModel load_model(std::istream& in);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace momentsnet
