#include "momentsnet/formats.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>

#include "momentsnet/errors.hpp"

namespace momentsnet {

namespace {

constexpr std::uint8_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

template <typename Word, typename Float>
void put_float(std::ostream& out, Float x) {
  auto bits = std::bit_cast<Word>(x);
  char b[sizeof(Word)];
  for (std::size_t i = 0; i < sizeof(Word); ++i) {
    b[i] = static_cast<char>(bits & 0xff);
    bits >>= 8;
  }
  out.write(b, sizeof(Word));
}

template <typename Word>
Word get_word(std::istream& in, const char* what) {
  unsigned char b[sizeof(Word)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(Word))) {
    throw CorruptHeaderError(std::string("truncated ") + what);
  }
  Word v = 0;
  for (std::size_t i = sizeof(Word); i-- > 0;) v = (v << 8) | b[i];
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw DimensionOverflowError(std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

void expect_header(std::istream& in, const char* magic) {
  char m[4];
  if (!in.read(m, 4) || std::memcmp(m, magic, 4) != 0) {
    throw CorruptHeaderError(std::string("missing ") + magic + " magic");
  }
  const auto version = get_word<std::uint8_t>(in, "version");
  if (version != kVersion) {
    throw UnsupportedFormatError(std::string(magic) + " version " + std::to_string(version));
  }
}

}  // namespace

void write_features_csv(std::ostream& out, std::span<const FeatureVector> features,
                        std::span<const Image> images) {
  if (features.size() != images.size()) throw ShapeError("feature/image count mismatch");
  for (std::size_t i = 0; i < features.size(); ++i) {
    out << images[i].id << ',' << images[i].label;
    const auto& f = features[i];
    std::size_t k = 0;
    for (std::size_t d = 0; d < f.dim(); ++d) {
      out << ',';
      if (k < f.nonzeros() && f.indices()[k] == d) {
        out << f.values()[k++];
      } else {
        out << '0';
      }
    }
    out << '\n';
  }
}

void write_features_binary(std::ostream& out, std::span<const FeatureVector> features) {
  const std::size_t dim = features.empty() ? 0 : features.front().dim();
  out.write("MNFV", 4);
  out.put(static_cast<char>(kVersion));
  put_u32(out, checked_u32(features.size(), "image count"));
  put_u32(out, checked_u32(dim, "feature dimension"));
  for (const auto& f : features) {
    if (f.dim() != dim) throw ShapeError("feature vectors differ in dimension");
    std::size_t k = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      const float v = k < f.nonzeros() && f.indices()[k] == d ? f.values()[k++] : 0.0f;
      put_float<std::uint32_t>(out, v);
    }
  }
  if (!out) throw IoError("feature write failed");
}

std::vector<std::vector<float>> read_features_binary(std::istream& in) {
  expect_header(in, "MNFV");
  const auto n = get_word<std::uint32_t>(in, "image count");
  const auto dim = get_word<std::uint32_t>(in, "feature dimension");
  std::vector<std::vector<float>> rows;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<float> row(dim);
    for (auto& v : row) v = std::bit_cast<float>(get_word<std::uint32_t>(in, "feature value"));
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_model(std::ostream& out, const LinearModel& model) {
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    if (model.classes[c] != static_cast<int>(c)) {
      throw ShapeError("model classes must be 0..n-1 to be saved");
    }
  }
  out.write("MNLM", 4);
  out.put(static_cast<char>(kVersion));
  put_u32(out, checked_u32(model.num_classes(), "class count"));
  put_u32(out, checked_u32(model.feature_dim, "feature dimension"));
  for (double b : model.biases) put_float<std::uint64_t>(out, b);
  for (double w : model.weights) put_float<std::uint64_t>(out, w);
  if (!out) throw IoError("model write failed");
}

void save_model(const std::filesystem::path& path, const LinearModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_model(out, model);
}

LinearModel load_model(std::istream& in) {
  expect_header(in, "MNLM");
  LinearModel model;
  const auto classes = get_word<std::uint32_t>(in, "class count");
  model.feature_dim = get_word<std::uint32_t>(in, "feature dimension");
  if (classes < 2) throw CorruptHeaderError("model has fewer than two classes");
  if (std::size_t{classes} * model.feature_dim > (std::size_t{1} << 34)) {
    throw DimensionOverflowError("model too large");
  }
  model.classes.resize(classes);
  std::iota(model.classes.begin(), model.classes.end(), 0);
  model.biases.resize(classes);
  model.weights.resize(std::size_t{classes} * model.feature_dim);
  for (auto& b : model.biases) b = std::bit_cast<double>(get_word<std::uint64_t>(in, "bias"));
  for (auto& w : model.weights) w = std::bit_cast<double>(get_word<std::uint64_t>(in, "weight"));
  // C is not part of the container.
  model.C = 0.0;
  return model;
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace momentsnet
