#include "momentsnet/data.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include "momentsnet/errors.hpp"

namespace momentsnet {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxPixels = std::size_t{1} << 26;

std::vector<unsigned char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Minimal cursor over the PGM header: whitespace- and comment-separated
// decimal tokens.
class PgmCursor {
 public:
  PgmCursor(const std::vector<unsigned char>& bytes, const fs::path& path)
      : bytes_(bytes), path_(path) {}

  std::size_t number(const char* what) {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw CorruptHeaderError(path_.string() + ": missing or malformed " + what);
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_++] - '0');
      if (value > kMaxPixels) throw DimensionOverflowError(path_.string() + ": " + what + " too large");
    }
    return value;
  }

  // The single whitespace byte that ends the P5 header.
  void end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw CorruptHeaderError(path_.string() + ": header not terminated");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 2;
};

Image load_pgm(const std::vector<unsigned char>& bytes, const fs::path& path) {
  const bool ascii = bytes[1] == '2';
  PgmCursor cursor(bytes, path);
  const std::size_t cols = cursor.number("width");
  const std::size_t rows = cursor.number("height");
  const std::size_t maxval = cursor.number("maxval");
  if (rows == 0 || cols == 0) throw DimensionOverflowError(path.string() + ": zero dimension");
  if (rows * cols > kMaxPixels) throw DimensionOverflowError(path.string() + ": image too large");
  if (maxval == 0 || maxval > 65535) throw CorruptHeaderError(path.string() + ": bad maxval");

  Image img{RealGrid(rows, cols), -1, 0};
  auto dst = img.pixels.values();
  const double scale = 1.0 / static_cast<double>(maxval);
  if (ascii) {
    for (auto& v : dst) {
      const std::size_t value = cursor.number("pixel value");
      v = std::min(1.0, static_cast<double>(value) * scale);
    }
    return img;
  }
  cursor.end_of_header();
  const std::size_t width = maxval > 255 ? 2 : 1;
  if (bytes.size() - cursor.pos() < rows * cols * width) {
    throw CorruptHeaderError(path.string() + ": truncated pixel data");
  }
  const unsigned char* p = bytes.data() + cursor.pos();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const std::size_t value = width == 1 ? p[i] : (std::size_t{p[2 * i]} << 8) | p[2 * i + 1];
    dst[i] = std::min(1.0, static_cast<double>(value) * scale);
  }
  return img;
}

Image load_png(const fs::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw CorruptHeaderError(path.string() + ": " + msg);
  }
  if (png.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA)) {
    png_image_free(&png);
    throw UnsupportedFormatError(path.string() + ": only single-channel PNG is supported");
  }
  if (png.width == 0 || png.height == 0 ||
      std::size_t{png.width} * png.height > kMaxPixels) {
    png_image_free(&png);
    throw DimensionOverflowError(path.string() + ": unsupported PNG dimensions");
  }
  png.format = PNG_FORMAT_GRAY;
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw CorruptHeaderError(path.string() + ": " + msg);
  }
  Image img{RealGrid(png.height, png.width), -1, 0};
  auto dst = img.pixels.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = buffer[i] / 255.0;
  return img;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (const auto& img : images) {
    if (img.label >= 0 && static_cast<std::size_t>(img.label) < counts.size()) ++counts[img.label];
  }
  return counts;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(img.label);
  return out;
}

std::vector<RealGrid> Dataset::grids() const {
  std::vector<RealGrid> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(img.pixels);
  return out;
}

void Dataset::validate() const {
  for (const auto& img : images) {
    if (img.label < 0 || static_cast<std::size_t>(img.label) >= class_names.size()) {
      throw ConfigError("dataset: label " + std::to_string(img.label) + " has no class name");
    }
    if (!img.pixels.same_shape(images.front().pixels)) {
      throw ConfigError("dataset: images differ in size");
    }
  }
}

Image load_image(const fs::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return load_png(path);
  if (bytes.size() < 2) throw CorruptHeaderError(path.string() + ": file too short");
  if (bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) return load_pgm(bytes, path);
  throw UnsupportedFormatError(path.string() + ": not a P2/P5 PGM or PNG file");
}

void save_pgm(const fs::path& path, const RealGrid& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << pixels.cols() << ' ' << pixels.rows() << "\n255\n";
  for (double v : pixels.values()) {
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(clamp01(v) * 255.0))));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

RealGrid rescale(const RealGrid& src, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw GeometryError("rescale: target size must be positive");
  if (src.rows() == rows && src.cols() == cols) {
    RealGrid out = src;
    for (auto& v : out.values()) v = clamp01(v);
    return out;
  }
  RealGrid out(rows, cols);
  const double sy = static_cast<double>(src.rows()) / static_cast<double>(rows);
  const double sx = static_cast<double>(src.cols()) / static_cast<double>(cols);
  auto sample = [&](double y, double x) {
    y = std::clamp(y, 0.0, static_cast<double>(src.rows() - 1));
    x = std::clamp(x, 0.0, static_cast<double>(src.cols() - 1));
    const auto y0 = static_cast<std::size_t>(std::floor(y));
    const auto x0 = static_cast<std::size_t>(std::floor(x));
    const std::size_t y1 = std::min(y0 + 1, src.rows() - 1);
    const std::size_t x1 = std::min(x0 + 1, src.cols() - 1);
    const double fy = y - static_cast<double>(y0);
    const double fx = x - static_cast<double>(x0);
    return (1 - fy) * ((1 - fx) * src(y0, x0) + fx * src(y0, x1)) +
           fy * ((1 - fx) * src(y1, x0) + fx * src(y1, x1));
  };
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = (static_cast<double>(r) + 0.5) * sy - 0.5;
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = (static_cast<double>(c) + 0.5) * sx - 0.5;
      out(r, c) = clamp01(sample(y, x));
    }
  }
  return out;
}

Image rescale(const Image& image, std::size_t rows, std::size_t cols) {
  return Image{rescale(image.pixels, rows, cols), image.label, image.id};
}

RealGrid rotate(const RealGrid& src, double degrees) {
  RealGrid out(src.rows(), src.cols());
  const double a = degrees * std::numbers::pi / 180.0;
  const double ca = std::cos(a);
  const double sa = std::sin(a);
  const double cy = (static_cast<double>(src.rows()) - 1.0) / 2.0;
  const double cx = (static_cast<double>(src.cols()) - 1.0) / 2.0;
  auto at = [&](long r, long c) {
    if (r < 0 || c < 0 || r >= static_cast<long>(src.rows()) || c >= static_cast<long>(src.cols())) {
      return 0.0;
    }
    return src(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  };
  for (std::size_t r = 0; r < src.rows(); ++r) {
    for (std::size_t c = 0; c < src.cols(); ++c) {
      // Output (x right, y up) rotated back into the source frame.
      const double x = static_cast<double>(c) - cx;
      const double y = cy - static_cast<double>(r);
      const double xs = ca * x + sa * y;
      const double ys = -sa * x + ca * y;
      const double sc = xs + cx;
      const double sr = cy - ys;
      const double r0 = std::floor(sr);
      const double c0 = std::floor(sc);
      const double fr = sr - r0;
      const double fc = sc - c0;
      const auto ri = static_cast<long>(r0);
      const auto ci = static_cast<long>(c0);
      out(r, c) = (1 - fr) * ((1 - fc) * at(ri, ci) + fc * at(ri, ci + 1)) +
                  fr * ((1 - fc) * at(ri + 1, ci) + fc * at(ri + 1, ci + 1));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split: train fraction must lie in (0, 1)");
  }
  const std::size_t classes = dataset.class_names.size();
  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t i = 0; i < dataset.images.size(); ++i) {
    const int label = dataset.images[i].label;
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw ConfigError("split: image " + std::to_string(i) + " has invalid label");
    }
    members[label].push_back(i);
  }
  std::vector<char> in_train(dataset.images.size(), 0);
  for (std::size_t c = 0; c < classes; ++c) {
    auto& idx = members[c];
    if (idx.size() < 2) {
      throw ConfigError("split: class '" + dataset.class_names[c] + "' has fewer than 2 images");
    }
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (c + 1)));
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
    auto take = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(idx.size())));
    take = std::clamp<std::size_t>(take, 1, idx.size() - 1);
    for (std::size_t k = 0; k < take; ++k) in_train[idx[k]] = 1;
  }
  Dataset train{{}, dataset.class_names, dataset.provenance + " | train split"};
  Dataset test{{}, dataset.class_names, dataset.provenance + " | test split"};
  for (std::size_t i = 0; i < dataset.images.size(); ++i) {
    (in_train[i] ? train : test).images.push_back(dataset.images[i]);
  }
  return {std::move(train), std::move(test)};
}

void write_dataset(const fs::path& root, const Dataset& dataset) {
  dataset.validate();
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());
  std::ofstream manifest(root / "manifest.csv");
  if (!manifest) throw IoError("cannot write " + (root / "manifest.csv").string());
  manifest << "path,label,class_name\n";
  std::vector<std::size_t> next(dataset.class_names.size(), 0);
  for (const auto& img : dataset.images) {
    const auto& name = dataset.class_names[img.label];
    fs::create_directories(root / name, ec);
    if (ec) throw IoError("cannot create " + (root / name).string() + ": " + ec.message());
    char file[32];
    std::snprintf(file, sizeof file, "%04zu.pgm", next[img.label]++);
    const fs::path rel = fs::path(name) / file;
    save_pgm(root / rel, img.pixels);
    manifest << rel.generic_string() << ',' << img.label << ',' << name << '\n';
  }
  if (!manifest) throw IoError("write failed for manifest.csv");
}

Dataset load_dataset(const fs::path& root,
                     std::optional<std::pair<std::size_t, std::size_t>> resize) {
  std::ifstream manifest(root / "manifest.csv");
  if (!manifest) throw IoError("cannot open " + (root / "manifest.csv").string());
  std::string line;
  if (!std::getline(manifest, line) || line.rfind("path,label,class_name", 0) != 0) {
    throw IoError("manifest.csv: expected header path,label,class_name");
  }
  Dataset ds;
  ds.provenance = "directory " + root.string();
  std::size_t lineno = 1;
  while (std::getline(manifest, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw IoError("manifest.csv:" + std::to_string(lineno) + ": expected 3 columns");
    }
    int label = 0;
    try {
      label = std::stoi(fields[1]);
    } catch (const std::exception&) {
      throw IoError("manifest.csv:" + std::to_string(lineno) + ": bad label");
    }
    if (label < 0) throw IoError("manifest.csv:" + std::to_string(lineno) + ": negative label");
    if (static_cast<std::size_t>(label) >= ds.class_names.size()) {
      ds.class_names.resize(static_cast<std::size_t>(label) + 1);
    }
    auto& name = ds.class_names[label];
    if (name.empty()) {
      name = fields[2];
    } else if (name != fields[2]) {
      throw IoError("manifest.csv:" + std::to_string(lineno) + ": label " + fields[1] +
                    " maps to two class names");
    }
    Image img = load_image(root / fields[0]);
    if (resize) img = rescale(img, resize->first, resize->second);
    img.label = label;
    img.id = ds.images.size();
    ds.images.push_back(std::move(img));
  }
  for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
    if (ds.class_names[c].empty()) ds.class_names[c] = "class" + std::to_string(c);
  }
  ds.validate();
  return ds;
}

}  // namespace momentsnet
