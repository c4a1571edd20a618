#include <gtest/gtest.h>

#include <png.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "momentsnet/data.hpp"
#include "momentsnet/errors.hpp"
#include "temp_dir.hpp"

using namespace momentsnet;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
  return path;
}

// 1-pixel (8-neighbourhood) dilation of a binary grid.
RealGrid dilate(const RealGrid& g) {
  RealGrid out(g.rows(), g.cols());
  for (long r = 0; r < static_cast<long>(g.rows()); ++r) {
    for (long c = 0; c < static_cast<long>(g.cols()); ++c) {
      for (long dr = -1; dr <= 1; ++dr) {
        for (long dc = -1; dc <= 1; ++dc) {
          const long rr = r + dr;
          const long cc = c + dc;
          if (rr >= 0 && cc >= 0 && rr < static_cast<long>(g.rows()) && cc < static_cast<long>(g.cols()) &&
              g(rr, cc) > 0.5) {
            out(r, c) = 1.0;
          }
        }
      }
    }
  }
  return out;
}

bool inside_dilation(const RealGrid& a, const RealGrid& b) {
  const auto d = dilate(b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.values()[i] > 0.5 && d.values()[i] < 0.5) return false;
  }
  return true;
}

}  // namespace

TEST(LoadImage, AsciiPgmExample) {
  testing_support::TempDir dir;
  const auto img = load_image(write_file(dir / "a.pgm", "P2\n# two by two\n2 2\n255\n0 255\n0 255\n"));
  ASSERT_EQ(img.rows(), 2u);
  ASSERT_EQ(img.cols(), 2u);
  EXPECT_EQ(img.pixels(0, 0), 0.0);
  EXPECT_EQ(img.pixels(0, 1), 1.0);
  EXPECT_EQ(img.pixels(1, 0), 0.0);
  EXPECT_EQ(img.pixels(1, 1), 1.0);
}

TEST(LoadImage, BinaryPgmRoundTripAndSixteenBit) {
  testing_support::TempDir dir;
  RealGrid zeros(32, 32);
  save_pgm(dir / "z.pgm", zeros);
  EXPECT_EQ(load_image(dir / "z.pgm").pixels, zeros);

  RealGrid ramp(3, 5);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp.values()[i] = static_cast<double>(i) / 14.0;
  save_pgm(dir / "r.pgm", ramp);
  const auto back = load_image(dir / "r.pgm").pixels;
  for (std::size_t i = 0; i < ramp.size(); ++i) EXPECT_NEAR(back.values()[i], ramp.values()[i], 0.5 / 255.0);

  std::string wide = "P5 2 1 65535\n";
  wide += std::string("\xff\xff\x80\x00", 4);
  const auto w = load_image(write_file(dir / "w.pgm", wide)).pixels;
  EXPECT_EQ(w(0, 0), 1.0);
  EXPECT_NEAR(w(0, 1), 32768.0 / 65535.0, 1e-15);
}

TEST(LoadImage, DistinctErrors) {
  testing_support::TempDir dir;
  EXPECT_THROW(load_image(write_file(dir / "t.pgm", "P5\n4 4\n255\n\x01\x02")), CorruptHeaderError);
  EXPECT_THROW(load_image(write_file(dir / "h.pgm", "P2\n4")), CorruptHeaderError);
  EXPECT_THROW(load_image(write_file(dir / "m.pgm", "P2\n1 1\n0\n0\n")), CorruptHeaderError);
  EXPECT_THROW(load_image(write_file(dir / "b.bmp", "BM\x00\x00\x00\x00")), UnsupportedFormatError);
  EXPECT_THROW(load_image(write_file(dir / "p3.ppm", "P3\n1 1\n255\n0 0 0\n")), UnsupportedFormatError);
  EXPECT_THROW(load_image(write_file(dir / "big.pgm", "P5\n100000 100000\n255\n")), DimensionOverflowError);
  EXPECT_THROW(load_image(write_file(dir / "zero.pgm", "P5\n0 4\n255\n")), DimensionOverflowError);
  EXPECT_THROW(load_image(dir / "missing.pgm"), IoError);
  // All of them are I/O errors to callers that do not care which.
  EXPECT_THROW(load_image(write_file(dir / "x", "P2\n4")), IoError);
}

TEST(LoadImage, GrayscalePngAndColourRejected) {
  testing_support::TempDir dir;
  const std::uint8_t gray[6] = {0, 51, 102, 153, 204, 255};
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = 3;
  png.height = 2;
  png.format = PNG_FORMAT_GRAY;
  const auto gray_path = (dir / "g.png").string();
  ASSERT_TRUE(png_image_write_to_file(&png, gray_path.c_str(), 0, gray, 0, nullptr));
  const auto img = load_image(gray_path);
  ASSERT_EQ(img.rows(), 2u);
  ASSERT_EQ(img.cols(), 3u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(img.pixels.values()[i], gray[i] / 255.0, 1e-15);

  const std::uint8_t rgb[18] = {};
  png_image colour{};
  colour.version = PNG_IMAGE_VERSION;
  colour.width = 3;
  colour.height = 2;
  colour.format = PNG_FORMAT_RGB;
  const auto rgb_path = (dir / "c.png").string();
  ASSERT_TRUE(png_image_write_to_file(&colour, rgb_path.c_str(), 0, rgb, 0, nullptr));
  EXPECT_THROW(load_image(rgb_path), UnsupportedFormatError);
}

TEST(Rescale, IdentityConstantAndBounds) {
  const RealGrid ramp = [] {
    RealGrid g(6, 9);
    for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] = static_cast<double>(i % 7) / 6.0;
    return g;
  }();
  EXPECT_EQ(rescale(ramp, 6, 9), ramp);
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{3, 3}, {13, 5}, {32, 32}, {1, 1}}) {
    const auto out = rescale(RealGrid(7, 11, 0.375), r, c);
    ASSERT_EQ(out.rows(), r);
    for (double v : out.values()) EXPECT_NEAR(v, 0.375, 1e-15);
    const auto scaled = rescale(ramp, r, c);
    for (double v : scaled.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  EXPECT_THROW(rescale(ramp, 0, 3), GeometryError);
  Image img{ramp, 4, 17};
  const auto scaled = rescale(img, 3, 3);
  EXPECT_EQ(scaled.label, 4);
  EXPECT_EQ(scaled.id, 17u);
}

TEST(Rescale, CheckerboardBilinearOracle) {
  RealGrid board(4, 4);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) board(r, c) = (r + c) % 2 == 0 ? 1.0 : 0.0;
  }
  const auto half = rescale(board, 2, 2);
  // Output centre i maps to source coordinate 2i + 0.5, halfway between two
  // pixels on each axis: the four-neighbour average of a checkerboard.
  for (double v : half.values()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
    EXPECT_NEAR(v, 0.5, 1e-15);
  }
  // Upsampling: explicit bilinear weights at one off-grid point.
  RealGrid src(2, 2);
  src(0, 0) = 0.0;
  src(0, 1) = 1.0;
  src(1, 0) = 0.5;
  src(1, 1) = 0.25;
  const auto up = rescale(src, 4, 4);
  // Output (1, 2) -> source (0.25, 0.75): rows 0/1 weights 0.75/0.25, cols 0/1 weights 0.25/0.75.
  const double want = 0.75 * (0.25 * 0.0 + 0.75 * 1.0) + 0.25 * (0.25 * 0.5 + 0.75 * 0.25);
  EXPECT_NEAR(up(1, 2), want, 1e-15);
}

TEST(Rotate, QuarterTurnIsExact) {
  RealGrid g(5, 5);
  g(0, 4) = 1.0;  // top right corner
  const auto r = rotate(g, 90.0);
  // Counter-clockwise with y up: top right goes to top left.
  EXPECT_NEAR(r(0, 0), 1.0, 1e-9);
  double total = 0;
  for (double v : r.values()) total += v;
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_EQ(rotate(g, 0.0), g);
}

TEST(Shapes, DefaultCountsAndNames) {
  const auto ds = generate_shapes({});
  EXPECT_EQ(ds.size(), 9u * 144u);
  EXPECT_EQ(ds.class_counts(), std::vector<std::size_t>(9, 144));
  EXPECT_EQ(ds.class_names.size(), 9u);
  EXPECT_NO_THROW(ds.validate());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(ds.images[i].id, i);
    EXPECT_EQ(ds.images[i].rows(), 32u);
    for (double v : ds.images[i].pixels.values()) ASSERT_TRUE(v == 0.0 || v == 1.0);
  }
  EXPECT_NE(ds.provenance.find("seed=1"), std::string::npos);
}

TEST(Shapes, SameSeedIdenticalOtherSeedDiffers) {
  ShapeOptions o;
  o.num_classes = 4;
  o.rotations = 6;
  o.replicas = 3;
  const auto a = generate_shapes(o);
  const auto b = generate_shapes(o);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.images[i].pixels, b.images[i].pixels);
  o.seed = 2;
  const auto c = generate_shapes(o);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differing += !(a.images[i].pixels == c.images[i].pixels);
  EXPECT_GT(differing, a.size() / 2);
}

TEST(Shapes, ClassesAreDistinct) {
  std::set<std::vector<double>> seen;
  for (std::size_t k = 0; k < shape_names().size(); ++k) {
    const auto g = render_shape(k, {}, 32);
    seen.insert({g.values().begin(), g.values().end()});
  }
  EXPECT_EQ(seen.size(), shape_names().size());
}

TEST(Shapes, RenderedRotationMatchesRotatedRender) {
  for (std::size_t k = 0; k < shape_names().size(); ++k) {
    const auto upright = render_shape(k, {}, 32);
    for (int step = 1; step < 12; ++step) {
      const double degrees = 30.0 * step;
      const auto rendered = render_shape(k, {degrees, 1.0, 0.0, 0.0, {}}, 32);
      auto rotated = rotate(upright, degrees);
      for (auto& v : rotated.values()) v = v >= 0.5 ? 1.0 : 0.0;
      EXPECT_TRUE(inside_dilation(rendered, rotated)) << shape_names()[k] << ' ' << degrees;
      EXPECT_TRUE(inside_dilation(rotated, rendered)) << shape_names()[k] << ' ' << degrees;
    }
  }
}

TEST(Shapes, OptionErrors) {
  ShapeOptions o;
  o.num_classes = 10;
  EXPECT_THROW(generate_shapes(o), ConfigError);
  o = {};
  o.rotations = 7;
  EXPECT_THROW(generate_shapes(o), ConfigError);
  o = {};
  o.replicas = 0;
  EXPECT_THROW(generate_shapes(o), ConfigError);
  o = {};
  o.size = 3;
  EXPECT_THROW(generate_shapes(o), GeometryError);
  o = {};
  o.max_warp = 0.5;
  EXPECT_THROW(generate_shapes(o), ConfigError);
  EXPECT_THROW(render_shape(9, {}, 32), ConfigError);
}

TEST(Split, HalfOfEachClassDisjointCover) {
  const auto ds = generate_shapes({});
  const auto [train, test] = split(ds, 0.5, 1);
  EXPECT_EQ(train.class_counts(), std::vector<std::size_t>(9, 72));
  EXPECT_EQ(test.class_counts(), std::vector<std::size_t>(9, 72));
  std::vector<std::size_t> ids;
  for (const auto& img : train.images) ids.push_back(img.id);
  for (const auto& img : test.images) ids.push_back(img.id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], i);
  // Order inside each part follows the input.
  for (std::size_t i = 1; i < train.size(); ++i) EXPECT_LT(train.images[i - 1].id, train.images[i].id);
  EXPECT_EQ(train.class_names, ds.class_names);
}

TEST(Split, SeededAndStratified) {
  ShapeOptions o;
  o.num_classes = 3;
  o.rotations = 5;
  o.replicas = 1;  // 5 per class
  const auto ds = generate_shapes(o);
  auto ids = [](const Dataset& d) {
    std::vector<std::size_t> out;
    for (const auto& img : d.images) out.push_back(img.id);
    return out;
  };
  EXPECT_EQ(ids(split(ds, 0.5, 3).first), ids(split(ds, 0.5, 3).first));
  EXPECT_NE(ids(split(ds, 0.5, 3).first), ids(split(ds, 0.5, 4).first));
  for (double f : {0.1, 0.3, 0.5, 0.77, 0.95}) {
    const auto counts = split(ds, f, 2).first.class_counts();
    for (auto c : counts) {
      EXPECT_LE(std::fabs(static_cast<double>(c) - f * 5.0), 1.0);
      EXPECT_GE(c, 1u);
      EXPECT_LE(c, 4u);
    }
  }
  EXPECT_THROW(split(ds, 0.0, 1), ConfigError);
  EXPECT_THROW(split(ds, 1.0, 1), ConfigError);
  Dataset tiny = ds;
  tiny.images.resize(6);  // class 1 keeps a single image
  EXPECT_THROW(split(tiny, 0.5, 1), ConfigError);
}

TEST(DatasetIo, WriteLoadRoundTrip) {
  testing_support::TempDir dir;
  ShapeOptions o;
  o.num_classes = 3;
  o.rotations = 4;
  o.replicas = 2;
  const auto ds = generate_shapes(o);
  write_dataset(dir.path(), ds);
  EXPECT_TRUE(fs::exists(dir / "manifest.csv"));
  EXPECT_TRUE(fs::exists(dir / "arrow" / "0000.pgm"));
  const auto back = load_dataset(dir.path());
  EXPECT_EQ(back.class_names, ds.class_names);
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back.images[i].pixels, ds.images[i].pixels);
    EXPECT_EQ(back.images[i].label, ds.images[i].label);
  }
  const auto small = load_dataset(dir.path(), std::pair<std::size_t, std::size_t>{16, 16});
  EXPECT_EQ(small.images[0].rows(), 16u);
}

TEST(DatasetIo, BadManifest) {
  testing_support::TempDir dir;
  write_file(dir / "manifest.csv", "file,label\n");
  EXPECT_THROW(load_dataset(dir.path()), IoError);
  write_file(dir / "manifest.csv", "path,label,class_name\na.pgm,x,foo\n");
  EXPECT_THROW(load_dataset(dir.path()), IoError);
  EXPECT_THROW(load_dataset(dir / "nowhere"), IoError);
}
