#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "momentsnet/data.hpp"
#include "momentsnet/errors.hpp"
#include "momentsnet/parallel.hpp"

namespace momentsnet {

namespace {

struct Point {
  double x;
  double y;
};

// A silhouette is a sequence of filled primitives combined in order; each
// either adds to or cuts out of what is already there.
struct Primitive {
  std::vector<Point> polygon;  // empty for a disk
  Point centre{0, 0};
  double radius = 0;
  bool subtract = false;

  bool contains(Point p) const {
    if (polygon.empty()) {
      const double dx = p.x - centre.x;
      const double dy = p.y - centre.y;
      return dx * dx + dy * dy <= radius * radius;
    }
    bool inside = false;
    for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
      const Point a = polygon[i];
      const Point b = polygon[j];
      if ((a.y > p.y) != (b.y > p.y) &&
          p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
        inside = !inside;
      }
    }
    return inside;
  }
};

using Silhouette = std::vector<Primitive>;

Primitive poly(std::vector<Point> pts, bool subtract = false) {
  return Primitive{std::move(pts), {}, 0, subtract};
}
Primitive disk(double x, double y, double r, bool subtract = false) {
  return Primitive{{}, {x, y}, r, subtract};
}
Primitive rect(double x0, double y0, double x1, double y1, bool subtract = false) {
  return poly({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, subtract);
}

// Prototypes live in [-1, 1]^2 (x right, y up) inside radius ~0.85 so that
// rotation and jitter keep them on the canvas.
const std::vector<Silhouette>& prototypes() {
  static const std::vector<Silhouette> shapes = [] {
    std::vector<Silhouette> s;
    // arrow
    s.push_back({poly({{-0.8, -0.18}, {0.15, -0.18}, {0.15, -0.5}, {0.8, 0.0},
                       {0.15, 0.5}, {0.15, 0.18}, {-0.8, 0.18}})});
    // five-pointed star
    {
      std::vector<Point> pts;
      for (int i = 0; i < 10; ++i) {
        const double r = i % 2 == 0 ? 0.85 : 0.4;
        const double a = std::numbers::pi / 2 + i * std::numbers::pi / 5;
        pts.push_back({r * std::cos(a), r * std::sin(a)});
      }
      s.push_back({poly(pts)});
    }
    // cross with unequal arms
    s.push_back({rect(-0.2, -0.8, 0.2, 0.8), rect(-0.6, 0.1, 0.6, 0.45)});
    // keyhole
    s.push_back({disk(0.0, 0.3, 0.42), poly({{-0.18, 0.2}, {0.18, 0.2}, {0.4, -0.78}, {-0.4, -0.78}})});
    // crescent
    s.push_back({disk(0.0, 0.0, 0.8), disk(0.38, 0.18, 0.62, true)});
    // hammer
    s.push_back({rect(-0.65, 0.35, 0.65, 0.75), rect(0.3, 0.4, 0.75, 0.6), rect(-0.14, -0.82, 0.14, 0.4)});
    // ell
    s.push_back({rect(-0.6, -0.7, -0.15, 0.75), rect(-0.6, -0.7, 0.65, -0.3)});
    // comb
    s.push_back({rect(-0.75, 0.3, 0.75, 0.65), rect(-0.75, -0.7, -0.5, 0.35),
                 rect(-0.32, -0.7, -0.08, 0.35), rect(0.1, -0.7, 0.34, 0.35),
                 rect(0.52, -0.7, 0.75, 0.35)});
    // key
    s.push_back({disk(-0.42, 0.0, 0.4), disk(-0.42, 0.0, 0.16, true), rect(-0.1, -0.12, 0.8, 0.12),
                 rect(0.45, -0.45, 0.6, -0.05), rect(0.65, -0.4, 0.8, -0.05)});
    return s;
  }();
  return shapes;
}

bool inside(const Silhouette& shape, Point p) {
  bool in = false;
  for (const auto& prim : shape) {
    if (prim.subtract) {
      in = in && !prim.contains(p);
    } else {
      in = in || prim.contains(p);
    }
  }
  return in;
}

// Stretch then warp; the stretch axis trig is computed once per image.
struct Deformation {
  explicit Deformation(const ShapeInstance& d) : d(d) {
    const double a = d.stretch_degrees * std::numbers::pi / 180.0;
    cos_a = std::cos(a);
    sin_a = std::sin(a);
  }

  Point operator()(Point q) const {
    if (d.stretch != 0.0) {
      const double u = cos_a * q.x + sin_a * q.y;
      const double v = -sin_a * q.x + cos_a * q.y;
      const double su = u * (1.0 + d.stretch);
      const double sv = v / (1.0 + d.stretch);
      q = {cos_a * su - sin_a * sv, sin_a * su + cos_a * sv};
    }
    if (d.warp != 0.0) {
      q = {q.x + d.warp * std::sin(d.freq_x * q.y + d.phase_x),
           q.y + d.warp * std::sin(d.freq_y * q.x + d.phase_y)};
    }
    return q;
  }

  ShapeInstance d;
  double cos_a = 1.0;
  double sin_a = 0.0;
};

// Row weights of an exact box (area) resampling from n to m samples.
std::vector<double> box_weights(std::size_t n, std::size_t m) {
  std::vector<double> w(m * n, 0.0);
  const double f = static_cast<double>(n) / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double lo = static_cast<double>(i) * f;
    const double hi = lo + f;
    for (auto j = static_cast<std::size_t>(lo); j < n && static_cast<double>(j) < hi; ++j) {
      const double overlap = std::min(hi, static_cast<double>(j + 1)) - std::max(lo, static_cast<double>(j));
      if (overlap > 0) w[i * n + j] = overlap / f;
    }
  }
  return w;
}

RealGrid area_downsample(const RealGrid& src, std::size_t size) {
  const auto wr = box_weights(src.rows(), size);
  const auto wc = box_weights(src.cols(), size);
  RealGrid tmp(size, src.cols());
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t r = 0; r < src.rows(); ++r) {
      const double w = wr[i * src.rows() + r];
      if (w == 0) continue;
      for (std::size_t c = 0; c < src.cols(); ++c) tmp(i, c) += w * src(r, c);
    }
  }
  RealGrid out(size, size);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      double acc = 0;
      for (std::size_t c = 0; c < src.cols(); ++c) acc += wc[j * src.cols() + c] * tmp(i, c);
      out(i, j) = acc;
    }
  }
  return out;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1p-53;
}

}  // namespace

std::vector<std::string_view> shape_names() {
  return {"arrow", "star", "cross", "keyhole", "crescent", "hammer", "ell", "comb", "key"};
}

RealGrid render_shape_raw(std::size_t index, const ShapePose& pose, std::size_t render_size) {
  const auto& shapes = prototypes();
  if (index >= shapes.size()) throw ConfigError("shape index out of range");
  if (render_size == 0) throw GeometryError("render size must be positive");
  if (!(pose.scale > 0)) throw ConfigError("shape scale must be positive");
  const Silhouette& shape = shapes[index];
  const double a = pose.degrees * std::numbers::pi / 180.0;
  const double ca = std::cos(a);
  const double sa = std::sin(a);
  const Deformation deform(pose.instance);
  constexpr int kSub = 3;  // kSub x kSub samples per pixel
  RealGrid out(render_size, render_size);
  const double step = 2.0 / static_cast<double>(render_size);
  for (std::size_t r = 0; r < render_size; ++r) {
    for (std::size_t c = 0; c < render_size; ++c) {
      int hits = 0;
      for (int sy = 0; sy < kSub; ++sy) {
        for (int sx = 0; sx < kSub; ++sx) {
          const double x = -1.0 + (static_cast<double>(c) + (sx + 0.5) / kSub) * step;
          const double y = 1.0 - (static_cast<double>(r) + (sy + 0.5) / kSub) * step;
          // Inverse pose: undo the shift, the scale, then the rotation.
          const double px = (x - pose.shift_x) / pose.scale;
          const double py = (y - pose.shift_y) / pose.scale;
          hits += inside(shape, deform({ca * px + sa * py, -sa * px + ca * py}));
        }
      }
      out(r, c) = static_cast<double>(hits) / (kSub * kSub);
    }
  }
  return out;
}

RealGrid render_shape(std::size_t index, const ShapePose& pose, std::size_t size,
                      std::size_t render_size) {
  if (size == 0 || render_size < size) {
    throw GeometryError("render size must be at least the output size");
  }
  RealGrid out = area_downsample(render_shape_raw(index, pose, render_size), size);
  for (auto& v : out.values()) v = v >= 0.5 ? 1.0 : 0.0;
  return out;
}

Dataset generate_shapes(const ShapeOptions& o) {
  const auto names = shape_names();
  if (o.num_classes < 2 || o.num_classes > names.size()) {
    throw ConfigError("num_classes must lie in [2, " + std::to_string(names.size()) + "]");
  }
  if (o.rotations == 0 || 360 % o.rotations != 0) {
    throw ConfigError("rotations must be a positive divisor of 360");
  }
  if (o.replicas == 0) throw ConfigError("replicas must be positive");
  if (o.size < 4) throw GeometryError("size must be at least 4");
  for (double bound : {o.max_shift, o.max_scale, o.max_stretch, o.max_warp}) {
    if (!(bound >= 0 && bound <= 0.25)) throw ConfigError("jitter bounds must lie in [0, 0.25]");
  }
  const std::size_t per_class = o.rotations * o.replicas;
  Dataset ds;
  ds.class_names.assign(names.begin(), names.begin() + static_cast<long>(o.num_classes));
  ds.provenance = "synthetic shapes: classes=" + std::to_string(o.num_classes) +
                  " rotations=" + std::to_string(o.rotations) +
                  " replicas=" + std::to_string(o.replicas) + " size=" + std::to_string(o.size) +
                  " seed=" + std::to_string(o.seed) + " shift=" + std::to_string(o.max_shift) +
                  " scale=" + std::to_string(o.max_scale) + " stretch=" + std::to_string(o.max_stretch) +
                  " warp=" + std::to_string(o.max_warp);
  ds.images.resize(o.num_classes * per_class);
  parallel_for(ds.images.size(), resolve_threads(0), [&](std::size_t i) {
    const std::size_t cls = i / per_class;
    const std::size_t rot = (i % per_class) / o.replicas;
    // Per-image stream so the result does not depend on the thread count.
    std::mt19937_64 rng(o.seed * 0x9E3779B97F4A7C15ULL + i);
    ShapePose pose;
    pose.degrees = 360.0 / static_cast<double>(o.rotations) * static_cast<double>(rot);
    pose.scale = 1.0 + uniform(rng, -o.max_scale, o.max_scale);
    pose.shift_x = uniform(rng, -o.max_shift, o.max_shift);
    pose.shift_y = uniform(rng, -o.max_shift, o.max_shift);
    auto& inst = pose.instance;
    inst.stretch = uniform(rng, -o.max_stretch, o.max_stretch);
    inst.stretch_degrees = uniform(rng, 0.0, 180.0);
    inst.warp = uniform(rng, 0.0, o.max_warp);
    inst.freq_x = uniform(rng, 1.5, 4.0);
    inst.freq_y = uniform(rng, 1.5, 4.0);
    inst.phase_x = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    inst.phase_y = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    ds.images[i] = Image{render_shape(cls, pose, o.size, o.render_size), static_cast<int>(cls), i};
  });
  return ds;
}

}  // namespace momentsnet
