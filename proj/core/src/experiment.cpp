#include "momentsnet/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "momentsnet/errors.hpp"
#include "momentsnet/parallel.hpp"
#include "momentsnet/pca.hpp"

namespace momentsnet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string quote(std::string_view s) { return "'" + std::string(s) + "'"; }

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(std::string(key) + ": cannot parse " + quote(text));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError(std::string(key) + ": must be finite");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError(std::string(key) + ": expected a boolean, got " + quote(text));
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Parameters that can vary between sweep points over one fixed split.
bool sweepable(std::string_view key) {
  static constexpr std::string_view keys[] = {
      "family", "stages", "l1", "l2", "k", "k1", "k2", "h", "h1", "h2", "overlap", "R",
      "threshold", "t", "auto-threshold", "reduction", "krawtchouk-p1", "krawtchouk-p2",
      "hahn-a", "hahn-c", "gpht-s", "c", "epochs", "seed"};
  return std::find(std::begin(keys), std::end(keys), key) != std::end(keys);
}

NetConfig net_for(const ExperimentConfig& config, const Dataset& train) {
  NetConfig net = config.resolved_net();
  if (train.images.empty()) throw ConfigError("training set is empty");
  net.input_rows = train.images.front().rows();
  net.input_cols = train.images.front().cols();
  net.validate();
  return net;
}

}  // namespace

NetConfig ExperimentConfig::resolved_net() const {
  NetConfig n = net;
  if (!l2_set) n.l2 = n.l1;
  if (!k2_set) n.k2 = n.k1;
  if (!h2_set) n.h2 = n.h1;
  n.input_rows = generator.size;
  n.input_cols = generator.size;
  return n;
}

void ExperimentConfig::validate() const {
  resolved_net().validate();
  if (!(C > 0.0)) throw ConfigError("c: must be positive");
  if (epochs == 0) throw ConfigError("epochs: must be positive");
  if (jobs == 0) throw ConfigError("jobs: must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train-fraction: must lie in (0, 1)");
  }
  if (!(target.lo >= 0.0 && target.lo <= target.hi && target.hi <= 1.0)) {
    throw ConfigError("target: need 0 <= target-lo <= target-hi <= 1");
  }
  if (axes.size() > kMaxSweepAxes) {
    throw ConfigError("sweep: at most " + std::to_string(kMaxSweepAxes) + " axes");
  }
  std::size_t points = 1;
  for (const auto& axis : axes) {
    if (!sweepable(axis.name)) throw ConfigError("sweep: cannot sweep " + quote(axis.name));
    if (axis.values.empty()) throw ConfigError("sweep: axis " + quote(axis.name) + " is empty");
    points *= axis.values.size();
    if (points > kMaxSweepPoints) {
      throw ConfigError("sweep: more than " + std::to_string(kMaxSweepPoints) + " points");
    }
  }
}

std::vector<std::string_view> parameter_names() {
  return {"family", "stages", "l1", "l2", "k", "k1", "k2", "h", "h1", "h2", "overlap",
          "threshold", "auto-threshold", "target-lo", "target-hi", "reduction",
          "krawtchouk-p1", "krawtchouk-p2", "hahn-a", "hahn-c", "gpht-s", "c", "epochs",
          "seed", "jobs", "train-fraction", "dataset", "out", "classes", "rotations",
          "replicas", "size", "shape-seed", "timing"};
}

void set_parameter(ExperimentConfig& c, std::string_view key, std::string_view value) {
  auto size = [&] { return parse_number<std::size_t>(key, value); };
  auto real = [&] { return parse_number<double>(key, value); };
  auto& p = c.net.family.params;
  if (key == "family") {
    const auto f = parse_family(value);
    if (!f) throw ConfigError("family: unknown family " + quote(value));
    c.net.family.tag = *f;
  } else if (key == "stages") {
    c.net.stages = parse_number<int>(key, value);
  } else if (key == "l1") {
    c.net.l1 = size();
  } else if (key == "l2") {
    c.net.l2 = size();
    c.l2_set = true;
  } else if (key == "k") {
    c.net.k1 = size();
    c.net.k2 = c.net.k1;
    c.k2_set = false;
  } else if (key == "k1") {
    c.net.k1 = size();
  } else if (key == "k2") {
    c.net.k2 = size();
    c.k2_set = true;
  } else if (key == "h") {
    c.net.h1 = size();
    c.net.h2 = c.net.h1;
    c.h2_set = false;
  } else if (key == "h1") {
    c.net.h1 = size();
  } else if (key == "h2") {
    c.net.h2 = size();
    c.h2_set = true;
  } else if (key == "overlap" || key == "R") {
    c.net.overlap = real();
  } else if (key == "threshold" || key == "t") {
    c.net.threshold = real();
  } else if (key == "auto-threshold") {
    c.auto_threshold = parse_bool(key, value);
  } else if (key == "target-lo") {
    c.target.lo = real();
  } else if (key == "target-hi") {
    c.target.hi = real();
  } else if (key == "reduction") {
    if (value == "modulus") {
      c.net.reduction = ComplexReduction::Modulus;
    } else if (value == "real") {
      c.net.reduction = ComplexReduction::RealPart;
    } else {
      throw ConfigError("reduction: expected modulus or real, got " + quote(value));
    }
  } else if (key == "krawtchouk-p1") {
    p.krawtchouk_p1 = real();
  } else if (key == "krawtchouk-p2") {
    p.krawtchouk_p2 = real();
  } else if (key == "hahn-a") {
    p.hahn_a = real();
  } else if (key == "hahn-c") {
    p.hahn_c = real();
  } else if (key == "gpht-s") {
    p.gpht_s = real();
  } else if (key == "c" || key == "C") {
    c.C = real();
  } else if (key == "epochs") {
    c.epochs = size();
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "jobs") {
    c.jobs = parse_number<unsigned>(key, value);
  } else if (key == "train-fraction") {
    c.train_fraction = real();
  } else if (key == "dataset") {
    if (value.empty()) {
      c.dataset.reset();
    } else {
      c.dataset = std::filesystem::path(value);
    }
  } else if (key == "out") {
    c.out = std::filesystem::path(value);
  } else if (key == "classes") {
    c.generator.num_classes = size();
  } else if (key == "rotations") {
    c.generator.rotations = size();
  } else if (key == "replicas") {
    c.generator.replicas = size();
  } else if (key == "size") {
    c.generator.size = size();
  } else if (key == "shape-seed") {
    c.generator.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "timing") {
    c.timing = parse_bool(key, value);
  } else {
    throw ConfigError("unknown parameter " + quote(key));
  }
}

SweepAxis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("sweep: axis " + quote(text) + " must look like name=values");
  }
  SweepAxis axis{std::string(text.substr(0, eq)), {}};
  const std::string_view rhs = text.substr(eq + 1);
  if (std::count(rhs.begin(), rhs.end(), ':') == 2) {
    const auto a = rhs.find(':');
    const auto b = rhs.find(':', a + 1);
    const double lo = parse_number<double>(axis.name, rhs.substr(0, a));
    const double hi = parse_number<double>(axis.name, rhs.substr(a + 1, b - a - 1));
    const double step = parse_number<double>(axis.name, rhs.substr(b + 1));
    if (!(step > 0.0) || hi < lo) throw ConfigError(axis.name + ": range needs lo <= hi, step > 0");
    const double count = std::floor((hi - lo) / step + 1e-9) + 1;
    if (count > static_cast<double>(kMaxSweepPoints)) {
      throw ConfigError("sweep: more than " + std::to_string(kMaxSweepPoints) + " points");
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
      // Shortest text that round-trips, so 0.1 + 3 * 0.01 prints as 0.13.
      const double v = std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9;
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      axis.values.emplace_back(buf, res.ptr);
    }
  } else {
    std::size_t start = 0;
    while (start <= rhs.size()) {
      const auto comma = rhs.find(',', start);
      const auto item = rhs.substr(start, comma == std::string_view::npos ? rhs.npos : comma - start);
      if (item.empty()) throw ConfigError(axis.name + ": empty value in sweep list");
      axis.values.emplace_back(item);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  return axis;
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  const NetConfig n = c.resolved_net();
  const auto& p = n.family.params;
  auto real = [](double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  out << "family=" << family_name(n.family.tag) << '\n'
      << "stages=" << n.stages << '\n'
      << "l1=" << n.l1 << "\nl2=" << n.l2 << '\n'
      << "k1=" << n.k1 << "\nk2=" << n.k2 << '\n'
      << "h1=" << n.h1 << "\nh2=" << n.h2 << '\n'
      << "overlap=" << real(n.overlap) << '\n'
      << "threshold=" << real(n.threshold) << '\n'
      << "auto-threshold=" << (c.auto_threshold ? "true" : "false") << '\n'
      << "target-lo=" << real(c.target.lo) << "\ntarget-hi=" << real(c.target.hi) << '\n'
      << "reduction=" << (n.reduction == ComplexReduction::Modulus ? "modulus" : "real") << '\n'
      << "krawtchouk-p1=" << real(p.krawtchouk_p1) << "\nkrawtchouk-p2=" << real(p.krawtchouk_p2)
      << "\nhahn-a=" << real(p.hahn_a) << "\nhahn-c=" << real(p.hahn_c)
      << "\ngpht-s=" << real(p.gpht_s) << '\n'
      << "c=" << real(c.C) << "\nepochs=" << c.epochs << "\nseed=" << c.seed << '\n'
      << "train-fraction=" << real(c.train_fraction) << '\n';
  if (c.dataset) out << "dataset=" << c.dataset->generic_string() << '\n';
  out << "classes=" << c.generator.num_classes << "\nrotations=" << c.generator.rotations
      << "\nreplicas=" << c.generator.replicas << "\nsize=" << c.generator.size
      << "\nshape-seed=" << c.generator.seed << '\n';
}

// ---------------------------------------------------------------------------

std::pair<Dataset, Dataset> prepare_data(const ExperimentConfig& config) {
  Dataset all;
  if (config.dataset) {
    all = load_dataset(*config.dataset,
                       std::make_pair(config.generator.size, config.generator.size));
  } else {
    all = generate_shapes(config.generator);
  }
  return split(all, config.train_fraction, config.seed);
}

RunResult run_point(const ExperimentConfig& config, const Dataset& train, const Dataset& test,
                    unsigned threads) {
  RunResult res;
  NetConfig net = net_for(config, train);
  const auto train_grids = train.grids();
  const auto test_grids = test.grids();
  const auto train_labels = train.labels();
  const auto test_labels = test.labels();

  auto start = Clock::now();
  const NetBanks banks = net.family.tag == Family::PCA
                             ? learn_pca_banks(net, train_grids, threads)
                             : build_net_banks(net);
  res.times.filters = seconds_since(start);

  // Threshold sample: evenly spaced training images, bounded pooled size.
  start = Clock::now();
  const std::size_t maps_per_image = net.stages == 2 ? net.l1 * net.l2 : net.l1;
  const std::size_t per_image = maps_per_image * net.input_rows * net.input_cols;
  const std::size_t n = train_grids.size();
  const std::size_t sample = std::clamp<std::size_t>(kThresholdSampleValues / per_image, 1, n);
  std::vector<std::vector<RealGrid>> sample_maps(sample);
  parallel_for(sample, threads, [&](std::size_t i) {
    sample_maps[i] = output_maps(train_grids[i * n / sample], net, banks);
  });
  std::vector<RealGrid> pooled;
  pooled.reserve(sample * maps_per_image);
  for (auto& maps : sample_maps) {
    for (auto& m : maps) pooled.push_back(std::move(m));
  }
  if (config.auto_threshold) net.threshold = auto_threshold(pooled, config.target);
  res.threshold = net.threshold;
  res.ones_fraction = ones_fraction(std::span<const RealGrid>(pooled), net.threshold);
  pooled.clear();
  res.times.threshold = seconds_since(start);

  start = Clock::now();
  const auto train_features = extract_features_batch(train_grids, net, banks, net.threshold, threads);
  const auto test_features = extract_features_batch(test_grids, net, banks, net.threshold, threads);
  res.times.extract = seconds_since(start);

  start = Clock::now();
  res.model = momentsnet::train(train_features, train_labels,
                    TrainOptions{config.C, config.epochs, config.seed, threads});
  res.times.train = seconds_since(start);

  start = Clock::now();
  res.train_accuracy = accuracy(res.model, train_features, train_labels);
  res.test_accuracy = accuracy(res.model, test_features, test_labels);
  res.times.eval = seconds_since(start);

  res.net = net;
  res.feature_dim = net.feature_dim();
  return res;
}

RunResult run_moment_baseline(const ExperimentConfig& config, const Dataset& train,
                              const Dataset& test, int max_degree, unsigned threads) {
  RunResult res;
  res.net = config.resolved_net();
  const Family family = res.net.family.tag;
  if (family == Family::PCA) throw ConfigError("family: no moment baseline for pca");
  if (train.images.empty() || test.images.empty()) throw ConfigError("empty split");
  const std::size_t rows = train.images.front().rows();
  const std::size_t cols = train.images.front().cols();
  res.net.input_rows = rows;
  res.net.input_cols = cols;

  // Complex families lose nothing by dropping negative m: for real images
  // the moduli of (n, m) and (n, -m) coincide.
  std::vector<OrderIndex> orders;
  for (int n = 0; n <= max_degree; ++n) {
    for (int m = 0; m <= max_degree; ++m) {
      const OrderIndex o{n, m};
      if (!is_valid_order(family, o) || order_degree(family, o) > max_degree) continue;
      if (is_discrete(family) && (static_cast<std::size_t>(n) >= rows ||
                                  static_cast<std::size_t>(m) >= cols)) {
        continue;
      }
      orders.push_back(o);
    }
  }
  std::sort(orders.begin(), orders.end(), [&](OrderIndex a, OrderIndex b) {
    const int da = order_degree(family, a);
    const int db = order_degree(family, b);
    return da != db ? da < db : a < b;
  });

  auto start = Clock::now();
  const KernelBank bank = build_kernel_bank(res.net.family, rows, cols, orders, res.net.reduction);
  res.times.filters = seconds_since(start);

  start = Clock::now();
  auto describe = [&](const Dataset& ds) {
    std::vector<std::vector<double>> out(ds.images.size());
    parallel_for(ds.images.size(), threads,
                 [&](std::size_t i) { out[i] = moment_project(ds.images[i].pixels, bank); });
    return out;
  };
  const auto train_raw = describe(train);
  const auto test_raw = describe(test);
  const std::size_t dim = bank.size();
  std::vector<double> mean(dim, 0.0);
  std::vector<double> scale(dim, 0.0);
  for (const auto& v : train_raw) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += v[d];
  }
  for (auto& m : mean) m /= static_cast<double>(train_raw.size());
  for (const auto& v : train_raw) {
    for (std::size_t d = 0; d < dim; ++d) scale[d] += (v[d] - mean[d]) * (v[d] - mean[d]);
  }
  for (auto& s : scale) {
    s = std::sqrt(s / static_cast<double>(train_raw.size()));
    s = s > 1e-12 ? 1.0 / s : 0.0;
  }
  auto standardise = [&](const std::vector<std::vector<double>>& raw) {
    std::vector<FeatureVector> out;
    out.reserve(raw.size());
    for (const auto& v : raw) {
      FeatureVector f(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        const auto x = static_cast<float>((v[d] - mean[d]) * scale[d]);
        if (x != 0.0f) f.push_back(d, x);
      }
      out.push_back(std::move(f));
    }
    return out;
  };
  const auto train_features = standardise(train_raw);
  const auto test_features = standardise(test_raw);
  res.times.extract = seconds_since(start);

  start = Clock::now();
  const auto train_labels = train.labels();
  const auto test_labels = test.labels();
  res.model = momentsnet::train(train_features, train_labels,
                                TrainOptions{config.C, config.epochs, config.seed, threads});
  res.times.train = seconds_since(start);

  start = Clock::now();
  res.train_accuracy = accuracy(res.model, train_features, train_labels);
  res.test_accuracy = accuracy(res.model, test_features, test_labels);
  res.times.eval = seconds_since(start);
  res.feature_dim = dim;
  res.threshold = std::nan("");
  res.ones_fraction = std::nan("");
  return res;
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<ExperimentConfig> points{config};
  points.front().axes.clear();
  for (const auto& axis : config.axes) {
    std::vector<ExperimentConfig> next;
    next.reserve(points.size() * axis.values.size());
    for (const auto& base : points) {
      for (const auto& value : axis.values) {
        ExperimentConfig point = base;
        set_parameter(point, axis.name, value);
        next.push_back(std::move(point));
      }
    }
    points = std::move(next);
  }
  for (const auto& p : points) p.validate();
  return points;
}

std::vector<RunResult> run_sweep(const ExperimentConfig& config, const Dataset& train,
                                 const Dataset& test) {
  const auto points = expand_sweep(config);
  std::vector<RunResult> results(points.size());
  const unsigned jobs = resolve_threads(config.jobs);
  // Points run side by side; each one single-threaded when there are several.
  const unsigned inner = points.size() == 1 ? jobs : 1;
  parallel_for(points.size(), jobs,
               [&](std::size_t i) { results[i] = run_point(points[i], train, test, inner); });
  return results;
}

void write_results_header(std::ostream& out, bool with_ones_fraction) {
  out << "family,stages,L1,k1,h1,R,t,train_acc,test_acc,feat_dim,";
  if (with_ones_fraction) out << "ones_fraction,";
  out << "wall_seconds\n";
}

void write_result_row(std::ostream& out, const RunResult& r, bool with_ones_fraction,
                      bool timing) {
  out << family_name(r.net.family.tag) << ',' << r.net.stages << ',' << r.net.l1 << ','
      << r.net.k1 << ',' << r.net.h1 << ',' << format("%.6g", r.net.overlap) << ','
      << format("%.9g", r.threshold) << ',' << format("%.6f", r.train_accuracy) << ','
      << format("%.6f", r.test_accuracy) << ',' << r.feature_dim << ',';
  if (with_ones_fraction) out << format("%.6f", r.ones_fraction) << ',';
  if (timing) out << format("%.3f", r.times.total());
  out << '\n';
}

void write_timings(std::ostream& out, std::span<const RunResult> results) {
  out << "point,filters,threshold,extract,train,eval,total\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& t = results[i].times;
    out << i << ',' << format("%.4f", t.filters) << ',' << format("%.4f", t.threshold) << ','
        << format("%.4f", t.extract) << ',' << format("%.4f", t.train) << ','
        << format("%.4f", t.eval) << ',' << format("%.4f", t.total()) << '\n';
  }
}

}  // namespace momentsnet
