#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "momentsnet/classifier.hpp"
#include "momentsnet/data.hpp"
#include "momentsnet/pipeline.hpp"

namespace momentsnet {

/// A named parameter and the values it takes in a sweep.
struct SweepAxis {
  std::string name;
  std::vector<std::string> values;
};

inline constexpr std::size_t kMaxSweepAxes = 3;
inline constexpr std::size_t kMaxSweepPoints = 500;

struct ExperimentConfig {
  NetConfig net{};
  // l2, k2 and h2 follow l1, k1 and h1 unless set explicitly.
  bool l2_set = false;
  bool k2_set = false;
  bool h2_set = false;

  bool auto_threshold = false;
  Interval target{};
  double C = 1.0;
  std::size_t epochs = 50;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  double train_fraction = 0.5;

  std::optional<std::filesystem::path> dataset;  // generator when empty
  ShapeOptions generator{};
  std::filesystem::path out = "out";
  bool timing = false;

  std::vector<SweepAxis> axes;

  /// NetConfig with the l2/k2/h2 defaults applied (input size untouched).
  NetConfig resolved_net() const;
  /// Throws ConfigError for bad values or sweep axes; GeometryError for
  /// patch/block sizes that do not fit the image size.
  void validate() const;
};

/// Keys understood by set_parameter, in display order.
std::vector<std::string_view> parameter_names();

/// Sets one parameter from its textual value. Keys match the long CLI flags
/// ("k" sets k1 and k2, "h" sets h1 and h2, "t" is an alias of threshold).
/// Throws ConfigError naming the key on an unknown key or a malformed value.
void set_parameter(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Parses "name=v1,v2,..." or "name=lo:hi:step" (inclusive, decimal steps).
SweepAxis parse_axis(std::string_view text);

/// Resolved configuration as key=value lines, loadable again by set_parameter.
void write_config(std::ostream& out, const ExperimentConfig& config);

struct PhaseTimes {
  double filters = 0;
  double threshold = 0;
  double extract = 0;
  double train = 0;
  double eval = 0;
  double total() const noexcept { return filters + threshold + extract + train + eval; }
};

struct RunResult {
  NetConfig net{};
  double threshold = 0;
  double ones_fraction = 0;  // on the threshold sample of training images
  double train_accuracy = 0;
  double test_accuracy = 0;
  std::size_t feature_dim = 0;
  PhaseTimes times{};
  LinearModel model{};
};

/// The dataset named by the config (loaded and rescaled to the generator
/// size, or generated), split into train/test with the config seed.
std::pair<Dataset, Dataset> prepare_data(const ExperimentConfig& config);

/// Upper bound on pooled map values used to choose the automatic threshold;
/// training images are subsampled evenly to stay below it.
inline constexpr std::size_t kThresholdSampleValues = std::size_t{1} << 22;

/// One train/evaluate cycle on a fixed split. PCA family learns its filters
/// from `train`; moment families sample theirs.
RunResult run_point(const ExperimentConfig& config, const Dataset& train, const Dataset& test,
                    unsigned threads);

/// Whole-image moment descriptor baseline: moduli of every order of
/// `family` with degree <= max_degree over the full image, standardised with
/// training statistics, fed to the same linear classifier.
RunResult run_moment_baseline(const ExperimentConfig& config, const Dataset& train,
                              const Dataset& test, int max_degree, unsigned threads);

/// Cross product of the config's axes in row-major order (last axis fastest).
/// Throws ConfigError beyond kMaxSweepAxes axes or kMaxSweepPoints points.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config);

/// Runs every sweep point, up to config.jobs at a time, results in sweep order.
std::vector<RunResult> run_sweep(const ExperimentConfig& config, const Dataset& train,
                                 const Dataset& test);

/// results.csv header and rows. wall_seconds is left empty unless `timing`
/// is set, so that reruns produce identical bytes.
void write_results_header(std::ostream& out, bool with_ones_fraction);
void write_result_row(std::ostream& out, const RunResult& result, bool with_ones_fraction,
                      bool timing);
/// Per-phase wall-clock seconds, one row per result.
void write_timings(std::ostream& out, std::span<const RunResult> results);

}  // namespace momentsnet
