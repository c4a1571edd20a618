#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "momentsnet/pipeline.hpp"

namespace momentsnet {

/// One-vs-rest linear model: score_c(x) = w_c . x + b_c.
struct LinearModel {
  std::vector<int> classes;       // class label per row, ascending
  std::size_t feature_dim = 0;
  std::vector<double> weights;    // classes.size() x feature_dim, row-major
  std::vector<double> biases;     // classes.size()
  double C = 1.0;

  std::size_t num_classes() const noexcept { return classes.size(); }
  std::span<const double> row(std::size_t c) const {
    return std::span<const double>(weights).subspan(c * feature_dim, feature_dim);
  }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct TrainOptions {
  double C = 1.0;
  std::size_t max_epochs = 50;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Per-class objective trace: the best (lowest) primal objective reached by
/// the end of each epoch, which is what the returned model attains.
struct TrainReport {
  std::vector<std::vector<double>> objective;  // [class][epoch]
};

/// Trains one binary L2-regularised hinge-loss model per class by seeded
/// stochastic subgradient descent (step 1 / (lambda t), lambda = 1 / (C n)).
/// The bias is learned as the weight of a constant unit feature. After every
/// epoch the full objective is evaluated and the best iterate so far is kept.
///
/// Throws TrainingError for fewer than two classes, mismatched sizes or an
/// empty class.
LinearModel train(std::span<const FeatureVector> features, std::span<const int> labels,
                  const TrainOptions& options, TrainReport* report = nullptr);

/// Per-class scores. Throws ShapeError on a dimension mismatch.
std::vector<double> decision_scores(const LinearModel& model, const FeatureVector& feature);
std::vector<double> decision_scores(const LinearModel& model, std::span<const double> dense);

/// Arg-max class label; ties go to the lowest class index.
int predict(const LinearModel& model, const FeatureVector& feature);
int predict(const LinearModel& model, std::span<const double> dense);

/// Fraction of correct predictions. Throws ShapeError on an empty set.
double accuracy(const LinearModel& model, std::span<const FeatureVector> features,
                std::span<const int> labels);

/// (1/2)||w||^2 + C * sum of hinge losses for the binary problem `positive`
/// vs. rest, bias included in w as in training.
double hinge_objective(const LinearModel& model, std::size_t class_index,
                       std::span<const FeatureVector> features, std::span<const int> labels);

}  // namespace momentsnet
