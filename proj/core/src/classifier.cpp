#include "momentsnet/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "momentsnet/errors.hpp"
#include "momentsnet/parallel.hpp"

namespace momentsnet {

namespace {

// Constant feature appended to every sample; its weight is the bias.
constexpr double kBiasFeature = 1.0;

double sparse_dot(std::span<const double> w, const FeatureVector& x) {
  double s = w[w.size() - 1] * kBiasFeature;
  const auto idx = x.indices();
  const auto val = x.values();
  for (std::size_t k = 0; k < idx.size(); ++k) s += w[idx[k]] * val[k];
  return s;
}

double objective(std::span<const double> w, std::span<const FeatureVector> xs,
                 std::span<const double> ys, double C) {
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    loss += std::max(0.0, 1.0 - ys[i] * sparse_dot(w, xs[i]));
  }
  return 0.5 * norm2 + C * loss;
}

struct BinaryResult {
  std::vector<double> w;  // dim + 1, bias last
  std::vector<double> trace;
};

BinaryResult train_binary(std::span<const FeatureVector> xs, std::span<const double> ys,
                          std::size_t dim, const TrainOptions& opt, std::uint64_t seed) {
  const std::size_t n = xs.size();
  const double lambda = 1.0 / (opt.C * static_cast<double>(n));
  std::vector<double> v(dim + 1, 0.0);
  double scale = 1.0;

  // Only epoch-end iterates compete: early iterates have a large norm, and
  // the zero start would otherwise win for many epochs.
  BinaryResult best{std::vector<double>(dim + 1, 0.0), {}};
  double best_objective = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::vector<double> current(dim + 1);
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < opt.max_epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    for (std::size_t pick : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const FeatureVector& x = xs[pick];
      const double y = ys[pick];
      const double margin = y * scale * sparse_dot(v, x);

      scale *= 1.0 - 1.0 / static_cast<double>(t);
      if (scale == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
      }
      if (margin < 1.0) {
        const double step = eta * y / scale;
        const auto idx = x.indices();
        const auto val = x.values();
        for (std::size_t k = 0; k < idx.size(); ++k) v[idx[k]] += step * val[k];
        v[dim] += step * kBiasFeature;
      }
      if (scale < 1e-9) {
        for (auto& e : v) e *= scale;
        scale = 1.0;
      }
    }

    for (std::size_t k = 0; k <= dim; ++k) current[k] = scale * v[k];
    const double obj = objective(current, xs, ys, opt.C);
    if (obj < best_objective) {
      best_objective = obj;
      best.w = current;
    }
    best.trace.push_back(best_objective);
  }
  return best;
}

void check_dim(const LinearModel& model, std::size_t dim) {
  if (dim != model.feature_dim) {
    throw ShapeError("classifier: feature dimension " + std::to_string(dim) +
                     " does not match model dimension " + std::to_string(model.feature_dim));
  }
}

int argmax_label(const LinearModel& model, const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return model.classes[best];
}

}  // namespace

LinearModel train(std::span<const FeatureVector> features, std::span<const int> labels,
                  const TrainOptions& options, TrainReport* report) {
  if (features.size() != labels.size()) {
    throw TrainingError("train: " + std::to_string(features.size()) + " features but " +
                        std::to_string(labels.size()) + " labels");
  }
  if (features.empty()) throw TrainingError("train: empty training set");
  if (!(options.C > 0.0)) throw TrainingError("train: C must be positive");
  const std::size_t dim = features[0].dim();
  for (const auto& f : features) {
    if (f.dim() != dim) throw TrainingError("train: feature vectors differ in length");
  }
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw TrainingError("train: need at least two classes");

  LinearModel model;
  model.classes = classes;
  model.feature_dim = dim;
  model.C = options.C;
  model.weights.assign(classes.size() * dim, 0.0);
  model.biases.assign(classes.size(), 0.0);

  std::vector<std::vector<double>> traces(classes.size());
  parallel_for(classes.size(), options.threads, [&](std::size_t c) {
    std::vector<double> ys(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) ys[i] = labels[i] == classes[c] ? 1.0 : -1.0;
    auto result = train_binary(features, ys, dim, options, options.seed + 7919 * c);
    std::copy(result.w.begin(), result.w.begin() + static_cast<std::ptrdiff_t>(dim),
              model.weights.begin() + static_cast<std::ptrdiff_t>(c * dim));
    model.biases[c] = result.w[dim] * kBiasFeature;
    traces[c] = std::move(result.trace);
  });
  if (report) report->objective = std::move(traces);
  return model;
}

std::vector<double> decision_scores(const LinearModel& model, const FeatureVector& feature) {
  check_dim(model, feature.dim());
  std::vector<double> scores(model.num_classes());
  const auto idx = feature.indices();
  const auto val = feature.values();
  for (std::size_t c = 0; c < scores.size(); ++c) {
    const auto w = model.row(c);
    double s = model.biases[c];
    for (std::size_t k = 0; k < idx.size(); ++k) s += w[idx[k]] * val[k];
    scores[c] = s;
  }
  return scores;
}

std::vector<double> decision_scores(const LinearModel& model, std::span<const double> dense) {
  check_dim(model, dense.size());
  std::vector<double> scores(model.num_classes());
  for (std::size_t c = 0; c < scores.size(); ++c) {
    const auto w = model.row(c);
    double s = model.biases[c];
    for (std::size_t k = 0; k < dense.size(); ++k) s += w[k] * dense[k];
    scores[c] = s;
  }
  return scores;
}

int predict(const LinearModel& model, const FeatureVector& feature) {
  return argmax_label(model, decision_scores(model, feature));
}

int predict(const LinearModel& model, std::span<const double> dense) {
  return argmax_label(model, decision_scores(model, dense));
}

double accuracy(const LinearModel& model, std::span<const FeatureVector> features,
                std::span<const int> labels) {
  if (features.empty()) throw ShapeError("accuracy: empty dataset");
  if (features.size() != labels.size()) throw ShapeError("accuracy: label count mismatch");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    correct += predict(model, features[i]) == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(features.size());
}

double hinge_objective(const LinearModel& model, std::size_t class_index,
                       std::span<const FeatureVector> features, std::span<const int> labels) {
  std::vector<double> w(model.row(class_index).begin(), model.row(class_index).end());
  w.push_back(model.biases[class_index] / kBiasFeature);
  std::vector<double> ys(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ys[i] = labels[i] == model.classes[class_index] ? 1.0 : -1.0;
  }
  for (const auto& f : features) check_dim(model, f.dim());
  return objective(w, features, ys, model.C);
}

}  // namespace momentsnet
