//
// Copyright 2026 The robustkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef ROBUSTKIT_PROBE_HPP_
#define ROBUSTKIT_PROBE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "robustkit/matrix.hpp"
#include "robustkit/metrics.hpp"
#include "robustkit/tensorio.hpp"

// Multinomial logistic regression probes on frozen layer representations.

namespace robustkit::probe {

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 200;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;

  // Throws kInvalidTrainConfig.
  void validate() const;
};

// Per-column affine map x -> (x - mean) / scale fitted on training rows.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;

  // Population statistics; a constant column gets scale 1.
  static Standardization fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

// Weights and bias in the layout used during training: w is c x d.
struct Parameters {
  Matrix w;
  std::vector<double> b;
};

// Mean cross-entropy over rows plus (l2 / 2) ||w||^2. The bias is not
// regularized. Fills `grad` when it is non-null.
double loss_and_gradient(const Matrix& x, std::span<const std::size_t> y,
                         const Parameters& params, double l2,
                         Parameters* grad);

struct ProbeModel {
  Matrix weights;  // d x c
  std::vector<double> bias;
  std::vector<std::string> classes;
  std::size_t layer_index = 0;
  double l2 = 0.0;
  Standardization standardization;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t epochs_run = 0;
  std::vector<double> loss_history;  // initial loss, then one per epoch

  std::size_t dim() const noexcept { return weights.rows(); }
};

// Full-batch gradient descent from zero weights on standardized features.
// `classes` fixes the class order; when empty it is the sorted set of
// distinct labels. Returns the lowest-loss iterate. Throws kSingleClass,
// kNonFiniteLoss, kRowCountMismatch, kLabelOutOfSpace, kInvalidTrainConfig.
ProbeModel train_probe(const tensorio::RepresentationSet& reps,
                       std::span<const std::string> labels,
                       const TrainConfig& cfg,
                       std::span<const std::string> classes = {});

// Raw logits (after standardization) for every row: n x c.
Matrix logits(const ProbeModel& model, const Matrix& x);

// Argmax class index per row, ties to the lowest index. Throws
// kDimensionMismatch.
std::vector<std::size_t> predict_indices(const ProbeModel& model,
                                         const tensorio::RepresentationSet& reps);
std::vector<std::string> predict(const ProbeModel& model,
                                 const tensorio::RepresentationSet& reps);

// {classes, layer_index, l2, standardization: {mean, scale}, weights
// (d x c, row-major), bias}
nlohmann::json to_json(const ProbeModel& model);
ProbeModel model_from_json(const nlohmann::json& j);

struct LayerOutcome {
  std::size_t layer_index = 0;
  EvalOutcome outcome;
  ProbeModel model;
};

// Trains one probe per selected layer of `train` and evaluates it on the
// same layer of `eval` with `metric`. An empty `layers` selects all.
// Probes train concurrently on up to `threads` threads; results are in
// layer order and independent of the thread count.
std::vector<LayerOutcome> layerwise_probe(
    const tensorio::LayerStack& train, std::span<const std::string> train_labels,
    const tensorio::LayerStack& eval, std::span<const std::string> eval_labels,
    const TrainConfig& cfg,
    dataio::MetricKind metric = dataio::MetricKind::kAccuracy,
    std::span<const std::string> classes = {},
    std::span<const std::size_t> layers = {}, unsigned threads = 1);

}  // namespace robustkit::probe

#endif  // ROBUSTKIT_PROBE_HPP_
