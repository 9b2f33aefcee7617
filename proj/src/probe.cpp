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

#include "robustkit/probe.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "robustkit/error.hpp"
#include "robustkit/parallel.hpp"
#include "robustkit/simd/kernels.hpp"

namespace robustkit::probe {

namespace {

std::vector<std::string> sorted_classes(std::span<const std::string> labels) {
  std::vector<std::string> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> encode_labels(std::span<const std::string> labels,
                                       const std::vector<std::string>& classes) {
  std::vector<std::size_t> y;
  y.reserve(labels.size());
  for (const auto& label : labels) {
    const auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) {
      throw Error(ErrorCode::kLabelOutOfSpace,
                  "label '" + label + "' is not a probe class");
    }
    y.push_back(static_cast<std::size_t>(it - classes.begin()));
  }
  return y;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidTrainConfig, "learning rate must be > 0");
  }
  if (epochs < 1) {
    throw Error(ErrorCode::kInvalidTrainConfig, "epochs must be >= 1");
  }
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw Error(ErrorCode::kInvalidTrainConfig, "l2 must be >= 0");
  }
  if (!(tolerance >= 0.0)) {
    throw Error(ErrorCode::kInvalidTrainConfig, "tolerance must be >= 0");
  }
}

Standardization Standardization::fit(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Standardization s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += x(i, j);
  }
  for (double& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = x(i, j) - s.mean[j];
      var[j] += dev * dev;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix Standardization::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected width " + std::to_string(mean.size()) + ", got " +
                    std::to_string(x.cols()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      out(i, j) = (x(i, j) - mean[j]) / scale[j];
    }
  }
  return out;
}

double loss_and_gradient(const Matrix& x, std::span<const std::size_t> y,
                         const Parameters& params, double l2,
                         Parameters* grad) {
  const std::size_t n = x.rows();
  const std::size_t c = params.w.rows();
  if (params.w.cols() != x.cols() || params.b.size() != c) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter shape mismatch");
  }
  if (y.size() != n) {
    throw Error(ErrorCode::kRowCountMismatch, "label count mismatch");
  }
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "no training rows");
  if (grad != nullptr) {
    grad->w = Matrix(c, x.cols());
    grad->b.assign(c, 0.0);
  }

  std::vector<double> z(c);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t k = 0; k < c; ++k) {
      z[k] = simd::dot(params.w.row(k), xi) + params.b[k];
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    const double lse = zmax + std::log(sum);
    loss += lse - z[y[i]];
    if (grad != nullptr) {
      for (std::size_t k = 0; k < c; ++k) {
        const double r = std::exp(z[k] - lse) - (k == y[i] ? 1.0 : 0.0);
        grad->b[k] += r;
        simd::axpy(r, xi, grad->w.row(k));
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  const auto wf = params.w.flat();
  loss = loss * inv_n + 0.5 * l2 * simd::dot(wf, wf);
  if (grad != nullptr) {
    auto gw = grad->w.flat();
    for (std::size_t t = 0; t < gw.size(); ++t) {
      gw[t] = gw[t] * inv_n + l2 * wf[t];
    }
    for (double& g : grad->b) g *= inv_n;
  }
  return loss;
}

ProbeModel train_probe(const tensorio::RepresentationSet& reps,
                       std::span<const std::string> labels,
                       const TrainConfig& cfg,
                       std::span<const std::string> classes) {
  cfg.validate();
  if (labels.size() != reps.rows()) {
    throw Error(ErrorCode::kRowCountMismatch,
                std::to_string(labels.size()) + " labels for " +
                    std::to_string(reps.rows()) + " rows");
  }
  if (labels.empty()) throw Error(ErrorCode::kEmptyInput, "no training rows");

  ProbeModel model;
  model.classes = classes.empty()
                      ? sorted_classes(labels)
                      : std::vector<std::string>(classes.begin(), classes.end());
  const auto y = encode_labels(labels, model.classes);
  if (std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) ==
      y.end()) {
    throw Error(ErrorCode::kSingleClass,
                "training labels contain a single class");
  }
  model.layer_index = reps.layer_index;
  model.l2 = cfg.l2;
  model.standardization = Standardization::fit(reps.matrix);
  const Matrix x = model.standardization.apply(reps.matrix);

  const std::size_t c = model.classes.size();
  Parameters params{Matrix(c, x.cols()), std::vector<double>(c, 0.0)};
  Parameters grad;
  double loss = loss_and_gradient(x, y, params, cfg.l2, &grad);
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::kNonFiniteLoss, "initial loss is not finite");
  }
  model.initial_loss = loss;
  model.loss_history.push_back(loss);
  Parameters best = params;
  double best_loss = loss;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    simd::axpy(-cfg.learning_rate, grad.w.flat(), params.w.flat());
    simd::axpy(-cfg.learning_rate, grad.b, params.b);
    const double next = loss_and_gradient(x, y, params, cfg.l2, &grad);
    if (!std::isfinite(next)) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  "loss diverged at epoch " + std::to_string(epoch + 1));
    }
    model.loss_history.push_back(next);
    ++model.epochs_run;
    if (next < best_loss) {
      best = params;
      best_loss = next;
    }
    const bool converged = std::abs(loss - next) < cfg.tolerance;
    loss = next;
    if (converged) break;
  }

  model.final_loss = best_loss;
  model.bias = best.b;
  model.weights = Matrix(x.cols(), c);
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t j = 0; j < x.cols(); ++j) model.weights(j, k) = best.w(k, j);
  }
  return model;
}

Matrix logits(const ProbeModel& model, const Matrix& x) {
  if (x.cols() != model.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "probe expects width " + std::to_string(model.dim()) +
                    ", got " + std::to_string(x.cols()));
  }
  const Matrix xs = model.standardization.apply(x);
  const std::size_t c = model.bias.size();
  Matrix out(x.rows(), c);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      double z = 0.0;
      for (std::size_t j = 0; j < xs.cols(); ++j) {
        z += xs(i, j) * model.weights(j, k);
      }
      out(i, k) = z + model.bias[k];
    }
  }
  return out;
}

std::vector<std::size_t> predict_indices(
    const ProbeModel& model, const tensorio::RepresentationSet& reps) {
  const Matrix z = logits(model, reps.matrix);
  std::vector<std::size_t> out(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const auto row = z.row(i);
    out[i] = static_cast<std::size_t>(
        std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

std::vector<std::string> predict(const ProbeModel& model,
                                 const tensorio::RepresentationSet& reps) {
  std::vector<std::string> out;
  for (std::size_t k : predict_indices(model, reps)) {
    out.push_back(model.classes[k]);
  }
  return out;
}

nlohmann::json to_json(const ProbeModel& model) {
  nlohmann::ordered_json j;
  j["classes"] = model.classes;
  j["layer_index"] = model.layer_index;
  j["l2"] = model.l2;
  j["standardization"] = {{"mean", model.standardization.mean},
                          {"scale", model.standardization.scale}};
  j["weights"] = std::vector<double>(model.weights.flat().begin(),
                                     model.weights.flat().end());
  j["bias"] = model.bias;
  j["initial_loss"] = model.initial_loss;
  j["final_loss"] = model.final_loss;
  j["epochs_run"] = model.epochs_run;
  return nlohmann::json::parse(j.dump());
}

ProbeModel model_from_json(const nlohmann::json& j) {
  try {
    ProbeModel m;
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.layer_index = j.at("layer_index").get<std::size_t>();
    m.l2 = j.at("l2").get<double>();
    m.standardization.mean =
        j.at("standardization").at("mean").get<std::vector<double>>();
    m.standardization.scale =
        j.at("standardization").at("scale").get<std::vector<double>>();
    m.bias = j.at("bias").get<std::vector<double>>();
    const std::size_t d = m.standardization.mean.size();
    const std::size_t c = m.classes.size();
    auto w = j.at("weights").get<std::vector<double>>();
    if (c < 2 || m.bias.size() != c || m.standardization.scale.size() != d ||
        w.size() != d * c) {
      throw Error(ErrorCode::kFormatError, "probe model shapes disagree");
    }
    m.weights = Matrix(d, c, std::move(w));
    if (!m.weights.all_finite()) {
      throw Error(ErrorCode::kNonFiniteValue, "probe weights not finite");
    }
    m.initial_loss = j.value("initial_loss", 0.0);
    m.final_loss = j.value("final_loss", 0.0);
    m.epochs_run = j.value("epochs_run", std::size_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError,
                std::string("invalid probe model JSON: ") + e.what());
  }
}

std::vector<LayerOutcome> layerwise_probe(
    const tensorio::LayerStack& train, std::span<const std::string> train_labels,
    const tensorio::LayerStack& eval, std::span<const std::string> eval_labels,
    const TrainConfig& cfg, dataio::MetricKind metric,
    std::span<const std::string> classes, std::span<const std::size_t> layers,
    unsigned threads) {
  cfg.validate();
  if (metric == dataio::MetricKind::kPearsonCc) {
    throw Error(ErrorCode::kMetricMismatch,
                "probes are classification-only; pearson_cc does not apply");
  }
  if (train.size() != eval.size()) {
    throw Error(ErrorCode::kLayerCountMismatch,
                std::to_string(train.size()) + " train layers vs " +
                    std::to_string(eval.size()) + " eval layers");
  }
  if (eval_labels.size() != eval.rows()) {
    throw Error(ErrorCode::kRowCountMismatch,
                std::to_string(eval_labels.size()) + " eval labels for " +
                    std::to_string(eval.rows()) + " rows");
  }
  std::vector<std::size_t> selected(layers.begin(), layers.end());
  if (selected.empty()) {
    for (std::size_t l = 0; l < train.size(); ++l) selected.push_back(l);
  }
  for (std::size_t l : selected) {
    if (l >= train.size()) {
      throw Error(ErrorCode::kInvalidTrainConfig,
                  "layer " + std::to_string(l) + " out of range");
    }
  }
  const auto shared = classes.empty()
                          ? sorted_classes(train_labels)
                          : std::vector<std::string>(classes.begin(), classes.end());

  std::vector<LayerOutcome> out(selected.size());
  parallel_for(selected.size(), threads, [&](std::size_t s) {
    const auto& layer = train.layers[selected[s]];
    ProbeModel model = train_probe(layer, train_labels, cfg, shared);
    const auto predicted = predict(model, eval.layers[selected[s]]);
    std::vector<dataio::LabelPair> pairs;
    pairs.reserve(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      pairs.push_back({eval_labels[i], predicted[i]});
    }
    out[s] = {layer.layer_index, evaluate(metric, pairs), std::move(model)};
  });
  return out;
}

}  // namespace robustkit::probe
