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

#include "robustkit/simmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "robustkit/error.hpp"
#include "robustkit/parallel.hpp"
#include "robustkit/random.hpp"
#include "robustkit/simd/kernels.hpp"

namespace robustkit::simmetrics {

namespace {

// A centered Gram whose self-HSIC is this small relative to the raw Gram's
// energy is rounding noise around zero: the representation is constant.
constexpr double kDegenerateRatio = 1e-24;

void require_square(const Matrix& k, const char* what) {
  if (k.rows() != k.cols()) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + " must be square, got " +
                    std::to_string(k.rows()) + "x" + std::to_string(k.cols()));
  }
}

double self_energy(const Matrix& k) {
  const auto flat = k.flat();
  const double n1 = static_cast<double>(k.rows()) - 1.0;
  return simd::dot(flat, flat) / (n1 * n1);
}

std::size_t scaled_count(double fraction, std::size_t n) {
  const double product = fraction * static_cast<double>(n);
  const double nearest = std::nearbyint(product);
  if (std::abs(product - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::floor(product));
}

}  // namespace

Matrix gram_linear(const Matrix& x) {
  const std::size_t n = x.rows();
  if (n < 2) {
    throw Error(ErrorCode::kTooFewRows,
                "need at least 2 rows, got " + std::to_string(n));
  }
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t j = i; j < n; ++j) {
      const double v = simd::dot(xi, x.row(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Matrix center_gram(const Matrix& k) {
  require_square(k, "Gram matrix");
  const std::size_t n = k.rows();
  if (n == 0) return k;
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> mean(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double v : k.row(i)) sum += v;
    mean[i] = sum * inv_n;
  }
  double grand = 0.0;
  for (double m : mean) grand += m;
  grand *= inv_n;

  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = k(i, j) - mean[i] - mean[j] + grand;
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

double hsic_centered(const Matrix& k_centered, const Matrix& l_centered) {
  require_square(k_centered, "K'");
  require_square(l_centered, "L'");
  if (k_centered.rows() != l_centered.rows()) {
    throw Error(ErrorCode::kShapeMismatch,
                "Gram sizes differ: " + std::to_string(k_centered.rows()) +
                    " vs " + std::to_string(l_centered.rows()));
  }
  const std::size_t n = k_centered.rows();
  if (n < 2) {
    throw Error(ErrorCode::kTooFewRows, "HSIC needs n >= 2");
  }
  const double n1 = static_cast<double>(n - 1);
  return simd::dot(k_centered.flat(), l_centered.flat()) / (n1 * n1);
}

double hsic(const Matrix& k, const Matrix& l) {
  return hsic_centered(center_gram(k), center_gram(l));
}

double linear_cka(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows()) {
    throw Error(ErrorCode::kRowCountMismatch,
                "CKA inputs have " + std::to_string(x.rows()) + " and " +
                    std::to_string(y.rows()) + " rows");
  }
  const Matrix k = gram_linear(x);
  const Matrix l = gram_linear(y);
  const Matrix kc = center_gram(k);
  const Matrix lc = center_gram(l);

  const double kl = hsic_centered(kc, lc);
  const double kk = hsic_centered(kc, kc);
  const double ll = hsic_centered(lc, lc);
  if (kk <= kDegenerateRatio * self_energy(k) || kk == 0.0) {
    throw Error(ErrorCode::kDegenerateInput,
                "first representation is constant across examples");
  }
  if (ll <= kDegenerateRatio * self_energy(l) || ll == 0.0) {
    throw Error(ErrorCode::kDegenerateInput,
                "second representation is constant across examples");
  }
  return kl / std::sqrt(kk * ll);
}

CkaReport layerwise_cka(const tensorio::LayerStack& a,
                        const tensorio::LayerStack& b, unsigned threads) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLayerCountMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                    " layers");
  }
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::kRowCountMismatch,
                std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) +
                    " rows");
  }
  CkaReport report;
  report.n = a.rows();
  report.d_x = a.cols();
  report.d_y = b.cols();
  report.per_layer.resize(a.size());
  parallel_for(a.size(), threads, [&](std::size_t l) {
    report.per_layer[l] = {a.layers[l].layer_index,
                           linear_cka(a.layers[l].matrix, b.layers[l].matrix)};
  });
  return report;
}

nlohmann::json to_json(const CkaReport& report) {
  nlohmann::ordered_json j;
  j["per_layer"] = nlohmann::ordered_json::array();
  for (const auto& lv : report.per_layer) {
    j["per_layer"].push_back({{"layer_index", lv.layer_index}, {"value", lv.value}});
  }
  j["config"] = {{"metric", "linear_cka"}};
  j["n"] = report.n;
  j["d"] = report.d_x;
  j["d_y"] = report.d_y;
  return nlohmann::json::parse(j.dump());
}

std::vector<std::size_t> invert_nearest(const Matrix& m1, const Matrix& m2,
                                        std::span<const std::size_t> pool) {
  if (m1.cols() != m2.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "representation widths differ: " + std::to_string(m1.cols()) +
                    " vs " + std::to_string(m2.cols()));
  }
  if (pool.empty()) throw Error(ErrorCode::kEmptyPool, "empty candidate pool");
  for (std::size_t idx : pool) {
    if (idx >= m1.rows() || idx >= m2.rows()) {
      throw Error(ErrorCode::kRowCountMismatch,
                  "pool index " + std::to_string(idx) + " out of range");
    }
  }

  std::vector<std::size_t> matches(pool.size());
  for (std::size_t p = 0; p < pool.size(); ++p) {
    const auto query = m1.row(pool[p]);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = pool.front();
    for (std::size_t j : pool) {
      const double dist = simd::squared_l2(query, m2.row(j));
      if (dist < best || (dist == best && j < best_j)) {
        best = dist;
        best_j = j;
      }
    }
    matches[p] = best_j;
  }
  return matches;
}

std::string_view direction_name(StirDirection d) {
  return d == StirDirection::kFinetunedGivenPretrained
             ? "finetuned_given_pretrained"
             : "pretrained_given_finetuned";
}

StirDirection parse_direction(std::string_view name) {
  if (name == "finetuned_given_pretrained") {
    return StirDirection::kFinetunedGivenPretrained;
  }
  if (name == "pretrained_given_finetuned") {
    return StirDirection::kPretrainedGivenFinetuned;
  }
  throw Error(ErrorCode::kInvalidStirConfig,
              "unknown STIR direction '" + std::string(name) + "'");
}

void StirConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::kInvalidStirConfig, "k must be >= 1");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidStirConfig,
                "sample_fraction must lie in (0, 1]");
  }
  if (max_samples && *max_samples < 1) {
    throw Error(ErrorCode::kInvalidStirConfig, "max_samples must be >= 1");
  }
}

std::vector<std::size_t> stir_subsample(std::size_t n, const StirConfig& cfg,
                                        std::size_t index) {
  std::size_t m = std::min(scaled_count(cfg.sample_fraction, n), n);
  if (cfg.max_samples) m = std::min(m, *cfg.max_samples);
  if (m < 2) {
    throw Error(ErrorCode::kSampleTooSmall,
                "subsample of " + std::to_string(m) + " rows from n=" +
                    std::to_string(n) + "; CKA needs at least 2");
  }
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(index)));
  for (std::size_t i = 0; i < m; ++i) {
    const auto j = i + rng.uniform_index(n - i);
    std::swap(rows[i], rows[j]);
  }
  rows.resize(m);
  std::sort(rows.begin(), rows.end());
  return rows;
}

StirReport stir(const tensorio::LayerStack& first,
                const tensorio::LayerStack& second, const StirConfig& cfg,
                unsigned threads) {
  cfg.validate();
  const bool forward = cfg.direction == StirDirection::kFinetunedGivenPretrained;
  const auto& conditioning = forward ? first : second;
  const auto& measured = forward ? second : first;
  if (conditioning.size() == 0 || measured.size() == 0) {
    throw Error(ErrorCode::kFormatError, "STIR needs non-empty layer stacks");
  }
  if (conditioning.rows() != measured.rows()) {
    throw Error(ErrorCode::kRowCountMismatch,
                std::to_string(first.rows()) + " vs " +
                    std::to_string(second.rows()) + " rows");
  }
  const std::size_t cond_layer =
      cfg.conditioning_layer.value_or(conditioning.size() - 1);
  if (cond_layer >= conditioning.size()) {
    throw Error(ErrorCode::kInvalidStirConfig,
                "conditioning layer " + std::to_string(cond_layer) +
                    " out of range");
  }
  const Matrix& cond_reps = conditioning.layers[cond_layer].matrix;
  const Matrix& target_reps = measured.layers.back().matrix;
  if (cond_reps.cols() != target_reps.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "representation widths differ: " +
                    std::to_string(cond_reps.cols()) + " vs " +
                    std::to_string(target_reps.cols()));
  }

  const std::size_t n = measured.rows();
  const std::size_t layers = measured.size();
  StirReport report;
  report.config = cfg;
  report.n = n;
  report.d = measured.cols();
  report.sample_size = stir_subsample(n, cfg, 0).size();
  report.per_layer.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    report.per_layer[l].layer_index = measured.layers[l].layer_index;
    report.per_layer[l].per_sample_cka.assign(cfg.k, 0.0);
  }

  parallel_for(cfg.k, threads, [&](std::size_t s) {
    const auto sample = stir_subsample(n, cfg, s);
    const auto matched = invert_nearest(cond_reps, target_reps, sample);
    for (std::size_t l = 0; l < layers; ++l) {
      const Matrix& reps = measured.layers[l].matrix;
      report.per_layer[l].per_sample_cka[s] =
          linear_cka(reps.select_rows(sample), reps.select_rows(matched));
    }
  });

  for (auto& layer : report.per_layer) {
    double sum = 0.0;
    for (double v : layer.per_sample_cka) sum += v;
    layer.stir = sum / static_cast<double>(cfg.k);
  }
  return report;
}

nlohmann::json to_json(const StirConfig& cfg) {
  nlohmann::ordered_json j;
  j["metric"] = "stir";
  j["k"] = cfg.k;
  j["sample_fraction"] = cfg.sample_fraction;
  j["max_samples"] = cfg.max_samples ? nlohmann::ordered_json(*cfg.max_samples)
                                     : nlohmann::ordered_json(nullptr);
  j["seed"] = cfg.seed;
  j["direction"] = direction_name(cfg.direction);
  j["conditioning_layer"] =
      cfg.conditioning_layer ? nlohmann::ordered_json(*cfg.conditioning_layer)
                             : nlohmann::ordered_json("last");
  return nlohmann::json::parse(j.dump());
}

nlohmann::json to_json(const StirReport& report) {
  nlohmann::ordered_json j;
  j["per_layer"] = nlohmann::ordered_json::array();
  for (const auto& layer : report.per_layer) {
    j["per_layer"].push_back({{"layer_index", layer.layer_index},
                              {"value", layer.stir},
                              {"per_sample_cka", layer.per_sample_cka}});
  }
  j["config"] = nlohmann::ordered_json::parse(to_json(report.config).dump());
  j["n"] = report.n;
  j["d"] = report.d;
  j["sample_size"] = report.sample_size;
  return nlohmann::json::parse(j.dump());
}

}  // namespace robustkit::simmetrics
