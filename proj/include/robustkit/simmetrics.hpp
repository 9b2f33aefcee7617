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

#ifndef ROBUSTKIT_SIMMETRICS_HPP_
#define ROBUSTKIT_SIMMETRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "robustkit/matrix.hpp"
#include "robustkit/tensorio.hpp"

// Representation similarity: linear CKA through centered Gram matrices and
// HSIC, and STIR (shared invariance through nearest-match inversion).

namespace robustkit::simmetrics {

// K = X X^T. Throws kTooFewRows when X has fewer than two rows.
Matrix gram_linear(const Matrix& x);

// K' = H K H with H = I - (1/n) 11^T, evaluated as
// K'_ij = K_ij - mean_i - mean_j + grand_mean. The result is exactly
// symmetric. Throws kShapeMismatch if K is not square.
Matrix center_gram(const Matrix& k);

// flatten(K') . flatten(L') / (n - 1)^2 on Grams that are already
// centered. Throws kShapeMismatch.
double hsic_centered(const Matrix& k_centered, const Matrix& l_centered);

// HSIC of two (uncentered) Gram matrices.
double hsic(const Matrix& k, const Matrix& l);

// HSIC(K, L) / sqrt(HSIC(K, K) HSIC(L, L)) with K = X X^T, L = Y Y^T.
// Throws kRowCountMismatch, kTooFewRows, kDegenerateInput (a constant
// representation, whose centered Gram vanishes).
double linear_cka(const Matrix& x, const Matrix& y);

struct LayerValue {
  std::size_t layer_index = 0;
  double value = 0.0;
};

struct CkaReport {
  std::vector<LayerValue> per_layer;
  std::size_t n = 0;
  std::size_t d_x = 0;
  std::size_t d_y = 0;
};

// One CKA value per aligned layer pair. Throws kLayerCountMismatch,
// kRowCountMismatch.
CkaReport layerwise_cka(const tensorio::LayerStack& a,
                        const tensorio::LayerStack& b, unsigned threads = 1);

nlohmann::json to_json(const CkaReport& report);

// For each i in pool: argmin over j in pool of ||m1[i] - m2[j]||_2, ties to
// the lowest j. Returned entries are dataset row indices, aligned with
// pool. Throws kDimensionMismatch, kEmptyPool.
std::vector<std::size_t> invert_nearest(const Matrix& m1, const Matrix& m2,
                                        std::span<const std::size_t> pool);

enum class StirDirection { kFinetunedGivenPretrained, kPretrainedGivenFinetuned };

std::string_view direction_name(StirDirection d);
StirDirection parse_direction(std::string_view name);

struct StirConfig {
  std::size_t k = 20;
  double sample_fraction = 0.5;
  std::optional<std::size_t> max_samples;
  std::uint64_t seed = 0;
  StirDirection direction = StirDirection::kFinetunedGivenPretrained;
  // Layer of the conditioning model used for the nearest-match search.
  // Unset means its last layer. Setting it is an experimental extension.
  std::optional<std::size_t> conditioning_layer;

  // Throws kInvalidStirConfig.
  void validate() const;
};

struct StirLayer {
  std::size_t layer_index = 0;
  double stir = 0.0;
  std::vector<double> per_sample_cka;
};

struct StirReport {
  std::vector<StirLayer> per_layer;
  StirConfig config;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t sample_size = 0;
};

// Rows of subsample `index` (sorted ascending): floor(fraction * n) rows,
// capped at max_samples, drawn without replacement from a stream keyed by
// (seed, index).
std::vector<std::size_t> stir_subsample(std::size_t n, const StirConfig& cfg,
                                        std::size_t index);

// STIR(measured | conditioning). `first` and `second` are the two stacks
// as given on the command line (--m1 / --m2). With
// kFinetunedGivenPretrained, `first` conditions the inversion and `second`
// is measured; kPretrainedGivenFinetuned swaps the roles. For each of k
// subsamples X, X' is found by invert_nearest on the conditioning stack's
// last layer against the measured stack's last layer, then
// CKA(measured_l(X), measured_l(X')) is reported for every measured layer.
// Throws kRowCountMismatch, kDimensionMismatch, kSampleTooSmall and the
// CKA errors.
StirReport stir(const tensorio::LayerStack& first,
                const tensorio::LayerStack& second, const StirConfig& cfg,
                unsigned threads = 1);

nlohmann::json to_json(const StirReport& report);
nlohmann::json to_json(const StirConfig& cfg);

}  // namespace robustkit::simmetrics

#endif  // ROBUSTKIT_SIMMETRICS_HPP_
