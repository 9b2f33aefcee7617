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

#ifndef ROBUSTKIT_METRICS_HPP_
#define ROBUSTKIT_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>

#include "robustkit/dataio.hpp"

namespace robustkit::probe {

struct EvalOutcome {
  dataio::MetricKind metric = dataio::MetricKind::kAccuracy;
  double value = 0.0;
  std::size_t n = 0;
};

// Fraction of exact matches. Throws kEmptyInput.
EvalOutcome accuracy(std::span<const dataio::LabelPair> pairs);

// MCC over the 2x2 confusion matrix. The class that sorts first is the
// negative class; the value does not depend on this choice. Returns 0 when
// a marginal is zero. Throws kEmptyInput, kNonBinaryLabels.
EvalOutcome matthews_cc(std::span<const dataio::LabelPair> pairs);

// Sample Pearson correlation of numeric labels and predictions. Throws
// kEmptyInput, kConstantSeries (also for a single pair), kMetricMismatch
// on non-numeric values.
EvalOutcome pearson_cc(std::span<const dataio::LabelPair> pairs);

// Throws kConstantSeries, kShapeMismatch.
double pearson(std::span<const double> x, std::span<const double> y);

EvalOutcome evaluate(dataio::MetricKind metric,
                     std::span<const dataio::LabelPair> pairs);

}  // namespace robustkit::probe

#endif  // ROBUSTKIT_METRICS_HPP_
