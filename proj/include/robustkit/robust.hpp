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

#ifndef ROBUSTKIT_ROBUST_HPP_
#define ROBUSTKIT_ROBUST_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "robustkit/dataio.hpp"
#include "robustkit/simmetrics.hpp"

namespace robustkit::robust {

// 1 - (clean - perturbed) / clean. Never capped. Throws kNonPositiveClean.
double robustness(double clean, double perturbed);

struct RobustnessScore {
  double clean = 0.0;
  double perturbed = 0.0;
  double score = 0.0;
  std::string metric_name;
  std::string task;
  std::string perturbation;
  std::string model;
};

nlohmann::json to_json(const RobustnessScore& s);
RobustnessScore score_from_json(const nlohmann::json& j);

// Scores the task's primary metric on each file, then robustness(). Entries
// are matched by id, so line order does not matter. Throws kMetricMismatch
// when the id sets or gold labels differ, plus metric errors.
RobustnessScore score_run(const dataio::PredictionFile& clean,
                          const dataio::PredictionFile& perturbed,
                          const dataio::TaskConfig& task,
                          std::string perturbation = {},
                          std::string model = {});

using simmetrics::LayerValue;

// Reads {per_layer: [{layer_index, value}, ...]} as written by the cka,
// stir and probe commands. Throws kFormatError.
std::vector<LayerValue> parse_layer_values(const nlohmann::json& j);

struct LayerDrop {
  std::size_t layer_index = 0;
  double clean_value = 0.0;
  double perturbed_value = 0.0;
  double drop = 0.0;
};

struct LayerImpactReport {
  std::vector<LayerDrop> per_layer;  // ascending layer index
  std::vector<std::size_t> top_affected;
};

// drop = clean - perturbed per layer; top_affected holds the `top` largest
// drops (all layers if fewer), descending, ties to the lower layer index.
// Throws kLayerSetMismatch.
LayerImpactReport layer_impact(std::span<const LayerValue> clean,
                               std::span<const LayerValue> perturbed,
                               std::size_t top = 3);

nlohmann::json to_json(const LayerImpactReport& r);

struct ReportColumn {
  std::string model;
  std::string task;
  std::string metric_name;
};

struct ReportCell {
  std::optional<double> score;
  bool impactful = false;  // among the column's three lowest scores
  bool row_max = false;
};

// Rows are perturbations, columns are (model, task) pairs, both in order of
// first appearance.
struct ReportTable {
  std::vector<std::string> perturbations;
  std::vector<ReportColumn> columns;
  std::vector<std::vector<ReportCell>> cells;  // [row][column]
};

// Throws kDuplicateKey on a repeated (task, model, perturbation) and
// kMetricMismatch when one column mixes metrics.
ReportTable aggregate_report(std::span<const RobustnessScore> scores,
                             std::size_t top = 3);

nlohmann::json to_json(const ReportTable& table);
// Long format: one line per filled cell.
std::string to_csv(const ReportTable& table);
// Whitespace-separated columns for gnuplot histograms; missing cells are "?".
std::string to_gnuplot(const ReportTable& table);

}  // namespace robustkit::robust

#endif  // ROBUSTKIT_ROBUST_HPP_
