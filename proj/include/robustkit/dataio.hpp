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

#ifndef ROBUSTKIT_DATAIO_HPP_
#define ROBUSTKIT_DATAIO_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"

namespace robustkit::dataio {

enum class Arity { kSingle, kPair };
enum class MetricKind { kAccuracy, kMatthewsCc, kPearsonCc };
enum class DatasetFormat { kJsonl, kTsv };

std::string_view metric_name(MetricKind m);
MetricKind parse_metric(std::string_view name);

struct ClassificationSpace {
  std::vector<std::string> classes;
};

struct RegressionSpace {
  double min = 0.0;
  double max = 1.0;
};

struct TaskConfig {
  std::string name;
  Arity arity = Arity::kSingle;
  std::variant<ClassificationSpace, RegressionSpace> label_space;
  MetricKind primary_metric = MetricKind::kAccuracy;

  bool is_regression() const {
    return std::holds_alternative<RegressionSpace>(label_space);
  }
  const std::vector<std::string>& classes() const;

  // Throws kInvalidTaskConfig.
  void validate() const;

  // {"name", "arity": "single"|"pair",
  //  "label_space": {"type": "classification", "classes": [...]} |
  //                 {"type": "regression", "min": x, "max": y},
  //  "primary_metric": "accuracy"|"matthews_cc"|"pearson_cc"}
  static TaskConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

TaskConfig load_task_config(const std::filesystem::path& path);

// Class name for classification tasks, value for regression tasks.
using Label = std::variant<std::string, double>;

std::string label_to_string(const Label& label);

struct Record {
  std::string id;
  std::string text_a;
  std::optional<std::string> text_b;
  Label label;

  friend bool operator==(const Record&, const Record&) = default;
};

// Immutable once constructed. Record order is significant: row i of every
// representation matrix belongs to record i.
class LabeledDataset {
 public:
  // Validates ids, arity and labels; throws kDuplicateId, kMalformedRecord
  // or kLabelOutOfSpace.
  LabeledDataset(std::vector<Record> records, TaskConfig task);

  const std::vector<Record>& records() const noexcept { return records_; }
  const TaskConfig& task() const noexcept { return task_; }
  std::size_t size() const noexcept { return records_.size(); }

  std::optional<std::size_t> find(std::string_view id) const;

 private:
  std::vector<Record> records_;
  TaskConfig task_;
  std::unordered_map<std::string, std::size_t> index_;
};

LabeledDataset parse_dataset(std::istream& in, const TaskConfig& task,
                             DatasetFormat format);
LabeledDataset load_dataset(const std::filesystem::path& path,
                            const TaskConfig& task, DatasetFormat format);

void write_dataset(const LabeledDataset& ds, std::ostream& out,
                   DatasetFormat format);
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path,
                  DatasetFormat format);

struct PredictionEntry {
  std::string id;
  Label label;
  Label prediction;
};

struct PredictionFile {
  std::vector<PredictionEntry> entries;
};

PredictionFile parse_predictions(std::istream& in, const TaskConfig& task);
PredictionFile load_predictions(const std::filesystem::path& path,
                                const TaskConfig& task);
void write_predictions(const PredictionFile& preds, std::ostream& out);

struct LabelPair {
  Label label;
  Label prediction;
};

// Pairs ordered by dataset record order. Throws kUnknownId for any
// prediction id the dataset does not contain.
std::vector<LabelPair> align(const LabeledDataset& ds,
                             const PredictionFile& preds);

// Loose {id, label} reader used for probe labels: accepts any JSONL whose
// lines carry "id" and "label" (dataset or prediction files).
struct IdLabel {
  std::string id;
  std::string label;
};
std::vector<IdLabel> load_id_labels(const std::filesystem::path& path);

}  // namespace robustkit::dataio

#endif  // ROBUSTKIT_DATAIO_HPP_
