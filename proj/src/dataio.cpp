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

#include "robustkit/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "robustkit/error.hpp"

namespace robustkit::dataio {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(std::size_t line_no, const std::string& reason) {
  throw Error(ErrorCode::kMalformedRecord,
              "line " + std::to_string(line_no) + ": " + reason);
}

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

// JSON scalar → class name. Integers are accepted for label spaces like
// {"0", "1"} that are often serialized numerically.
std::optional<std::string> json_to_class(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number_unsigned()) return std::to_string(j.get<unsigned long long>());
  if (j.is_number_float()) return format_real(j.get<double>());
  return std::nullopt;
}

std::optional<double> json_to_real(const json& j) {
  if (j.is_number()) {
    const double v = j.get<double>();
    if (std::isfinite(v)) return v;
    return std::nullopt;
  }
  if (j.is_string()) return parse_real(j.get<std::string>());
  return std::nullopt;
}

// Parses a label cell for `task`. Range/class membership is checked by the
// caller, which knows the record id.
std::optional<Label> json_to_label(const json& j, const TaskConfig& task) {
  if (task.is_regression()) {
    if (auto v = json_to_real(j)) return Label{*v};
    return std::nullopt;
  }
  if (auto c = json_to_class(j)) return Label{*c};
  return std::nullopt;
}

bool label_in_space(const Label& label, const TaskConfig& task,
                    bool unclamped_regression) {
  if (task.is_regression()) {
    const auto* v = std::get_if<double>(&label);
    if (v == nullptr || !std::isfinite(*v)) return false;
    if (unclamped_regression) return true;
    const auto& space = std::get<RegressionSpace>(task.label_space);
    return *v >= space.min && *v <= space.max;
  }
  const auto* c = std::get_if<std::string>(&label);
  if (c == nullptr) return false;
  const auto& classes = task.classes();
  return std::find(classes.begin(), classes.end(), *c) != classes.end();
}

json label_to_json(const Label& label) {
  if (const auto* v = std::get_if<double>(&label)) return *v;
  return std::get<std::string>(label);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  return in;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<Record> parse_jsonl_records(std::istream& in,
                                        const TaskConfig& task) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) malformed(line_no, "expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
      if (key != "id" && key != "text_a" && key != "text_b" && key != "label") {
        malformed(line_no, "unexpected field '" + key + "'");
      }
    }
    if (!obj.contains("id") || !obj["id"].is_string()) {
      malformed(line_no, "missing string field 'id'");
    }
    if (!obj.contains("text_a") || !obj["text_a"].is_string()) {
      malformed(line_no, "missing string field 'text_a'");
    }
    if (!obj.contains("label")) malformed(line_no, "missing field 'label'");

    Record rec;
    rec.id = obj["id"].get<std::string>();
    rec.text_a = obj["text_a"].get<std::string>();
    if (obj.contains("text_b") && !obj["text_b"].is_null()) {
      if (!obj["text_b"].is_string()) malformed(line_no, "text_b must be a string");
      rec.text_b = obj["text_b"].get<std::string>();
    }
    auto label = json_to_label(obj["label"], task);
    if (!label) {
      throw Error(ErrorCode::kLabelOutOfSpace,
                  "record '" + rec.id + "': label has the wrong type for task");
    }
    rec.label = std::move(*label);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<Record> parse_tsv_records(std::istream& in,
                                      const TaskConfig& task) {
  std::string line;
  if (!std::getline(in, line)) malformed(1, "TSV header row required");
  strip_cr(line);
  const auto header = split_tabs(line);

  std::optional<std::size_t> col_id, col_a, col_b, col_label;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "id") col_id = i;
    else if (header[i] == "text_a") col_a = i;
    else if (header[i] == "text_b") col_b = i;
    else if (header[i] == "label") col_label = i;
    else malformed(1, "unexpected TSV column '" + std::string(header[i]) + "'");
  }
  if (!col_id || !col_a || !col_label) {
    malformed(1, "TSV header must name id, text_a and label");
  }

  std::vector<Record> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_tabs(line);
    if (cells.size() != header.size()) {
      malformed(line_no, "expected " + std::to_string(header.size()) +
                             " cells, found " + std::to_string(cells.size()));
    }
    Record rec;
    rec.id = std::string(cells[*col_id]);
    rec.text_a = std::string(cells[*col_a]);
    if (col_b) rec.text_b = std::string(cells[*col_b]);
    const std::string raw_label(cells[*col_label]);
    auto label = json_to_label(json(raw_label), task);
    if (!label) {
      throw Error(ErrorCode::kLabelOutOfSpace,
                  "record '" + rec.id + "': label '" + raw_label +
                      "' does not parse for task");
    }
    rec.label = std::move(*label);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::string_view metric_name(MetricKind m) {
  switch (m) {
    case MetricKind::kAccuracy:
      return "accuracy";
    case MetricKind::kMatthewsCc:
      return "matthews_cc";
    case MetricKind::kPearsonCc:
      return "pearson_cc";
  }
  return "unknown";
}

MetricKind parse_metric(std::string_view name) {
  if (name == "accuracy") return MetricKind::kAccuracy;
  if (name == "matthews_cc") return MetricKind::kMatthewsCc;
  if (name == "pearson_cc") return MetricKind::kPearsonCc;
  throw Error(ErrorCode::kInvalidTaskConfig,
              "unknown metric '" + std::string(name) + "'");
}

std::string label_to_string(const Label& label) {
  if (const auto* v = std::get_if<double>(&label)) return format_real(*v);
  return std::get<std::string>(label);
}

const std::vector<std::string>& TaskConfig::classes() const {
  static const std::vector<std::string> kNone;
  if (const auto* c = std::get_if<ClassificationSpace>(&label_space)) {
    return c->classes;
  }
  return kNone;
}

void TaskConfig::validate() const {
  if (const auto* c = std::get_if<ClassificationSpace>(&label_space)) {
    const std::set<std::string> distinct(c->classes.begin(), c->classes.end());
    if (distinct.size() < 2 || distinct.size() != c->classes.size()) {
      throw Error(ErrorCode::kInvalidTaskConfig,
                  "task '" + name + "': classification needs >= 2 distinct classes");
    }
    if (primary_metric == MetricKind::kPearsonCc) {
      throw Error(ErrorCode::kInvalidTaskConfig,
                  "task '" + name + "': pearson_cc requires a regression label space");
    }
  } else {
    const auto& r = std::get<RegressionSpace>(label_space);
    if (!(r.min < r.max)) {
      throw Error(ErrorCode::kInvalidTaskConfig,
                  "task '" + name + "': regression range needs min < max");
    }
    if (primary_metric != MetricKind::kPearsonCc) {
      throw Error(ErrorCode::kInvalidTaskConfig,
                  "task '" + name + "': regression tasks use pearson_cc");
    }
  }
}

TaskConfig TaskConfig::from_json(const json& j) {
  TaskConfig cfg;
  try {
    cfg.name = j.at("name").get<std::string>();
    const auto arity = j.value("arity", std::string("single"));
    if (arity == "single") cfg.arity = Arity::kSingle;
    else if (arity == "pair") cfg.arity = Arity::kPair;
    else throw Error(ErrorCode::kInvalidTaskConfig, "unknown arity '" + arity + "'");

    const auto& space = j.at("label_space");
    const auto type = space.at("type").get<std::string>();
    if (type == "classification") {
      ClassificationSpace c;
      for (const auto& v : space.at("classes")) {
        auto name = json_to_class(v);
        if (!name) throw Error(ErrorCode::kInvalidTaskConfig, "bad class name");
        c.classes.push_back(*name);
      }
      cfg.label_space = std::move(c);
    } else if (type == "regression") {
      cfg.label_space = RegressionSpace{space.at("min").get<double>(),
                                        space.at("max").get<double>()};
    } else {
      throw Error(ErrorCode::kInvalidTaskConfig,
                  "unknown label_space type '" + type + "'");
    }
    cfg.primary_metric = parse_metric(j.at("primary_metric").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidTaskConfig,
                std::string("task config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json TaskConfig::to_json() const {
  json j;
  j["name"] = name;
  j["arity"] = arity == Arity::kSingle ? "single" : "pair";
  if (const auto* c = std::get_if<ClassificationSpace>(&label_space)) {
    j["label_space"] = {{"type", "classification"}, {"classes", c->classes}};
  } else {
    const auto& r = std::get<RegressionSpace>(label_space);
    j["label_space"] = {{"type", "regression"}, {"min", r.min}, {"max", r.max}};
  }
  j["primary_metric"] = metric_name(primary_metric);
  return j;
}

TaskConfig load_task_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidTaskConfig,
                path.string() + ": " + e.what());
  }
  return TaskConfig::from_json(j);
}

LabeledDataset::LabeledDataset(std::vector<Record> records, TaskConfig task)
    : records_(std::move(records)), task_(std::move(task)) {
  task_.validate();
  const bool pair = task_.arity == Arity::kPair;
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& rec = records_[i];
    if (rec.id.empty()) malformed(i + 1, "empty id");
    if (!index_.emplace(rec.id, i).second) {
      throw Error(ErrorCode::kDuplicateId, rec.id);
    }
    if (rec.text_b.has_value() != pair) {
      malformed(i + 1, pair ? "pair task record '" + rec.id + "' lacks text_b"
                            : "single-sentence task record '" + rec.id +
                                  "' has text_b");
    }
    if (!label_in_space(rec.label, task_, false)) {
      throw Error(ErrorCode::kLabelOutOfSpace, rec.id);
    }
  }
}

std::optional<std::size_t> LabeledDataset::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabeledDataset parse_dataset(std::istream& in, const TaskConfig& task,
                             DatasetFormat format) {
  auto records = format == DatasetFormat::kJsonl ? parse_jsonl_records(in, task)
                                                 : parse_tsv_records(in, task);
  return LabeledDataset(std::move(records), task);
}

LabeledDataset load_dataset(const std::filesystem::path& path,
                            const TaskConfig& task, DatasetFormat format) {
  auto in = open_input(path);
  return parse_dataset(in, task, format);
}

void write_dataset(const LabeledDataset& ds, std::ostream& out,
                   DatasetFormat format) {
  const bool pair = ds.task().arity == Arity::kPair;
  if (format == DatasetFormat::kJsonl) {
    for (const auto& rec : ds.records()) {
      nlohmann::ordered_json obj;
      obj["id"] = rec.id;
      obj["text_a"] = rec.text_a;
      if (rec.text_b) obj["text_b"] = *rec.text_b;
      obj["label"] = label_to_json(rec.label);
      out << obj.dump() << '\n';
    }
    return;
  }

  auto check_cell = [](const std::string& id, const std::string& cell) {
    if (cell.find_first_of("\t\n\r") != std::string::npos) {
      throw Error(ErrorCode::kMalformedRecord,
                  "record '" + id + "' contains a tab or newline; use JSONL");
    }
  };
  out << (pair ? "id\ttext_a\ttext_b\tlabel\n" : "id\ttext_a\tlabel\n");
  for (const auto& rec : ds.records()) {
    check_cell(rec.id, rec.id);
    check_cell(rec.id, rec.text_a);
    out << rec.id << '\t' << rec.text_a << '\t';
    if (pair) {
      check_cell(rec.id, *rec.text_b);
      out << *rec.text_b << '\t';
    }
    out << label_to_string(rec.label) << '\n';
  }
}

void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path,
                  DatasetFormat format) {
  std::ostringstream buffer;
  write_dataset(ds, buffer, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << buffer.str();
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

PredictionFile parse_predictions(std::istream& in, const TaskConfig& task) {
  PredictionFile preds;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("label") || !obj.contains("prediction")) {
      malformed(line_no, "expected {id, label, prediction}");
    }
    PredictionEntry entry;
    entry.id = obj["id"].get<std::string>();
    if (entry.id.empty()) malformed(line_no, "empty id");
    auto label = json_to_label(obj["label"], task);
    auto prediction = json_to_label(obj["prediction"], task);
    if (!label || !label_in_space(*label, task, false)) {
      throw Error(ErrorCode::kLabelOutOfSpace, entry.id);
    }
    if (!prediction || !label_in_space(*prediction, task, true)) {
      throw Error(ErrorCode::kLabelOutOfSpace, entry.id);
    }
    if (!seen.insert(entry.id).second) {
      throw Error(ErrorCode::kDuplicateId, entry.id);
    }
    entry.label = std::move(*label);
    entry.prediction = std::move(*prediction);
    preds.entries.push_back(std::move(entry));
  }
  return preds;
}

PredictionFile load_predictions(const std::filesystem::path& path,
                                const TaskConfig& task) {
  auto in = open_input(path);
  return parse_predictions(in, task);
}

void write_predictions(const PredictionFile& preds, std::ostream& out) {
  for (const auto& e : preds.entries) {
    nlohmann::ordered_json obj;
    obj["id"] = e.id;
    obj["label"] = label_to_json(e.label);
    obj["prediction"] = label_to_json(e.prediction);
    out << obj.dump() << '\n';
  }
}

std::vector<LabelPair> align(const LabeledDataset& ds,
                             const PredictionFile& preds) {
  std::vector<std::optional<std::size_t>> by_row(ds.size());
  for (std::size_t i = 0; i < preds.entries.size(); ++i) {
    const auto row = ds.find(preds.entries[i].id);
    if (!row) throw Error(ErrorCode::kUnknownId, preds.entries[i].id);
    by_row[*row] = i;
  }
  std::vector<LabelPair> pairs;
  pairs.reserve(preds.entries.size());
  for (std::size_t row = 0; row < by_row.size(); ++row) {
    if (!by_row[row]) continue;
    pairs.push_back({ds.records()[row].label,
                     preds.entries[*by_row[row]].prediction});
  }
  return pairs;
}

std::vector<IdLabel> load_id_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<IdLabel> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("label")) {
      malformed(line_no, "expected {id, label, ...}");
    }
    auto label = json_to_class(obj["label"]);
    if (!label) malformed(line_no, "label must be a string or number");
    IdLabel entry{obj["id"].get<std::string>(), *label};
    if (!seen.insert(entry.id).second) {
      throw Error(ErrorCode::kDuplicateId, entry.id);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace robustkit::dataio
