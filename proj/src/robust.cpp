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

#include "robustkit/robust.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "robustkit/error.hpp"
#include "robustkit/metrics.hpp"

namespace robustkit::robust {

namespace {

std::string number(double v) { return nlohmann::json(v).dump(); }

std::vector<const dataio::PredictionEntry*> by_id(
    const dataio::PredictionFile& f) {
  std::vector<const dataio::PredictionEntry*> out;
  out.reserve(f.entries.size());
  for (const auto& e : f.entries) out.push_back(&e);
  std::sort(out.begin(), out.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string gnuplot_token(std::string s) {
  for (char& c : s) {
    if (c == ' ' || c == '\t' || c == '\n') c = '_';
  }
  return s.empty() ? "-" : s;
}

}  // namespace

double robustness(double clean, double perturbed) {
  if (!(clean > 0.0) || !std::isfinite(clean)) {
    throw Error(ErrorCode::kNonPositiveClean,
                "clean metric must be > 0, got " + number(clean));
  }
  return 1.0 - (clean - perturbed) / clean;
}

nlohmann::json to_json(const RobustnessScore& s) {
  nlohmann::ordered_json j;
  j["task"] = s.task;
  j["model"] = s.model;
  j["perturbation"] = s.perturbation;
  j["metric_name"] = s.metric_name;
  j["clean"] = s.clean;
  j["perturbed"] = s.perturbed;
  j["score"] = s.score;
  return nlohmann::json::parse(j.dump());
}

RobustnessScore score_from_json(const nlohmann::json& j) {
  try {
    RobustnessScore s;
    s.task = j.at("task").get<std::string>();
    s.model = j.value("model", std::string{});
    s.perturbation = j.at("perturbation").get<std::string>();
    s.metric_name = j.at("metric_name").get<std::string>();
    s.clean = j.at("clean").get<double>();
    s.perturbed = j.at("perturbed").get<double>();
    s.score = j.at("score").get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError,
                std::string("invalid robustness score JSON: ") + e.what());
  }
}

RobustnessScore score_run(const dataio::PredictionFile& clean,
                          const dataio::PredictionFile& perturbed,
                          const dataio::TaskConfig& task,
                          std::string perturbation, std::string model) {
  const auto c = by_id(clean);
  const auto p = by_id(perturbed);
  if (c.size() != p.size()) {
    throw Error(ErrorCode::kMetricMismatch,
                "prediction files cover " + std::to_string(c.size()) +
                    " and " + std::to_string(p.size()) + " ids");
  }
  std::vector<dataio::LabelPair> clean_pairs, pert_pairs;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i]->id != p[i]->id) {
      throw Error(ErrorCode::kMetricMismatch,
                  "id sets differ near '" + c[i]->id + "' / '" + p[i]->id + "'");
    }
    if (dataio::label_to_string(c[i]->label) !=
        dataio::label_to_string(p[i]->label)) {
      throw Error(ErrorCode::kMetricMismatch,
                  "gold labels differ for id '" + c[i]->id + "'");
    }
    clean_pairs.push_back({c[i]->label, c[i]->prediction});
    pert_pairs.push_back({p[i]->label, p[i]->prediction});
  }
  const auto metric = task.primary_metric;
  RobustnessScore s;
  s.clean = probe::evaluate(metric, clean_pairs).value;
  s.perturbed = probe::evaluate(metric, pert_pairs).value;
  s.score = robustness(s.clean, s.perturbed);
  s.metric_name = std::string(dataio::metric_name(metric));
  s.task = task.name;
  s.perturbation = std::move(perturbation);
  s.model = std::move(model);
  return s;
}

std::vector<LayerValue> parse_layer_values(const nlohmann::json& j) {
  try {
    std::vector<LayerValue> out;
    for (const auto& entry : j.at("per_layer")) {
      out.push_back({entry.at("layer_index").get<std::size_t>(),
                     entry.at("value").get<double>()});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError,
                std::string("expected {per_layer: [{layer_index, value}]}: ") +
                    e.what());
  }
}

LayerImpactReport layer_impact(std::span<const LayerValue> clean,
                               std::span<const LayerValue> perturbed,
                               std::size_t top) {
  std::map<std::size_t, double> c, p;
  for (const auto& lv : clean) {
    if (!c.emplace(lv.layer_index, lv.value).second) {
      throw Error(ErrorCode::kLayerSetMismatch,
                  "layer " + std::to_string(lv.layer_index) +
                      " repeated in clean values");
    }
  }
  for (const auto& lv : perturbed) {
    if (!p.emplace(lv.layer_index, lv.value).second) {
      throw Error(ErrorCode::kLayerSetMismatch,
                  "layer " + std::to_string(lv.layer_index) +
                      " repeated in perturbed values");
    }
  }
  if (c.size() != p.size() ||
      !std::equal(c.begin(), c.end(), p.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; })) {
    throw Error(ErrorCode::kLayerSetMismatch,
                "clean and perturbed cover different layers");
  }

  LayerImpactReport r;
  for (const auto& [layer, value] : c) {
    const double pv = p.at(layer);
    r.per_layer.push_back({layer, value, pv, value - pv});
  }
  std::vector<std::size_t> order(r.per_layer.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t keep = std::min(top, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      const auto& la = r.per_layer[a];
                      const auto& lb = r.per_layer[b];
                      if (la.drop != lb.drop) return la.drop > lb.drop;
                      return la.layer_index < lb.layer_index;
                    });
  for (std::size_t i = 0; i < keep; ++i) {
    r.top_affected.push_back(r.per_layer[order[i]].layer_index);
  }
  return r;
}

nlohmann::json to_json(const LayerImpactReport& r) {
  nlohmann::ordered_json j;
  j["per_layer"] = nlohmann::ordered_json::array();
  for (const auto& d : r.per_layer) {
    j["per_layer"].push_back({{"layer_index", d.layer_index},
                              {"clean_value", d.clean_value},
                              {"perturbed_value", d.perturbed_value},
                              {"drop", d.drop}});
  }
  j["top_affected"] = r.top_affected;
  return nlohmann::json::parse(j.dump());
}

ReportTable aggregate_report(std::span<const RobustnessScore> scores,
                             std::size_t top) {
  ReportTable t;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  auto row_of = [&](const std::string& name) {
    auto it = std::find(t.perturbations.begin(), t.perturbations.end(), name);
    if (it != t.perturbations.end()) {
      return static_cast<std::size_t>(it - t.perturbations.begin());
    }
    t.perturbations.push_back(name);
    return t.perturbations.size() - 1;
  };
  auto column_of = [&](const RobustnessScore& s) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      auto& col = t.columns[i];
      if (col.model == s.model && col.task == s.task) {
        if (col.metric_name != s.metric_name) {
          throw Error(ErrorCode::kMetricMismatch,
                      "column " + s.model + "/" + s.task + " mixes " +
                          col.metric_name + " and " + s.metric_name);
        }
        return i;
      }
    }
    t.columns.push_back({s.model, s.task, s.metric_name});
    return t.columns.size() - 1;
  };

  struct Placed {
    std::size_t row, col;
    double score;
  };
  std::vector<Placed> placed;
  for (const auto& s : scores) {
    if (!seen.emplace(s.task, s.model, s.perturbation).second) {
      throw Error(ErrorCode::kDuplicateKey,
                  "duplicate score for task '" + s.task + "', model '" +
                      s.model + "', perturbation '" + s.perturbation + "'");
    }
    placed.push_back({row_of(s.perturbation), column_of(s), s.score});
  }
  t.cells.assign(t.perturbations.size(),
                 std::vector<ReportCell>(t.columns.size()));
  for (const auto& p : placed) t.cells[p.row][p.col].score = p.score;

  for (std::size_t col = 0; col < t.columns.size(); ++col) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < t.perturbations.size(); ++r) {
      if (t.cells[r][col].score) rows.push_back(r);
    }
    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return *t.cells[a][col].score < *t.cells[b][col].score;
    });
    for (std::size_t i = 0; i < std::min(top, rows.size()); ++i) {
      t.cells[rows[i]][col].impactful = true;
    }
  }
  for (auto& row : t.cells) {
    std::optional<double> best;
    for (const auto& cell : row) {
      if (cell.score && (!best || *cell.score > *best)) best = cell.score;
    }
    for (auto& cell : row) cell.row_max = cell.score && *cell.score == *best;
  }
  return t;
}

nlohmann::json to_json(const ReportTable& table) {
  nlohmann::ordered_json j;
  j["rows"] = table.perturbations;
  j["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : table.columns) {
    j["columns"].push_back(
        {{"model", c.model}, {"task", c.task}, {"metric_name", c.metric_name}});
  }
  j["cells"] = nlohmann::ordered_json::array();
  for (const auto& row : table.cells) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      out.push_back({{"score", cell.score ? nlohmann::ordered_json(*cell.score)
                                          : nlohmann::ordered_json(nullptr)},
                     {"impactful", cell.impactful},
                     {"row_max", cell.row_max}});
    }
    j["cells"].push_back(std::move(out));
  }
  return nlohmann::json::parse(j.dump());
}

std::string to_csv(const ReportTable& table) {
  std::ostringstream out;
  out << "perturbation,model,task,metric,score,impactful,row_max\n";
  for (std::size_t r = 0; r < table.perturbations.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& cell = table.cells[r][c];
      if (!cell.score) continue;
      const auto& col = table.columns[c];
      out << csv_field(table.perturbations[r]) << ',' << csv_field(col.model)
          << ',' << csv_field(col.task) << ',' << csv_field(col.metric_name)
          << ',' << number(*cell.score) << ',' << (cell.impactful ? 1 : 0)
          << ',' << (cell.row_max ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string to_gnuplot(const ReportTable& table) {
  std::ostringstream out;
  out << "# perturbation";
  for (const auto& col : table.columns) {
    out << ' ' << gnuplot_token(col.model.empty() ? col.task
                                                  : col.model + "/" + col.task);
  }
  out << '\n';
  for (std::size_t r = 0; r < table.perturbations.size(); ++r) {
    out << gnuplot_token(table.perturbations[r]);
    for (const auto& cell : table.cells[r]) {
      out << ' ' << (cell.score ? number(*cell.score) : "?");
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace robustkit::robust
