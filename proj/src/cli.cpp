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

#include "robustkit/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "robustkit/dataio.hpp"
#include "robustkit/error.hpp"
#include "robustkit/perturb.hpp"
#include "robustkit/probe.hpp"
#include "robustkit/robust.hpp"
#include "robustkit/simmetrics.hpp"
#include "robustkit/tensorio.hpp"
#include "robustkit/text.hpp"

namespace robustkit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kUsage =
    "usage: robustkit <command> [options]\n"
    "\n"
    "commands:\n"
    "  perturb       apply one text perturbation to a dataset\n"
    "  cka           layer-wise linear CKA between two layer stacks\n"
    "  stir          layer-wise STIR between two layer stacks\n"
    "  probe         train and evaluate logistic regression probes per layer\n"
    "  robustness    robustness score from clean and perturbed predictions\n"
    "  layer-impact  per-layer drops and the most affected layers\n"
    "  report        aggregate robustness scores into a table\n"
    "  pipeline      run a JSON-configured sequence of commands\n"
    "\n"
    "Run 'robustkit <command> --help' for the options of a command.\n";

void require(const std::string& value, std::string_view flag) {
  if (value.empty()) {
    throw Error(ErrorCode::kUsageError, std::string(flag) + " is required");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

void emit_json(const json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormatError,
                path.string() + ": invalid JSON: " + e.what());
  }
}

dataio::DatasetFormat format_for(const fs::path& path) {
  return path.extension() == ".tsv" ? dataio::DatasetFormat::kTsv
                                    : dataio::DatasetFormat::kJsonl;
}

std::vector<std::string> labels_for(const std::vector<dataio::IdLabel>& rows,
                                    std::size_t expected,
                                    const std::string& path) {
  if (rows.size() != expected) {
    throw Error(ErrorCode::kRowCountMismatch,
                path + " has " + std::to_string(rows.size()) +
                    " labels for " + std::to_string(expected) +
                    " representation rows");
  }
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.label);
  return out;
}

struct PerturbCmd {
  static constexpr const char* kSummary = "Apply one text perturbation to a dataset";
  std::string input, output, task, kind, fields = "both";
  std::string pos_tags, distractors, gender_lexicon;
  double char_prob = 0.10;
  double add_ratio = 0.10;
  std::uint32_t swap_pairs = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void add(CLI::App& app) {
    app.add_option("--input", input, "dataset (.jsonl or .tsv)");
    app.add_option("--output", output, "perturbed dataset path");
    app.add_option("--task", task, "task config JSON");
    app.add_option("--kind", kind, "drop_noun|drop_verb|drop_first|drop_last|"
                                   "swap_text|change_char|add_text|bias");
    app.add_option("--char-prob", char_prob, "change_char probability")
        ->capture_default_str();
    app.add_option("--add-ratio", add_ratio, "add_text insertion ratio")
        ->capture_default_str();
    app.add_option("--swap-pairs", swap_pairs, "swap_text pair count")
        ->capture_default_str();
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--fields", fields, "a|b|both")->capture_default_str();
    app.add_option("--pos-tags", pos_tags, "pre-tagged CoNLL file");
    app.add_option("--distractors", distractors, "add_text word list");
    app.add_option("--gender-lexicon", gender_lexicon, "TSV of word pairs");
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  void run(std::ostream& out) {
    require(kind, "--kind");
    perturb::PerturbationSpec spec;
    spec.kind = perturb::parse_kind(kind);
    spec.char_prob = char_prob;
    spec.add_ratio = add_ratio;
    spec.swap_pairs = swap_pairs;
    spec.seed = seed;
    spec.validate();
    const auto which = perturb::parse_fields(fields);
    require(input, "--input");
    require(output, "--output");
    require(task, "--task");

    const auto cfg = dataio::load_task_config(task);
    const auto ds = dataio::load_dataset(input, cfg, format_for(input));
    const auto gender = gender_lexicon.empty()
                            ? perturb::GenderLexicon::builtin()
                            : perturb::GenderLexicon::load_tsv(gender_lexicon);
    const auto words = distractors.empty()
                           ? std::vector<std::string>(perturb::default_distractors().begin(),
                                                      perturb::default_distractors().end())
                           : perturb::load_word_list(distractors);
    std::optional<perturb::PretaggedCorpus> tagged;
    if (!pos_tags.empty()) tagged = perturb::PretaggedCorpus::load(pos_tags);

    const perturb::Perturber perturber(spec, gender, words, perturb::PosLexicon::builtin(),
                                       tagged ? &*tagged : nullptr);
    const auto result = perturb::perturb_dataset(ds, perturber, which, threads);
    if (fs::path(output).has_parent_path()) {
      fs::create_directories(fs::path(output).parent_path());
    }
    dataio::save_dataset(result, output, format_for(output));
    out << json{{"kind", kind}, {"records", result.size()}, {"output", output}}.dump()
        << "\n";
  }
};

struct CkaCmd {
  static constexpr const char* kSummary = "Layer-wise linear CKA";
  std::string x, y, out_path;
  unsigned threads = 1;

  void add(CLI::App& app) {
    app.add_option("--x", x, "first layer stack (.rtns)");
    app.add_option("--y", y, "second layer stack (.rtns)");
    app.add_option("--out", out_path, "report path (stdout if omitted)");
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  void run(std::ostream& out) {
    require(x, "--x");
    require(y, "--y");
    const auto a = tensorio::read_stack(x);
    const auto b = tensorio::read_stack(y);
    emit_json(simmetrics::to_json(simmetrics::layerwise_cka(a, b, threads)),
              out_path, out);
  }
};

struct StirCmd {
  static constexpr const char* kSummary = "Layer-wise STIR";
  std::string m1, m2, out_path, direction = "finetuned_given_pretrained";
  std::size_t k = 20;
  double fraction = 0.5;
  std::optional<std::size_t> max_samples;
  std::optional<std::size_t> conditioning_layer;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void add(CLI::App& app) {
    app.add_option("--m1", m1, "pre-trained layer stack (.rtns)");
    app.add_option("--m2", m2, "finetuned layer stack (.rtns)");
    app.add_option("--k", k, "number of subsamples")->capture_default_str();
    app.add_option("--fraction", fraction, "subsample fraction")
        ->capture_default_str();
    app.add_option("--max-samples", max_samples, "subsample size cap");
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--direction", direction,
                   "finetuned_given_pretrained|pretrained_given_finetuned")
        ->capture_default_str();
    app.add_option("--conditioning-layer", conditioning_layer,
                   "experimental: conditioning layer (default last)");
    app.add_option("--out", out_path, "report path (stdout if omitted)");
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  void run(std::ostream& out) {
    require(m1, "--m1");
    require(m2, "--m2");
    simmetrics::StirConfig cfg;
    cfg.k = k;
    cfg.sample_fraction = fraction;
    cfg.max_samples = max_samples;
    cfg.seed = seed;
    cfg.direction = simmetrics::parse_direction(direction);
    cfg.conditioning_layer = conditioning_layer;
    cfg.validate();
    const auto a = tensorio::read_stack(m1);
    const auto b = tensorio::read_stack(m2);
    emit_json(simmetrics::to_json(simmetrics::stir(a, b, cfg, threads)), out_path,
              out);
  }
};

struct ProbeCmd {
  static constexpr const char* kSummary = "Layer-wise logistic regression probes";
  std::string train_reps, train_labels, eval_reps, eval_labels;
  std::string layer = "all", task, metric, out_path, models_out, predictions_out;
  std::optional<std::size_t> predictions_layer;
  probe::TrainConfig cfg;
  unsigned threads = 1;

  void add(CLI::App& app) {
    app.add_option("--train-reps", train_reps, "training layer stack (.rtns)");
    app.add_option("--train-labels", train_labels, "training labels JSONL {id, label}");
    app.add_option("--eval-reps", eval_reps, "evaluation layer stack (.rtns)");
    app.add_option("--eval-labels", eval_labels, "evaluation labels JSONL {id, label}");
    app.add_option("--layer", layer, "'all', or comma-separated layer positions")
        ->capture_default_str();
    app.add_option("--lr", cfg.learning_rate, "learning rate")->capture_default_str();
    app.add_option("--epochs", cfg.epochs, "gradient steps")->capture_default_str();
    app.add_option("--l2", cfg.l2, "L2 penalty")->capture_default_str();
    app.add_option("--tolerance", cfg.tolerance, "early stop on loss change")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    app.add_option("--task", task, "task config JSON (class order, metric)");
    app.add_option("--metric", metric, "accuracy|matthews_cc");
    app.add_option("--out", out_path, "report path (stdout if omitted)");
    app.add_option("--models-out", models_out, "trained models JSON");
    app.add_option("--predictions-out", predictions_out,
                   "eval predictions JSONL {id, label, prediction}");
    app.add_option("--predictions-layer", predictions_layer,
                   "layer used for --predictions-out (default last selected)");
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  std::vector<std::size_t> selected_layers(std::size_t count) const {
    std::vector<std::size_t> out;
    if (layer == "all") {
      for (std::size_t l = 0; l < count; ++l) out.push_back(l);
      return out;
    }
    std::stringstream ss(layer);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const auto v = std::stoul(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        out.push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kUsageError, "bad --layer value '" + layer + "'");
      }
    }
    if (out.empty()) throw Error(ErrorCode::kUsageError, "--layer is empty");
    return out;
  }

  void run(std::ostream& out) {
    require(train_reps, "--train-reps");
    require(train_labels, "--train-labels");
    require(eval_reps, "--eval-reps");
    require(eval_labels, "--eval-labels");
    cfg.validate();

    std::vector<std::string> classes;
    auto kind = dataio::MetricKind::kAccuracy;
    if (!task.empty()) {
      const auto t = dataio::load_task_config(task);
      if (t.is_regression()) {
        throw Error(ErrorCode::kMetricMismatch,
                    "probes are classification-only; task '" + t.name +
                        "' is regression");
      }
      classes = t.classes();
      kind = t.primary_metric;
    }
    if (!metric.empty()) kind = dataio::parse_metric(metric);

    const auto train = tensorio::read_stack(train_reps);
    const auto eval = tensorio::read_stack(eval_reps);
    const auto train_rows = dataio::load_id_labels(train_labels);
    const auto eval_rows = dataio::load_id_labels(eval_labels);
    const auto ytrain = labels_for(train_rows, train.rows(), train_labels);
    const auto yeval = labels_for(eval_rows, eval.rows(), eval_labels);
    const auto layers = selected_layers(train.size());

    const auto outcomes = probe::layerwise_probe(train, ytrain, eval, yeval, cfg,
                                                 kind, classes, layers, threads);

    json report;
    report["per_layer"] = json::array();
    for (const auto& o : outcomes) {
      report["per_layer"].push_back(
          {{"layer_index", o.layer_index},
           {"value", o.outcome.value},
           {"metric_name", std::string(dataio::metric_name(o.outcome.metric))},
           {"n", o.outcome.n}});
    }
    report["config"] = {{"learning_rate", cfg.learning_rate},
                        {"epochs", cfg.epochs},
                        {"l2", cfg.l2},
                        {"tolerance", cfg.tolerance},
                        {"seed", cfg.seed},
                        {"metric", std::string(dataio::metric_name(kind))}};
    report["n"] = eval.rows();
    report["d"] = eval.cols();
    emit_json(report, out_path, out);

    if (!models_out.empty()) {
      json models = json::array();
      for (const auto& o : outcomes) models.push_back(probe::to_json(o.model));
      write_text(models_out, models.dump(2) + "\n");
    }
    if (!predictions_out.empty()) {
      const std::size_t which = predictions_layer.value_or(layers.back());
      const auto it = std::find(layers.begin(), layers.end(), which);
      if (it == layers.end()) {
        throw Error(ErrorCode::kUsageError,
                    "--predictions-layer " + std::to_string(which) +
                        " is not among the probed layers");
      }
      const auto& model = outcomes[static_cast<std::size_t>(it - layers.begin())].model;
      const auto predicted = probe::predict(model, eval.layers[which]);
      dataio::PredictionFile preds;
      for (std::size_t i = 0; i < predicted.size(); ++i) {
        preds.entries.push_back({eval_rows[i].id, eval_rows[i].label, predicted[i]});
      }
      std::ostringstream buffer;
      dataio::write_predictions(preds, buffer);
      write_text(predictions_out, buffer.str());
    }
  }
};

struct RobustnessCmd {
  static constexpr const char* kSummary = "Robustness score of a perturbed run";
  std::string clean, perturbed, task, perturbation, model, out_path;

  void add(CLI::App& app) {
    app.add_option("--clean", clean, "clean predictions JSONL");
    app.add_option("--perturbed", perturbed, "perturbed predictions JSONL");
    app.add_option("--task", task, "task config JSON");
    app.add_option("--perturbation", perturbation, "perturbation name for reports");
    app.add_option("--model", model, "model name for reports");
    app.add_option("--out", out_path, "score path (stdout if omitted)");
  }

  void run(std::ostream& out) {
    require(clean, "--clean");
    require(perturbed, "--perturbed");
    require(task, "--task");
    const auto cfg = dataio::load_task_config(task);
    const auto c = dataio::load_predictions(clean, cfg);
    const auto p = dataio::load_predictions(perturbed, cfg);
    emit_json(robust::to_json(robust::score_run(c, p, cfg, perturbation, model)),
              out_path, out);
  }
};

struct LayerImpactCmd {
  static constexpr const char* kSummary = "Per-layer drops and most affected layers";
  std::string clean, perturbed, out_path;
  std::size_t top = 3;

  void add(CLI::App& app) {
    app.add_option("--clean", clean, "clean per-layer JSON");
    app.add_option("--perturbed", perturbed, "perturbed per-layer JSON");
    app.add_option("--top", top, "number of layers to flag")->capture_default_str();
    app.add_option("--out", out_path, "report path (stdout if omitted)");
  }

  void run(std::ostream& out) {
    require(clean, "--clean");
    require(perturbed, "--perturbed");
    const auto c = robust::parse_layer_values(read_json(clean));
    const auto p = robust::parse_layer_values(read_json(perturbed));
    emit_json(robust::to_json(robust::layer_impact(c, p, top)), out_path, out);
  }
};

struct ReportCmd {
  static constexpr const char* kSummary = "Aggregate robustness scores";
  std::vector<std::string> scores;
  std::string out_path, csv, gnuplot;

  void add(CLI::App& app) {
    app.add_option("--scores", scores, "score JSON files (object or array)");
    app.add_option("--out", out_path, "table JSON (stdout if omitted)");
    app.add_option("--csv", csv, "long-format CSV");
    app.add_option("--gnuplot", gnuplot, "gnuplot data");
  }

  void run(std::ostream& out) {
    if (scores.empty()) throw Error(ErrorCode::kUsageError, "--scores is required");
    std::vector<robust::RobustnessScore> all;
    for (const auto& path : scores) {
      const auto j = read_json(path);
      if (j.is_array()) {
        for (const auto& s : j) all.push_back(robust::score_from_json(s));
      } else {
        all.push_back(robust::score_from_json(j));
      }
    }
    const auto table = robust::aggregate_report(all);
    emit_json(robust::to_json(table), out_path, out);
    if (!csv.empty()) write_text(csv, robust::to_csv(table));
    if (!gnuplot.empty()) write_text(gnuplot, robust::to_gnuplot(table));
  }
};

struct PipelineCmd {
  static constexpr const char* kSummary = "Run a JSON-configured pipeline";
  std::string config, workdir, manifest;
  unsigned threads = 1;

  void add(CLI::App& app) {
    app.add_option("--config", config, "pipeline config JSON");
    app.add_option("--workdir", workdir, "override the config's workdir");
    app.add_option("--manifest", manifest,
                   "manifest path (default <workdir>/manifest.json)");
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  void run(std::ostream& out) {
    require(config, "--config");
    auto cfg = PipelineConfig::from_json(read_json(config),
                                         fs::path(config).parent_path());
    if (!workdir.empty()) cfg.workdir = workdir;
    const auto result = run_pipeline(cfg, threads);
    const fs::path target =
        manifest.empty() ? cfg.workdir / "manifest.json" : fs::path(manifest);
    write_text(target, result.dump(2) + "\n");
    out << json{{"steps", cfg.steps.size()}, {"manifest", target.string()}}.dump()
        << "\n";
  }
};

template <class Cmd>
int dispatch(std::string_view name, std::span<const std::string> args,
             std::ostream& out) {
  Cmd cmd;
  CLI::App app{Cmd::kSummary, "robustkit " + std::string(name)};
  cmd.add(app);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::kUsageError, e.what());
  }
  cmd.run(out);
  return 0;
}

void report_error(std::ostream& err, ErrorCode code, const std::string& message) {
  err << json{{"error", std::string(error_name(code))},
              {"code", static_cast<int>(code)},
              {"message", message}}
             .dump()
      << "\n";
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out,
            std::ostream& err) {
  if (args.empty()) {
    err << kUsage;
    return static_cast<int>(ErrorCode::kUsageError);
  }
  const std::string& command = args.front();
  if (command == "--version") {
    out << "robustkit " << kVersion << "\n";
    return 0;
  }
  if (command == "--help" || command == "-h" || command == "help") {
    out << kUsage;
    return 0;
  }
  const auto rest = args.subspan(1);
  try {
    if (command == "perturb") return dispatch<PerturbCmd>(command, rest, out);
    if (command == "cka") return dispatch<CkaCmd>(command, rest, out);
    if (command == "stir") return dispatch<StirCmd>(command, rest, out);
    if (command == "probe") return dispatch<ProbeCmd>(command, rest, out);
    if (command == "robustness") return dispatch<RobustnessCmd>(command, rest, out);
    if (command == "layer-impact") {
      return dispatch<LayerImpactCmd>(command, rest, out);
    }
    if (command == "report") return dispatch<ReportCmd>(command, rest, out);
    if (command == "pipeline") return dispatch<PipelineCmd>(command, rest, out);
    throw Error(ErrorCode::kUnknownSubcommand,
                "unknown command '" + command + "'");
  } catch (const Error& e) {
    report_error(err, e.code(), e.what());
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error& e) {
    report_error(err, ErrorCode::kIoError, e.what());
    return static_cast<int>(ErrorCode::kIoError);
  } catch (const json::exception& e) {
    report_error(err, ErrorCode::kFormatError, e.what());
    return static_cast<int>(ErrorCode::kFormatError);
  } catch (const std::exception& e) {
    report_error(err, ErrorCode::kIoError, e.what());
    return static_cast<int>(ErrorCode::kIoError);
  }
}

}  // namespace robustkit::cli
