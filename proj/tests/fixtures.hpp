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

#ifndef ROBUSTKIT_TESTS_FIXTURES_HPP_
#define ROBUSTKIT_TESTS_FIXTURES_HPP_

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "robustkit/random.hpp"
#include "robustkit/tensorio.hpp"
#include "test_util.hpp"

namespace robustkit::testing {

// A toy binary sentiment task with synthetic 4-layer representation stacks.
//   task.json        task config ("toy", single sentence, classes 0/1)
//   data.jsonl       labeled records
//   train.rtns       training representations
//   eval_clean.rtns  held-out representations
//   eval_noisy.rtns  eval_clean plus noise that grows with depth
//   preds_clean.jsonl / preds_pert.jsonl  prediction files for robustness
struct ToyWorld {
  std::size_t n = 200;
  std::size_t layers = 4;
  std::size_t width = 8;
};

inline std::string toy_sentence(Rng& rng, bool positive) {
  static const std::array<const char*, 6> kSubjects{
      "the film", "this movie", "the plot", "the cast", "her performance",
      "the soundtrack"};
  static const std::array<const char*, 5> kGood{"wonderful", "moving", "sharp",
                                                "delightful", "clever"};
  static const std::array<const char*, 5> kBad{"dull", "clumsy", "tedious",
                                               "bland", "forgettable"};
  const auto& adj = positive ? kGood : kBad;
  std::string s = kSubjects[rng.uniform_index(kSubjects.size())];
  s += rng.uniform_index(2) ? " is " : " seems ";
  s += adj[rng.uniform_index(adj.size())];
  s += rng.uniform_index(2) ? " and " : " yet ";
  s += adj[rng.uniform_index(adj.size())];
  s += " .";
  return s;
}

inline tensorio::LayerStack toy_stack(Rng& rng, const ToyWorld& w,
                                      const std::vector<int>& labels,
                                      const std::string& split) {
  tensorio::LayerStack stack;
  stack.meta.model_name = "toy";
  stack.meta.task = "toy";
  stack.meta.split = split;
  for (std::size_t l = 0; l < w.layers; ++l) {
    Matrix m = random_matrix(rng, w.n, w.width);
    const double signal = 0.5 + 0.5 * static_cast<double>(l);
    for (std::size_t i = 0; i < w.n; ++i) {
      m(i, 0) += labels[i] == 1 ? signal : -signal;
      m(i, 1) += labels[i] == 1 ? 0.5 * signal : -0.5 * signal;
    }
    stack.layers.push_back({std::move(m), l});
  }
  return stack;
}

inline void write_toy_world(const std::filesystem::path& dir, std::uint64_t seed = 5,
                            const ToyWorld& w = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Rng rng(seed);
  write_file(dir / "task.json", R"({"name": "toy", "arity": "single",
  "label_space": {"type": "classification", "classes": ["0", "1"]},
  "primary_metric": "accuracy"})");

  std::vector<int> labels(w.n);
  std::string data, clean, pert;
  for (std::size_t i = 0; i < w.n; ++i) {
    labels[i] = static_cast<int>(i % 2);
    char id[16];
    std::snprintf(id, sizeof id, "toy-%04zu", i);
    const std::string gold = std::to_string(labels[i]);
    data += nlohmann::json{{"id", id}, {"text_a", toy_sentence(rng, labels[i] == 1)},
                           {"label", gold}}
                .dump() +
            "\n";
    const std::string flipped = labels[i] == 1 ? "0" : "1";
    clean += nlohmann::json{{"id", id}, {"label", gold},
                            {"prediction", i % 10 == 0 ? flipped : gold}}
                 .dump() +
             "\n";
    pert += nlohmann::json{{"id", id}, {"label", gold},
                           {"prediction", i % 4 == 0 ? flipped : gold}}
                .dump() +
            "\n";
  }
  write_file(dir / "data.jsonl", data);
  write_file(dir / "preds_clean.jsonl", clean);
  write_file(dir / "preds_pert.jsonl", pert);

  tensorio::write_stack(toy_stack(rng, w, labels, "train"), dir / "train.rtns");
  auto eval = toy_stack(rng, w, labels, "validation");
  tensorio::write_stack(eval, dir / "eval_clean.rtns");
  for (std::size_t l = 0; l < eval.layers.size(); ++l) {
    const double scale = 0.5 * static_cast<double>(1u << l);
    for (double& v : eval.layers[l].matrix.flat()) v += scale * rng.normal();
  }
  tensorio::write_stack(eval, dir / "eval_noisy.rtns");
}

// perturb -> probe (clean) -> probe (noisy) -> robustness -> layer-impact -> report
inline nlohmann::json toy_pipeline_config(std::uint64_t seed = 11) {
  using nlohmann::json;
  json steps = json::array();
  auto step = [&](const char* command, std::vector<std::string> args) {
    steps.push_back({{"command", command}, {"args", args}});
  };
  step("perturb", {"--input", "data.jsonl", "--output", "out/data_pert.jsonl",
                   "--task", "task.json", "--kind", "change_char"});
  step("probe", {"--train-reps", "train.rtns", "--train-labels", "data.jsonl",
                 "--eval-reps", "eval_clean.rtns", "--eval-labels", "data.jsonl",
                 "--task", "task.json", "--out", "out/probe_clean.json",
                 "--predictions-out", "out/preds_clean.jsonl"});
  step("probe", {"--train-reps", "train.rtns", "--train-labels", "data.jsonl",
                 "--eval-reps", "eval_noisy.rtns", "--eval-labels",
                 "out/data_pert.jsonl", "--task", "task.json", "--out",
                 "out/probe_noisy.json", "--predictions-out", "out/preds_noisy.jsonl"});
  step("robustness", {"--clean", "out/preds_clean.jsonl", "--perturbed",
                      "out/preds_noisy.jsonl", "--task", "task.json",
                      "--perturbation", "change_char", "--model", "toy", "--out",
                      "out/score.json"});
  step("layer-impact", {"--clean", "out/probe_clean.json", "--perturbed",
                        "out/probe_noisy.json", "--out", "out/impact.json"});
  step("report", {"--scores", "out/score.json", "--out", "out/report.json", "--csv",
                  "out/report.csv", "--gnuplot", "out/report.dat"});
  return json{{"workdir", "."}, {"seed", seed}, {"steps", steps}};
}

}  // namespace robustkit::testing

#endif  // ROBUSTKIT_TESTS_FIXTURES_HPP_
