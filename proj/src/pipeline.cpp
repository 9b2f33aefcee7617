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

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "robustkit/cli.hpp"
#include "robustkit/error.hpp"
#include "robustkit/random.hpp"

namespace robustkit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct FlagRoles {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  bool seeded = false;
};

const std::map<std::string, FlagRoles>& flag_table() {
  static const std::map<std::string, FlagRoles> table = {
      {"perturb",
       {{"--input", "--task", "--pos-tags", "--distractors", "--gender-lexicon"},
        {"--output"},
        true}},
      {"cka", {{"--x", "--y"}, {"--out"}, false}},
      {"stir", {{"--m1", "--m2"}, {"--out"}, true}},
      {"probe",
       {{"--train-reps", "--train-labels", "--eval-reps", "--eval-labels",
         "--task"},
        {"--out", "--models-out", "--predictions-out"},
        true}},
      {"robustness", {{"--clean", "--perturbed", "--task"}, {"--out"}, false}},
      {"layer-impact", {{"--clean", "--perturbed"}, {"--out"}, false}},
      {"report", {{"--scores"}, {"--out", "--csv", "--gnuplot"}, false}},
  };
  return table;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Splits "--flag=value" so every flag and value is its own element.
std::vector<std::string> normalize_args(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (a.starts_with("--") && eq != std::string::npos) {
      out.push_back(a.substr(0, eq));
      out.push_back(a.substr(eq + 1));
    } else {
      out.push_back(a);
    }
  }
  return out;
}

// Calls fn(index_of_value, is_output) for every path-valued argument.
template <class Fn>
void for_each_path(const std::string& command,
                   const std::vector<std::string>& args, Fn fn) {
  const auto it = flag_table().find(command);
  if (it == flag_table().end()) {
    throw Error(ErrorCode::kInvalidPipelineConfig,
                "unknown pipeline command '" + command + "'");
  }
  const auto& roles = it->second;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const bool in = contains(roles.inputs, args[i]);
    const bool out = contains(roles.outputs, args[i]);
    if (!in && !out) continue;
    const std::string flag = args[i];
    std::size_t j = i + 1;
    while (j < args.size() && !args[j].starts_with("--")) {
      fn(j, out);
      ++j;
      if (flag != "--scores") break;
    }
    if (j == i + 1) {
      throw Error(ErrorCode::kInvalidPipelineConfig,
                  command + ": " + flag + " has no value");
    }
    i = j - 1;
  }
}

fs::path resolve(const fs::path& workdir, const std::string& p) {
  const fs::path path(p);
  return (path.is_absolute() ? path : workdir / path).lexically_normal();
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base) {
  try {
    PipelineConfig cfg;
    const fs::path workdir(j.at("workdir").get<std::string>());
    cfg.workdir = (workdir.is_absolute() ? workdir : base / workdir).lexically_normal();
    cfg.seed = j.value("seed", std::uint64_t{0});
    for (const auto& step : j.at("steps")) {
      PipelineStep s;
      s.command = step.at("command").get<std::string>();
      s.args = step.value("args", std::vector<std::string>{});
      cfg.steps.push_back(std::move(s));
    }
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidPipelineConfig,
                std::string("pipeline config: ") + e.what());
  }
}

StepIo step_io(const PipelineStep& step) {
  const auto args = normalize_args(step.args);
  StepIo io;
  for_each_path(step.command, args, [&](std::size_t i, bool output) {
    (output ? io.outputs : io.inputs).push_back(args[i]);
  });
  return io;
}

json run_pipeline(const PipelineConfig& cfg, unsigned threads) {
  std::set<fs::path> produced;
  for (std::size_t s = 0; s < cfg.steps.size(); ++s) {
    const auto io = step_io(cfg.steps[s]);
    for (const auto& in : io.inputs) {
      const auto path = resolve(cfg.workdir, in);
      if (!produced.count(path) && !fs::exists(path)) {
        throw Error(ErrorCode::kInvalidPipelineConfig,
                    "step " + std::to_string(s) + " (" + cfg.steps[s].command +
                        "): input '" + in +
                        "' does not exist and no earlier step produces it");
      }
    }
    for (const auto& out : io.outputs) produced.insert(resolve(cfg.workdir, out));
  }

  fs::create_directories(cfg.workdir);
  json manifest = json::array();
  for (std::size_t s = 0; s < cfg.steps.size(); ++s) {
    const auto& step = cfg.steps[s];
    auto args = normalize_args(step.args);
    const auto io = step_io(step);
    for_each_path(step.command, args, [&](std::size_t i, bool) {
      args[i] = resolve(cfg.workdir, args[i]).string();
    });
    if (flag_table().at(step.command).seeded && !contains(args, "--seed")) {
      args.push_back("--seed");
      args.push_back(std::to_string(derive_seed(cfg.seed, std::uint64_t{s})));
    }
    if (threads > 1 && step.command != "robustness" &&
        step.command != "layer-impact" && step.command != "report" &&
        !contains(args, "--threads")) {
      args.push_back("--threads");
      args.push_back(std::to_string(threads));
    }

    std::vector<std::string> full{step.command};
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = run_cli(full, out, err);
    if (code != 0) {
      std::string message = err.str();
      try {
        message = json::parse(message).at("message").get<std::string>();
      } catch (const json::exception&) {
      }
      throw Error(ErrorCode::kStepFailed,
                  "step " + std::to_string(s) + " (" + step.command +
                      ") failed with exit code " + std::to_string(code) +
                      ": " + message);
    }

    json entry;
    entry["step"] = s;
    entry["command"] = step.command;
    entry["inputs"] = io.inputs;
    entry["outputs"] = io.outputs;
    entry["sha256"] = json::object();
    for (const auto& o : io.outputs) {
      entry["sha256"][o] = sha256_file(resolve(cfg.workdir, o));
    }
    manifest.push_back(std::move(entry));
  }
  return manifest;
}

std::string sha256_hex(std::span<const std::byte> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length,
                 EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return sha256_hex(std::as_bytes(std::span(data.data(), data.size())));
}

}  // namespace robustkit::cli
