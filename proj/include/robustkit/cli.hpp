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

#ifndef ROBUSTKIT_CLI_HPP_
#define ROBUSTKIT_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace robustkit::cli {

inline constexpr std::string_view kVersion = "1.0.0";

// Runs one subcommand. `args` excludes the program name. Returns 0 on
// success; otherwise writes {"error", "code", "message"} as one JSON line
// to `err` and returns the error's code.
int run_cli(std::span<const std::string> args, std::ostream& out,
            std::ostream& err);

struct PipelineStep {
  std::string command;
  std::vector<std::string> args;
};

struct PipelineConfig {
  std::filesystem::path workdir;
  std::uint64_t seed = 0;
  std::vector<PipelineStep> steps;

  // {"workdir", "seed", "steps": [{"command", "args": [...]}]}. A relative
  // workdir is taken relative to `base`. Throws kInvalidPipelineConfig.
  static PipelineConfig from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base = {});
};

// Path-valued flags of a subcommand, split by direction.
struct StepIo {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

// Throws kInvalidPipelineConfig on unknown commands or flags missing a value.
StepIo step_io(const PipelineStep& step);

// Runs steps in order inside cfg.workdir. Relative paths in step
// arguments resolve against the workdir. Steps that take --seed and do not
// set it receive derive_seed(cfg.seed, step_index). Returns the manifest:
// [{step, command, inputs, outputs, sha256: {output: hex}}] with paths as
// given in the config. Throws kInvalidPipelineConfig before running
// anything if an input is neither on disk nor produced earlier, and
// kStepFailed at the first failing step.
nlohmann::json run_pipeline(const PipelineConfig& cfg, unsigned threads = 1);

std::string sha256_hex(std::span<const std::byte> bytes);
// Throws kIoError.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace robustkit::cli

#endif  // ROBUSTKIT_CLI_HPP_
