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

#ifndef ROBUSTKIT_ERROR_HPP_
#define ROBUSTKIT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace robustkit {

// Every failure the toolkit reports. The numeric value is also the CLI
// process exit code.
enum class ErrorCode : int {
  // dataio
  kMalformedRecord = 10,
  kLabelOutOfSpace = 11,
  kDuplicateId = 12,
  kUnknownId = 13,
  kInvalidTaskConfig = 14,

  // tensorio
  kIoError = 20,
  kFormatError = 21,
  kBadMagic = 22,
  kUnsupportedVersion = 23,
  kTruncatedFile = 24,
  kNonFiniteValue = 25,
  kRaggedRow = 26,
  kNonNumericCell = 27,

  // perturb
  kEmptyDistractorList = 30,
  kUnknownPerturbationKind = 31,
  kInvalidPerturbationSpec = 32,
  kInvalidLexicon = 33,

  // simmetrics
  kTooFewRows = 40,
  kShapeMismatch = 41,
  kDegenerateInput = 42,
  kLayerCountMismatch = 43,
  kRowCountMismatch = 44,
  kDimensionMismatch = 45,
  kEmptyPool = 46,
  kSampleTooSmall = 47,
  kInvalidStirConfig = 48,

  // probe
  kSingleClass = 50,
  kNonFiniteLoss = 51,
  kEmptyInput = 52,
  kNonBinaryLabels = 53,
  kConstantSeries = 54,
  kInvalidTrainConfig = 55,

  // robust
  kNonPositiveClean = 60,
  kMetricMismatch = 61,
  kLayerSetMismatch = 62,
  kDuplicateKey = 63,

  // cli
  kUnknownSubcommand = 70,
  kStepFailed = 71,
  kInvalidPipelineConfig = 72,
  kUsageError = 73,
};

// Stable CamelCase name, e.g. "DimensionMismatch".
std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace robustkit

#endif  // ROBUSTKIT_ERROR_HPP_
