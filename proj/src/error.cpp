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

#include "robustkit/error.hpp"

namespace robustkit {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kLabelOutOfSpace: return "LabelOutOfSpace";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kInvalidTaskConfig: return "InvalidTaskConfig";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kRaggedRow: return "RaggedRow";
    case ErrorCode::kNonNumericCell: return "NonNumericCell";
    case ErrorCode::kEmptyDistractorList: return "EmptyDistractorList";
    case ErrorCode::kUnknownPerturbationKind: return "UnknownPerturbationKind";
    case ErrorCode::kInvalidPerturbationSpec: return "InvalidPerturbationSpec";
    case ErrorCode::kInvalidLexicon: return "InvalidLexicon";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kLayerCountMismatch: return "LayerCountMismatch";
    case ErrorCode::kRowCountMismatch: return "RowCountMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kSampleTooSmall: return "SampleTooSmall";
    case ErrorCode::kInvalidStirConfig: return "InvalidStirConfig";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonBinaryLabels: return "NonBinaryLabels";
    case ErrorCode::kConstantSeries: return "ConstantSeries";
    case ErrorCode::kInvalidTrainConfig: return "InvalidTrainConfig";
    case ErrorCode::kNonPositiveClean: return "NonPositiveClean";
    case ErrorCode::kMetricMismatch: return "MetricMismatch";
    case ErrorCode::kLayerSetMismatch: return "LayerSetMismatch";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kUnknownSubcommand: return "UnknownSubcommand";
    case ErrorCode::kStepFailed: return "StepFailed";
    case ErrorCode::kInvalidPipelineConfig: return "InvalidPipelineConfig";
    case ErrorCode::kUsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace robustkit
