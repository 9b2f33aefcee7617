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

#ifndef ROBUSTKIT_TENSORIO_HPP_
#define ROBUSTKIT_TENSORIO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "robustkit/matrix.hpp"

// RTNS v1 layer-stack format. All integers little-endian:
//
//   offset  size  field
//   0       4     magic "RTNS" (0x52 0x54 0x4E 0x53)
//   4       4     u32 version = 1
//   8       4     u32 dtype (0 = f32, 1 = f64)
//   12      4     u32 n_layers (>= 1)
//   16      8     u64 rows
//   24      8     u64 cols
//   32      ...   n_layers blocks of rows*cols values, row-major
//
// Metadata lives in a JSON sidecar at "<path>.meta.json".

namespace robustkit::tensorio {

inline constexpr std::uint32_t kRtnsVersion = 1;
inline constexpr std::size_t kRtnsHeaderSize = 32;

enum class DType : std::uint32_t { kF32 = 0, kF64 = 1 };
enum class Pooling { kMeanTokens, kClsToken, kLastToken, kDecoder };

std::string_view dtype_name(DType d);
std::string_view pooling_name(Pooling p);
Pooling parse_pooling(std::string_view name);
DType parse_dtype(std::string_view name);

struct RepresentationSet {
  Matrix matrix;  // n examples (dataset order) x d hidden width
  std::size_t layer_index = 0;

  std::size_t rows() const noexcept { return matrix.rows(); }
  std::size_t cols() const noexcept { return matrix.cols(); }

  friend bool operator==(const RepresentationSet&,
                         const RepresentationSet&) = default;
};

struct StackMeta {
  std::string model_name;
  std::string task;
  std::string split;
  Pooling pooling = Pooling::kMeanTokens;
  DType dtype = DType::kF64;

  friend bool operator==(const StackMeta&, const StackMeta&) = default;
};

struct LayerStack {
  std::vector<RepresentationSet> layers;
  StackMeta meta;

  std::size_t size() const noexcept { return layers.size(); }
  std::size_t rows() const noexcept {
    return layers.empty() ? 0 : layers.front().rows();
  }
  std::size_t cols() const noexcept {
    return layers.empty() ? 0 : layers.front().cols();
  }

  // Checks L >= 1, contiguous layer indices, shared shape and finiteness.
  // Throws kFormatError or kNonFiniteValue.
  void validate() const;

  friend bool operator==(const LayerStack&, const LayerStack&) = default;
};

// In-memory encoding of the binary part; the file functions wrap these.
std::vector<std::byte> encode_stack(const LayerStack& stack);
// Throws kBadMagic, kUnsupportedVersion, kTruncatedFile, kFormatError,
// kNonFiniteValue. Metadata other than dtype is left default.
LayerStack decode_stack(std::span<const std::byte> bytes);

nlohmann::ordered_json sidecar_json(const LayerStack& stack);
std::filesystem::path sidecar_path(const std::filesystem::path& path);

// Writes the binary and its sidecar. Throws kIoError / kFormatError.
void write_stack(const LayerStack& stack, const std::filesystem::path& path);

// Reads the binary and, when present, the sidecar (which must agree with
// the header on dtype and shape).
LayerStack read_stack(const std::filesystem::path& path);

// Small-test convenience: rectangular CSV of finite reals, layer 0.
// Throws kRaggedRow (1-based line) or kNonNumericCell.
RepresentationSet parse_csv_matrix(std::istream& in);
RepresentationSet read_csv_matrix(const std::filesystem::path& path);

}  // namespace robustkit::tensorio

#endif  // ROBUSTKIT_TENSORIO_HPP_
