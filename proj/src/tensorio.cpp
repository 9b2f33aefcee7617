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

#include "robustkit/tensorio.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "robustkit/error.hpp"

namespace robustkit::tensorio {

using nlohmann::json;

namespace {

constexpr std::byte kMagic[4] = {std::byte{0x52}, std::byte{0x54},
                                 std::byte{0x4E}, std::byte{0x53}};

template <typename UInt>
void put_le(std::vector<std::byte>& out, UInt v) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
  }
}

template <typename UInt>
UInt get_le(const std::byte* p) {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    v |= static_cast<UInt>(std::to_integer<unsigned>(p[i])) << (8 * i);
  }
  return v;
}

std::size_t value_size(DType d) { return d == DType::kF32 ? 4 : 8; }

[[noreturn]] void format_error(const std::string& msg) {
  throw Error(ErrorCode::kFormatError, msg);
}

std::string where(std::size_t layer, std::size_t row, std::size_t col) {
  return "layer " + std::to_string(layer) + ", row " + std::to_string(row) +
         ", col " + std::to_string(col);
}

}  // namespace

std::string_view dtype_name(DType d) {
  return d == DType::kF32 ? "f32" : "f64";
}

std::string_view pooling_name(Pooling p) {
  switch (p) {
    case Pooling::kMeanTokens:
      return "mean_tokens";
    case Pooling::kClsToken:
      return "cls_token";
    case Pooling::kLastToken:
      return "last_token";
    case Pooling::kDecoder:
      return "decoder";
  }
  return "unknown";
}

Pooling parse_pooling(std::string_view name) {
  if (name == "mean_tokens") return Pooling::kMeanTokens;
  if (name == "cls_token") return Pooling::kClsToken;
  if (name == "last_token") return Pooling::kLastToken;
  if (name == "decoder") return Pooling::kDecoder;
  format_error("unknown pooling '" + std::string(name) + "'");
}

DType parse_dtype(std::string_view name) {
  if (name == "f32") return DType::kF32;
  if (name == "f64") return DType::kF64;
  format_error("unknown dtype '" + std::string(name) + "'");
}

void LayerStack::validate() const {
  if (layers.empty()) format_error("layer stack needs at least one layer");
  const std::size_t n = rows();
  const std::size_t d = cols();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.layer_index != l) {
      format_error("layer indices must be contiguous from 0; position " +
                   std::to_string(l) + " has index " +
                   std::to_string(layer.layer_index));
    }
    if (layer.rows() != n || layer.cols() != d) {
      format_error("layer " + std::to_string(l) + " shape differs from layer 0");
    }
    for (std::size_t r = 0; r < n; ++r) {
      const auto row = layer.matrix.row(r);
      for (std::size_t c = 0; c < d; ++c) {
        if (!std::isfinite(row[c])) {
          throw Error(ErrorCode::kNonFiniteValue, where(l, r, c));
        }
      }
    }
  }
}

std::vector<std::byte> encode_stack(const LayerStack& stack) {
  stack.validate();
  const std::size_t n = stack.rows();
  const std::size_t d = stack.cols();
  const DType dtype = stack.meta.dtype;

  std::vector<std::byte> out;
  out.reserve(kRtnsHeaderSize + stack.size() * n * d * value_size(dtype));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kRtnsVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dtype));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(stack.size()));
  put_le<std::uint64_t>(out, n);
  put_le<std::uint64_t>(out, d);

  for (const auto& layer : stack.layers) {
    for (double v : layer.matrix.flat()) {
      if (dtype == DType::kF32) {
        const auto f = static_cast<float>(v);
        if (!std::isfinite(f)) {
          throw Error(ErrorCode::kNonFiniteValue,
                      "value " + std::to_string(v) + " overflows f32");
        }
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
      } else {
        put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
      }
    }
  }
  return out;
}

LayerStack decode_stack(std::span<const std::byte> bytes) {
  const std::size_t head = std::min<std::size_t>(bytes.size(), 4);
  if (!std::equal(bytes.begin(), bytes.begin() + head, std::begin(kMagic))) {
    throw Error(ErrorCode::kBadMagic, "missing RTNS magic");
  }
  if (bytes.size() < 4) {
    throw Error(ErrorCode::kTruncatedFile, "file ends inside the magic");
  }
  if (bytes.size() < kRtnsHeaderSize) {
    throw Error(ErrorCode::kTruncatedFile, "header shorter than 32 bytes");
  }
  const std::byte* p = bytes.data();
  const auto version = get_le<std::uint32_t>(p + 4);
  if (version != kRtnsVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "RTNS version " + std::to_string(version));
  }
  const auto dtype_raw = get_le<std::uint32_t>(p + 8);
  if (dtype_raw > 1) format_error("unknown dtype code " + std::to_string(dtype_raw));
  const auto dtype = static_cast<DType>(dtype_raw);
  const auto n_layers = get_le<std::uint32_t>(p + 12);
  const auto n = get_le<std::uint64_t>(p + 16);
  const auto d = get_le<std::uint64_t>(p + 24);
  if (n_layers == 0) format_error("n_layers must be >= 1");

  const std::size_t vsize = value_size(dtype);
  const auto max = std::numeric_limits<std::uint64_t>::max();
  if (d != 0 && n > max / d) format_error("rows * cols overflows");
  const std::uint64_t per_layer = n * d;
  if (per_layer != 0 && n_layers > max / per_layer / vsize) {
    format_error("payload size overflows");
  }
  const std::uint64_t payload = per_layer * n_layers * vsize;
  const std::uint64_t available = bytes.size() - kRtnsHeaderSize;
  if (available < payload) {
    throw Error(ErrorCode::kTruncatedFile,
                "expected " + std::to_string(payload) + " payload bytes, found " +
                    std::to_string(available));
  }
  if (available > payload) {
    format_error(std::to_string(available - payload) + " trailing bytes");
  }

  LayerStack stack;
  stack.meta.dtype = dtype;
  stack.layers.reserve(n_layers);
  const std::byte* cursor = p + kRtnsHeaderSize;
  for (std::size_t l = 0; l < n_layers; ++l) {
    std::vector<double> values(per_layer);
    for (std::size_t i = 0; i < per_layer; ++i, cursor += vsize) {
      const double v =
          dtype == DType::kF32
              ? static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(cursor)))
              : std::bit_cast<double>(get_le<std::uint64_t>(cursor));
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteValue, where(l, i / d, i % d));
      }
      values[i] = v;
    }
    stack.layers.push_back({Matrix(n, d, std::move(values)), l});
  }
  return stack;
}

nlohmann::ordered_json sidecar_json(const LayerStack& stack) {
  nlohmann::ordered_json j;
  j["model_name"] = stack.meta.model_name;
  j["task"] = stack.meta.task;
  j["split"] = stack.meta.split;
  j["pooling"] = pooling_name(stack.meta.pooling);
  j["dtype"] = dtype_name(stack.meta.dtype);
  j["n_layers"] = stack.size();
  j["rows"] = stack.rows();
  j["cols"] = stack.cols();
  return j;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".meta.json";
  return p;
}

void write_stack(const LayerStack& stack, const std::filesystem::path& path) {
  const auto bytes = encode_stack(stack);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
  }
  const auto side = sidecar_json(stack);
  std::ofstream meta(sidecar_path(path), std::ios::binary | std::ios::trunc);
  if (!meta) {
    throw Error(ErrorCode::kIoError,
                "cannot write " + sidecar_path(path).string());
  }
  meta << side.dump(2) << '\n';
}

LayerStack read_stack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  LayerStack stack = decode_stack(
      std::as_bytes(std::span<const char>(raw.data(), raw.size())));

  const auto side_path = sidecar_path(path);
  if (!std::filesystem::exists(side_path)) return stack;

  std::ifstream side_in(side_path, std::ios::binary);
  json side;
  try {
    side = json::parse(side_in);
    stack.meta.model_name = side.value("model_name", "");
    stack.meta.task = side.value("task", "");
    stack.meta.split = side.value("split", "");
    stack.meta.pooling = parse_pooling(side.value("pooling", "mean_tokens"));
    if (side.contains("dtype") &&
        parse_dtype(side["dtype"].get<std::string>()) != stack.meta.dtype) {
      format_error("sidecar dtype disagrees with header");
    }
    if ((side.contains("n_layers") &&
         side["n_layers"].get<std::size_t>() != stack.size()) ||
        (side.contains("rows") && side["rows"].get<std::size_t>() != stack.rows()) ||
        (side.contains("cols") && side["cols"].get<std::size_t>() != stack.cols())) {
      format_error("sidecar shape disagrees with header");
    }
  } catch (const json::exception& e) {
    format_error(side_path.string() + ": " + e.what());
  }
  return stack;
}

RepresentationSet parse_csv_matrix(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      std::string_view cell(line);
      cell = cell.substr(start, comma == std::string::npos ? std::string::npos
                                                           : comma - start);
      while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) {
        cell.remove_prefix(1);
      }
      while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) {
        cell.remove_suffix(1);
      }
      if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
      double v = 0.0;
      auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || end != cell.data() + cell.size() ||
          !std::isfinite(v)) {
        throw Error(ErrorCode::kNonNumericCell,
                    "line " + std::to_string(line_no) + ": '" +
                        std::string(cell) + "'");
      }
      values.push_back(v);
      ++count;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw Error(ErrorCode::kRaggedRow, "line " + std::to_string(line_no));
    }
    ++rows;
  }
  return {Matrix(rows, cols, std::move(values)), 0};
}

RepresentationSet read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return parse_csv_matrix(in);
}

}  // namespace robustkit::tensorio
