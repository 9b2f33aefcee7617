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

#include "robustkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "robustkit/error.hpp"

namespace robustkit::probe {

namespace {

void require_nonempty(std::span<const dataio::LabelPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no predictions");
}

double as_real(const dataio::Label& label) {
  if (const auto* v = std::get_if<double>(&label)) return *v;
  const auto& s = std::get<std::string>(label);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kMetricMismatch,
              "pearson_cc needs numeric values, got '" + s + "'");
}

}  // namespace

EvalOutcome accuracy(std::span<const dataio::LabelPair> pairs) {
  require_nonempty(pairs);
  std::size_t hits = 0;
  for (const auto& p : pairs) {
    if (dataio::label_to_string(p.label) ==
        dataio::label_to_string(p.prediction)) {
      ++hits;
    }
  }
  return {dataio::MetricKind::kAccuracy,
          static_cast<double>(hits) / static_cast<double>(pairs.size()),
          pairs.size()};
}

EvalOutcome matthews_cc(std::span<const dataio::LabelPair> pairs) {
  require_nonempty(pairs);
  std::vector<std::string> values;
  for (const auto& p : pairs) {
    for (const auto* l : {&p.label, &p.prediction}) {
      auto s = dataio::label_to_string(*l);
      if (std::find(values.begin(), values.end(), s) == values.end()) {
        values.push_back(std::move(s));
      }
    }
  }
  if (values.size() > 2) {
    throw Error(ErrorCode::kNonBinaryLabels,
                "matthews_cc needs at most 2 distinct values, got " +
                    std::to_string(values.size()));
  }
  std::sort(values.begin(), values.end());
  const std::string& positive = values.back();

  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (const auto& p : pairs) {
    const bool truth = dataio::label_to_string(p.label) == positive;
    const bool pred = dataio::label_to_string(p.prediction) == positive;
    if (truth && pred) {
      ++tp;
    } else if (!truth && !pred) {
      ++tn;
    } else if (pred) {
      ++fp;
    } else {
      ++fn;
    }
  }
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  const double value = denom == 0.0 ? 0.0 : (tp * tn - fp * fn) / std::sqrt(denom);
  return {dataio::MetricKind::kMatthewsCc, value, pairs.size()};
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kShapeMismatch, "series lengths differ");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kConstantSeries, "pearson_cc needs n >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kConstantSeries, "a series is constant");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

EvalOutcome pearson_cc(std::span<const dataio::LabelPair> pairs) {
  require_nonempty(pairs);
  std::vector<double> x, y;
  x.reserve(pairs.size());
  y.reserve(pairs.size());
  for (const auto& p : pairs) {
    x.push_back(as_real(p.label));
    y.push_back(as_real(p.prediction));
  }
  return {dataio::MetricKind::kPearsonCc, pearson(x, y), pairs.size()};
}

EvalOutcome evaluate(dataio::MetricKind metric,
                     std::span<const dataio::LabelPair> pairs) {
  switch (metric) {
    case dataio::MetricKind::kAccuracy:
      return accuracy(pairs);
    case dataio::MetricKind::kMatthewsCc:
      return matthews_cc(pairs);
    case dataio::MetricKind::kPearsonCc:
      return pearson_cc(pairs);
  }
  throw Error(ErrorCode::kMetricMismatch, "unknown metric");
}

}  // namespace robustkit::probe
