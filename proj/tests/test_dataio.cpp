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

#include <gtest/gtest.h>

#include <sstream>

#include "robustkit/dataio.hpp"
#include "robustkit/error.hpp"
#include "test_util.hpp"

namespace robustkit::dataio {
namespace {

TaskConfig sst2() {
  return TaskConfig::from_json(nlohmann::json::parse(R"({
    "name": "sst2", "arity": "single",
    "label_space": {"type": "classification", "classes": ["0", "1"]},
    "primary_metric": "accuracy"})"));
}

TaskConfig rte() {
  return TaskConfig::from_json(nlohmann::json::parse(R"({
    "name": "rte", "arity": "pair",
    "label_space": {"type": "classification",
                    "classes": ["entailment", "not_entailment"]},
    "primary_metric": "accuracy"})"));
}

TaskConfig stsb() {
  return TaskConfig::from_json(nlohmann::json::parse(R"({
    "name": "stsb", "arity": "pair",
    "label_space": {"type": "regression", "min": 0, "max": 5},
    "primary_metric": "pearson_cc"})"));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no robustkit::Error thrown";
  return ErrorCode::kUsageError;
}

LabeledDataset parse(const std::string& text, const TaskConfig& task,
                     DatasetFormat f = DatasetFormat::kJsonl) {
  std::istringstream in(text);
  return parse_dataset(in, task, f);
}

TEST(TaskConfig, ParsesAndRoundTrips) {
  const auto t = rte();
  EXPECT_EQ(t.name, "rte");
  EXPECT_EQ(t.arity, Arity::kPair);
  EXPECT_EQ(t.classes(), (std::vector<std::string>{"entailment", "not_entailment"}));
  const auto again = TaskConfig::from_json(t.to_json());
  EXPECT_EQ(again.to_json(), t.to_json());
  EXPECT_TRUE(stsb().is_regression());
}

TEST(TaskConfig, IntegerClassesBecomeStrings) {
  const auto t = TaskConfig::from_json(nlohmann::json::parse(R"({
    "name": "cola", "label_space": {"type": "classification", "classes": [0, 1]},
    "primary_metric": "matthews_cc"})"));
  EXPECT_EQ(t.classes(), (std::vector<std::string>{"0", "1"}));
}

TEST(TaskConfig, RejectsInvalid) {
  EXPECT_EQ(code_of([] {
              TaskConfig::from_json(nlohmann::json::parse(R"({
        "name": "x", "label_space": {"type": "classification", "classes": ["a"]},
        "primary_metric": "accuracy"})"));
            }),
            ErrorCode::kInvalidTaskConfig);
  EXPECT_EQ(code_of([] {
              TaskConfig::from_json(nlohmann::json::parse(R"({
        "name": "x", "label_space": {"type": "regression", "min": 0, "max": 5},
        "primary_metric": "accuracy"})"));
            }),
            ErrorCode::kInvalidTaskConfig);
  EXPECT_EQ(code_of([] {
              TaskConfig::from_json(nlohmann::json::parse(R"({"name": "x"})"));
            }),
            ErrorCode::kInvalidTaskConfig);
}

TEST(Dataset, ParsesJsonlSingleAndPair) {
  const auto ds = parse(
      "{\"id\":\"a\",\"text_a\":\"good film\",\"label\":1}\n"
      "\n"
      "{\"id\":\"b\",\"text_a\":\"bad film\",\"label\":\"0\"}\n",
      sst2());
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(label_to_string(ds.records()[0].label), "1");
  EXPECT_EQ(ds.find("b"), 1u);
  EXPECT_FALSE(ds.find("zzz").has_value());

  const auto pair = parse(
      "{\"id\":\"p\",\"text_a\":\"x\",\"text_b\":\"y\",\"label\":\"entailment\"}\n",
      rte());
  EXPECT_EQ(pair.records()[0].text_b, "y");
}

TEST(Dataset, Errors) {
  EXPECT_EQ(code_of([] {
              parse("{\"id\":\"a\",\"text_a\":\"x\",\"label\":1}\n"
                    "{\"id\":\"a\",\"text_a\":\"y\",\"label\":0}\n",
                    sst2());
            }),
            ErrorCode::kDuplicateId);
  EXPECT_EQ(code_of([] {
              parse("{\"id\":\"a\",\"text_a\":\"x\",\"label\":7}\n", sst2());
            }),
            ErrorCode::kLabelOutOfSpace);
  EXPECT_EQ(code_of([] {
              parse("{\"id\":\"a\",\"text_a\":\"x\",\"label\":\"entailment\"}\n", rte());
            }),
            ErrorCode::kMalformedRecord);
  EXPECT_EQ(code_of([] {
              parse("{\"id\":\"a\",\"text_a\":\"x\",\"label\":1,\"extra\":2}\n", sst2());
            }),
            ErrorCode::kMalformedRecord);
  EXPECT_EQ(code_of([] { parse("{not json\n", sst2()); }),
            ErrorCode::kMalformedRecord);
  EXPECT_EQ(code_of([] {
              parse("{\"id\":\"a\",\"text_a\":\"x\",\"text_b\":\"y\",\"label\":9.5}\n",
                    stsb());
            }),
            ErrorCode::kLabelOutOfSpace);
}

TEST(Dataset, JsonlRoundTripIsByteStable) {
  const std::string text =
      "{\"id\":\"r1\",\"text_a\":\"He said \\\"hi\\\"\",\"text_b\":\"ok\","
      "\"label\":\"entailment\"}\n"
      "{\"id\":\"r2\",\"text_a\":\"caf\xc3\xa9\",\"text_b\":\"\","
      "\"label\":\"not_entailment\"}\n";
  const auto ds = parse(text, rte());
  std::ostringstream out;
  write_dataset(ds, out, DatasetFormat::kJsonl);
  const auto again = parse(out.str(), rte());
  EXPECT_EQ(again.records(), ds.records());
  std::ostringstream out2;
  write_dataset(again, out2, DatasetFormat::kJsonl);
  EXPECT_EQ(out.str(), out2.str());
}

TEST(Dataset, TsvRoundTrip) {
  const auto ds = parse("label\tid\ttext_a\n1\tx1\thello there\n0\tx2\tbye\n",
                        sst2(), DatasetFormat::kTsv);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.records()[0].id, "x1");
  std::ostringstream out;
  write_dataset(ds, out, DatasetFormat::kTsv);
  EXPECT_EQ(parse(out.str(), sst2(), DatasetFormat::kTsv).records(), ds.records());
}

TEST(Dataset, TsvRequiresHeaderColumns) {
  EXPECT_EQ(code_of([] { parse("id\ttext_a\nx\ty\n", sst2(), DatasetFormat::kTsv); }),
            ErrorCode::kMalformedRecord);
  EXPECT_EQ(code_of([] {
              parse("id\ttext_a\tlabel\nx\ty\n", sst2(), DatasetFormat::kTsv);
            }),
            ErrorCode::kMalformedRecord);
}

TEST(Dataset, FileRoundTrip) {
  testing::TempDir dir("dataio");
  const auto ds = parse("{\"id\":\"a\",\"text_a\":\"x y\",\"label\":1}\n", sst2());
  save_dataset(ds, dir / "d.jsonl", DatasetFormat::kJsonl);
  EXPECT_EQ(load_dataset(dir / "d.jsonl", sst2(), DatasetFormat::kJsonl).records(),
            ds.records());
  EXPECT_EQ(code_of([&] {
              load_dataset(dir / "missing.jsonl", sst2(), DatasetFormat::kJsonl);
            }),
            ErrorCode::kIoError);
}

TEST(Predictions, ParseAlignAndErrors) {
  std::istringstream in(
      "{\"id\":\"b\",\"label\":\"0\",\"prediction\":\"1\"}\n"
      "{\"id\":\"a\",\"label\":\"1\",\"prediction\":\"1\"}\n");
  const auto preds = parse_predictions(in, sst2());
  ASSERT_EQ(preds.entries.size(), 2u);

  const auto ds = parse(
      "{\"id\":\"a\",\"text_a\":\"x\",\"label\":1}\n"
      "{\"id\":\"b\",\"text_a\":\"y\",\"label\":0}\n",
      sst2());
  const auto pairs = align(ds, preds);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(label_to_string(pairs[0].label), "1");
  EXPECT_EQ(label_to_string(pairs[1].prediction), "1");

  std::istringstream dup(
      "{\"id\":\"a\",\"label\":\"1\",\"prediction\":\"1\"}\n"
      "{\"id\":\"a\",\"label\":\"1\",\"prediction\":\"0\"}\n");
  EXPECT_EQ(code_of([&] { parse_predictions(dup, sst2()); }), ErrorCode::kDuplicateId);

  std::istringstream unknown("{\"id\":\"zz\",\"label\":\"1\",\"prediction\":\"1\"}\n");
  const auto stray = parse_predictions(unknown, sst2());
  EXPECT_EQ(code_of([&] { align(ds, stray); }), ErrorCode::kUnknownId);

  std::istringstream bad("{\"id\":\"a\",\"label\":\"1\",\"prediction\":\"7\"}\n");
  EXPECT_EQ(code_of([&] { parse_predictions(bad, sst2()); }),
            ErrorCode::kLabelOutOfSpace);
}

TEST(Predictions, RegressionPredictionsAreNotClamped) {
  std::istringstream in("{\"id\":\"a\",\"label\":4.5,\"prediction\":5.7}\n");
  const auto preds = parse_predictions(in, stsb());
  EXPECT_EQ(std::get<double>(preds.entries[0].prediction), 5.7);
  std::ostringstream out;
  write_predictions(preds, out);
  std::istringstream again(out.str());
  EXPECT_EQ(std::get<double>(parse_predictions(again, stsb()).entries[0].prediction),
            5.7);
}

TEST(IdLabels, LoadsInFileOrder) {
  testing::TempDir dir("idlabels");
  testing::write_file(dir / "l.jsonl",
                      "{\"id\":\"q\",\"label\":1}\n{\"id\":\"p\",\"label\":\"neg\"}\n");
  const auto rows = load_id_labels(dir / "l.jsonl");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].id, "q");
  EXPECT_EQ(rows[0].label, "1");
  EXPECT_EQ(rows[1].label, "neg");
}

}  // namespace
}  // namespace robustkit::dataio
