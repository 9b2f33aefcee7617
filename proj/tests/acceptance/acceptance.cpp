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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "../fixtures.hpp"
#include "../test_util.hpp"
#include "robustkit/cli.hpp"
#include "robustkit/error.hpp"
#include "robustkit/metrics.hpp"
#include "robustkit/perturb.hpp"
#include "robustkit/probe.hpp"
#include "robustkit/robust.hpp"
#include "robustkit/simd/kernels.hpp"
#include "robustkit/simmetrics.hpp"
#include "robustkit/tensorio.hpp"
#include "robustkit/text.hpp"

namespace rk = robustkit;
using rk::Matrix;
using rk::Rng;
using rk::testing::random_matrix;

namespace {

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": got " << got << ", want " << want << " (tol " << tol << ")";
    expect(std::abs(got - want) <= tol, os.str());
  }
  template <typename Fn>
  void throws(rk::ErrorCode code, Fn&& fn, const std::string& what) {
    try {
      fn();
    } catch (const rk::Error& e) {
      expect(e.code() == code, what + ": wrong error " +
                                   std::string(rk::error_name(e.code())));
      return;
    }
    expect(false, what + ": nothing thrown");
  }
  bool ok() const { return failures_.empty(); }
  std::size_t checks() const { return checks_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::size_t checks_ = 0;
  std::vector<std::string> failures_;
};

struct Criterion {
  const char* name;
  double budget_seconds;  // 0 = no runtime bound
  std::function<void(Check&)> body;
};

Matrix center_columns(const Matrix& x) {
  Matrix c = x;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
    mean /= static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) c(i, j) -= mean;
  }
  return c;
}

double cross_frobenius_sq(const Matrix& a, const Matrix& b) {
  double total = 0.0;
  for (std::size_t p = 0; p < b.cols(); ++p) {
    for (std::size_t q = 0; q < a.cols(); ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) s += b(i, p) * a(i, q);
      total += s * s;
    }
  }
  return total;
}

double feature_space_cka(const Matrix& x, const Matrix& y) {
  const Matrix xc = center_columns(x);
  const Matrix yc = center_columns(y);
  return cross_frobenius_sq(xc, yc) /
         std::sqrt(cross_frobenius_sq(xc, xc) * cross_frobenius_sq(yc, yc));
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

Matrix random_orthogonal(Rng& rng, std::size_t d) {
  Matrix q = random_matrix(rng, d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double proj = 0.0;
      for (std::size_t i = 0; i < d; ++i) proj += q(i, j) * q(i, k);
      for (std::size_t i = 0; i < d; ++i) q(i, j) -= proj * q(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < d; ++i) q(i, j) /= norm;
  }
  return q;
}

rk::tensorio::LayerStack random_stack(Rng& rng, std::size_t layers, std::size_t n,
                                      std::size_t d) {
  rk::tensorio::LayerStack s;
  for (std::size_t l = 0; l < layers; ++l) s.layers.push_back({random_matrix(rng, n, d), l});
  return s;
}

void cka_properties(Check& c) {
  Rng rng(101);
  for (int t = 0; t < 200; ++t) {
    const auto n = 3 + rng.uniform_index(48);
    const auto d = 1 + rng.uniform_index(20);
    const Matrix x = random_matrix(rng, n, d);
    const Matrix y = random_matrix(rng, n, 1 + rng.uniform_index(20));
    const double v = rk::simmetrics::linear_cka(x, y);
    const auto tag = " case " + std::to_string(t);
    c.near(rk::simmetrics::linear_cka(x, x), 1.0, 1e-9, "self" + tag);
    c.near(rk::simmetrics::linear_cka(y, x), v, 1e-9, "symmetry" + tag);
    Matrix scaled = x;
    const double alpha = 0.01 + 100.0 * rng.uniform01();
    for (double& e : scaled.flat()) e *= alpha;
    c.near(rk::simmetrics::linear_cka(scaled, y), v, 1e-9, "isotropic scaling" + tag);
    c.near(rk::simmetrics::linear_cka(multiply(x, random_orthogonal(rng, d)), y), v,
           1e-9, "orthogonal transform" + tag);
    c.expect(v >= -1e-9 && v <= 1.0 + 1e-9, "range" + tag);
  }
}

void cka_oracle(Check& c) {
  Rng rng(102);
  for (int t = 0; t < 100; ++t) {
    const auto n = 3 + rng.uniform_index(48);
    const Matrix x = random_matrix(rng, n, 1 + rng.uniform_index(20));
    const Matrix y = random_matrix(rng, n, 1 + rng.uniform_index(20));
    c.near(rk::simmetrics::linear_cka(x, y), feature_space_cka(x, y), 1e-8,
           "pair " + std::to_string(t));
  }
}

void hsic_exact(Check& c) {
  rk::simd::ScopedBackend scalar(rk::simd::Backend::kScalar);
  Rng rng(103);
  for (int t = 0; t < 50; ++t) {
    using rk::simmetrics::center_gram;
    using rk::simmetrics::gram_linear;
    const Matrix kc = center_gram(gram_linear(random_matrix(rng, 8, 8)));
    const Matrix lc = center_gram(gram_linear(random_matrix(rng, 8, 8)));
    double sum = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = 0; j < 8; ++j) sum += kc(i, j) * lc(i, j);
    }
    c.expect(rk::simmetrics::hsic_centered(kc, lc) == sum / 49.0,
             "case " + std::to_string(t) + " differs from the double loop");
  }
}

void stir_checks(Check& c) {
  Rng rng(104);
  for (int t = 0; t < 5; ++t) {
    const auto m = random_stack(rng, 4, 30 + rng.uniform_index(30), 1 + rng.uniform_index(8));
    rk::simmetrics::StirConfig cfg;
    cfg.k = 6;
    cfg.seed = static_cast<std::uint64_t>(t);
    for (const auto& layer : rk::simmetrics::stir(m, m, cfg, 2).per_layer) {
      c.expect(layer.stir == 1.0, "stir(m|m) != 1 exactly");
      for (double v : layer.per_sample_cka) c.expect(v == 1.0, "per-sample stir(m|m) != 1");
    }
  }
  for (int t = 0; t < 20; ++t) {
    const auto m1 = random_stack(rng, 3, 10, 4);
    const auto m2 = random_stack(rng, 3, 10, 4);
    rk::simmetrics::StirConfig cfg;
    cfg.k = 1;
    cfg.sample_fraction = 1.0;
    const auto report = rk::simmetrics::stir(m1, m2, cfg);
    const Matrix& a = m1.layers.back().matrix;
    const Matrix& b = m2.layers.back().matrix;
    std::vector<std::size_t> matched;
    for (std::size_t i = 0; i < 10; ++i) {
      std::size_t best = 0;
      double best_d = INFINITY;
      for (std::size_t j = 0; j < 10; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 4; ++k) s += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
        if (std::sqrt(s) < best_d) best_d = std::sqrt(s), best = j;
      }
      matched.push_back(best);
    }
    for (std::size_t l = 0; l < 3; ++l) {
      const Matrix& reps = m2.layers[l].matrix;
      c.near(report.per_layer[l].stir, feature_space_cka(reps, reps.select_rows(matched)),
             1e-10, "brute-force oracle pair " + std::to_string(t));
    }
  }
}

std::string perturb_one(rk::perturb::PerturbationKind kind, std::string_view text,
                        std::string_view id, double char_prob = 0.10,
                        double add_ratio = 0.10, std::uint64_t seed = 1) {
  rk::perturb::PerturbationSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  spec.char_prob = char_prob;
  spec.add_ratio = add_ratio;
  return rk::perturb::apply(text, spec, rk::perturb::GenderLexicon::builtin(),
                            rk::perturb::default_distractors(), id);
}

std::string gendered_sentence(Rng& rng) {
  static const std::vector<std::string> kPlain = {
      "the", "film", "saw", "into", "a", "road", "across", "smoke", "ride",
      "city", "quickly", ",", ".", "Jon's", "water", "green"};
  static const std::vector<std::string> kGendered = {
      "he", "She", "HIM", "His", "hers", "Women", "king", "Queen", "mr", "Mrs", "BOY"};
  std::string s;
  const auto len = 1 + rng.uniform_index(16);
  for (std::uint64_t i = 0; i < len; ++i) {
    if (i) s += ' ';
    s += rng.uniform_index(3) == 0 ? kGendered[rng.uniform_index(kGendered.size())]
                                   : kPlain[rng.uniform_index(kPlain.size())];
  }
  return s;
}

void perturbation_goldens(Check& c) {
  using K = rk::perturb::PerturbationKind;
  c.expect(perturb_one(K::kDropFirst, "A civilian policeman was killed .", "rte") ==
               "civilian policeman was killed .",
           "drop_first RTE example");
  c.expect(perturb_one(K::kBias, "Jon saw him ride into the smoke .", "mnli") ==
               "Jon saw her ride into the smoke .",
           "bias MNLI example");

  Rng rng(105);
  std::vector<rk::dataio::Record> records;
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto s = gendered_sentence(rng);
    const auto id = "s" + std::to_string(i);
    c.expect(perturb_one(K::kChangeChar, s, id, 0.0) == s, "change_char p=0 identity");
    c.expect(perturb_one(K::kAddText, s, id, 0.1, 0.0) == s, "add_text ratio=0 identity");
    c.expect(perturb_one(K::kBias, perturb_one(K::kBias, s, id), id) == s,
             "bias twice is not identity on '" + s + "'");
    records.push_back({id, s, std::nullopt, std::string(i % 2 ? "1" : "0")});
  }

  const auto task = rk::dataio::TaskConfig::from_json(nlohmann::json::parse(R"({
    "name": "toy", "arity": "single",
    "label_space": {"type": "classification", "classes": ["0", "1"]},
    "primary_metric": "accuracy"})"));
  const rk::dataio::LabeledDataset ds(std::move(records), task);
  for (auto kind : rk::perturb::all_kinds()) {
    rk::perturb::PerturbationSpec spec;
    spec.kind = kind;
    spec.seed = 77;
    const rk::perturb::Perturber p(spec, rk::perturb::GenderLexicon::builtin(),
                                   rk::perturb::default_distractors());
    std::ostringstream serial, again, parallel;
    using rk::dataio::DatasetFormat;
    rk::dataio::write_dataset(rk::perturb::perturb_dataset(ds, p, rk::perturb::Fields::kBoth, 1),
                              serial, DatasetFormat::kJsonl);
    rk::dataio::write_dataset(rk::perturb::perturb_dataset(ds, p, rk::perturb::Fields::kBoth, 1),
                              again, DatasetFormat::kJsonl);
    rk::dataio::write_dataset(rk::perturb::perturb_dataset(ds, p, rk::perturb::Fields::kBoth, 4),
                              parallel, DatasetFormat::kJsonl);
    const auto name = std::string(rk::perturb::kind_name(kind));
    c.expect(serial.str() == again.str(), name + " differs across runs");
    c.expect(serial.str() == parallel.str(), name + " differs serial vs parallel");
  }
}

void change_char_rate(Check& c) {
  Rng rng(106);
  std::size_t letters = 0, changed = 0;
  for (int r = 0; letters < 20000; ++r) {
    std::string s;
    for (int w = 0; w < 12; ++w) {
      if (w) s += ' ';
      const auto len = 1 + rng.uniform_index(9);
      for (std::uint64_t i = 0; i < len; ++i) s += static_cast<char>('a' + rng.uniform_index(26));
    }
    const auto out = perturb_one(rk::perturb::PerturbationKind::kChangeChar, s,
                                 "c" + std::to_string(r), 0.10, 0.10, 9);
    if (out.size() != s.size()) {
      c.expect(false, "change_char changed the text length");
      return;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == ' ') continue;
      ++letters;
      changed += out[i] != s[i];
    }
  }
  const double rate = static_cast<double>(changed) / static_cast<double>(letters);
  std::ostringstream os;
  os << "rate " << rate << " over " << letters << " letters";
  c.expect(rate >= 0.08 && rate <= 0.12, os.str());
}

rk::dataio::PredictionFile predictions(std::size_t n, std::size_t flips) {
  rk::dataio::PredictionFile f;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string gold = i % 2 ? "1" : "0";
    f.entries.push_back({"e" + std::to_string(i), gold, i < flips ? (i % 2 ? "0" : "1") : gold});
  }
  return f;
}

void robustness_formula(Check& c) {
  Rng rng(107);
  for (int t = 0; t < 100; ++t) {
    const double clean = 1.0 - rng.uniform01();
    const double pert = rng.uniform01();
    c.expect(rk::robust::robustness(clean, clean) == 1.0, "robustness(c,c) != 1");
    c.near(rk::robust::robustness(clean, pert) * clean, pert, 1e-12, "robustness(c,p)*c");
  }
  auto task = rk::dataio::TaskConfig::from_json(nlohmann::json::parse(R"({
    "name": "toy", "arity": "single",
    "label_space": {"type": "classification", "classes": ["0", "1"]},
    "primary_metric": "accuracy"})"));
  const auto s = rk::robust::score_run(predictions(10, 0), predictions(10, 5), task);
  c.expect(s.clean == 1.0 && s.score == 0.5, "10 examples with 5 flips must give 0.5");
  c.near(rk::robust::robustness(0.5, 0.55), 1.1, 1e-15, "score above 1 uncapped");
  const auto up = rk::robust::score_run(predictions(10, 4), predictions(10, 2), task);
  c.expect(up.score > 1.0, "run-level score above 1 uncapped");
}

double norm(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

void probe_suite(Check& c) {
  Rng rng(108);
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 5 + rng.uniform_index(30), d = 1 + rng.uniform_index(6),
                      k = 2 + rng.uniform_index(3);
    const double l2 = t % 2 ? rng.uniform01() : 0.0;
    const Matrix x = random_matrix(rng, n, d);
    std::vector<std::size_t> y(n);
    for (auto& v : y) v = rng.uniform_index(k);
    rk::probe::Parameters p{random_matrix(rng, k, d), std::vector<double>(k)};
    for (double& b : p.b) b = rng.normal();
    rk::probe::Parameters grad;
    rk::probe::loss_and_gradient(x, y, p, l2, &grad);
    std::vector<double> analytic, diff;
    auto fd = [&](double& slot, double g) {
      const double saved = slot;
      slot = saved + h;
      const double up = rk::probe::loss_and_gradient(x, y, p, l2, nullptr);
      slot = saved - h;
      const double down = rk::probe::loss_and_gradient(x, y, p, l2, nullptr);
      slot = saved;
      analytic.push_back(g);
      diff.push_back(g - (up - down) / (2 * h));
    };
    for (std::size_t i = 0; i < p.w.flat().size(); ++i) fd(p.w.flat()[i], grad.w.flat()[i]);
    for (std::size_t i = 0; i < k; ++i) fd(p.b[i], grad.b[i]);
    c.expect(norm(diff) / norm(analytic) <= 1e-5,
             "gradient problem " + std::to_string(t) + " relative error " +
                 std::to_string(norm(diff) / norm(analytic)));
  }

  // Separable clusters: every point lies at least one unit from the boundary.
  rk::tensorio::RepresentationSet reps{random_matrix(rng, 200, 2), 0};
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 200; ++i) {
    const bool pos = i % 2;
    double& x0 = reps.matrix(i, 0);
    x0 = (pos ? 5.0 : -5.0) + std::clamp(x0, -4.0, 4.0);
    labels.push_back(pos ? "pos" : "neg");
  }
  const auto model = rk::probe::train_probe(reps, labels, rk::probe::TrainConfig{});
  const auto predicted = rk::probe::predict(model, reps);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < 200; ++i) correct += predicted[i] == labels[i];
  c.expect(correct >= 198, "train accuracy " + std::to_string(correct / 200.0));

  rk::testing::TempDir dir("acceptance_probe");
  rk::testing::write_toy_world(dir.path(), 3, {500, 4, 6});
  auto train = rk::tensorio::read_stack(dir / "train.rtns");
  auto eval = rk::tensorio::read_stack(dir / "eval_clean.rtns");
  train.layers[1].matrix = random_matrix(rng, 500, 6);
  eval.layers[1].matrix = random_matrix(rng, 500, 6);
  std::vector<std::string> y;
  for (const auto& r : rk::dataio::load_id_labels(dir / "data.jsonl")) y.push_back(r.label);
  const auto results =
      rk::probe::layerwise_probe(train, y, eval, y, rk::probe::TrainConfig{});
  for (std::size_t l : {0, 2, 3}) {
    c.expect(results[1].outcome.value < results[l].outcome.value,
             "noise layer not ranked below layer " + std::to_string(l));
  }

  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.uniform_index(24);
    std::vector<rk::robust::LayerValue> clean, pert;
    std::vector<double> drop(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double cv = rng.uniform01();
      const double pv = cv - static_cast<double>(rng.uniform_index(5)) / 4.0;
      clean.push_back({i, cv});
      pert.push_back({i, pv});
      drop[i] = cv - pv;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return drop[a] > drop[b]; });
    order.resize(std::min<std::size_t>(3, n));
    c.expect(rk::robust::layer_impact(clean, pert).top_affected == order,
             "layer_impact top-3 case " + std::to_string(t));
  }
}

std::vector<rk::dataio::LabelPair> pairs_of(const std::vector<int>& gold,
                                            const std::vector<int>& pred) {
  std::vector<rk::dataio::LabelPair> out;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    out.push_back({std::to_string(gold[i]), std::to_string(pred[i])});
  }
  return out;
}

void metric_references(Check& c) {
  using rk::probe::matthews_cc;
  c.expect(matthews_cc(pairs_of({0, 1, 0, 1, 1}, {0, 1, 0, 1, 1})).value == 1.0, "MCC perfect");
  c.expect(matthews_cc(pairs_of({0, 1, 0, 1}, {1, 0, 1, 0})).value == -1.0, "MCC inverted");
  c.expect(matthews_cc(pairs_of({1, 1, 0, 0}, {1, 0, 1, 0})).value == 0.0, "MCC balanced");
  const std::vector<double> x{1, 2, 3}, y{1, 2, 4};
  c.near(rk::probe::pearson(x, y), 0.98198, 1e-5, "Pearson hand value");
}

void format_checks(Check& c) {
  Rng rng(109);
  for (auto dtype : {rk::tensorio::DType::kF32, rk::tensorio::DType::kF64}) {
    for (int t = 0; t < 40; ++t) {
      auto s = random_stack(rng, 1 + rng.uniform_index(3), 1 + rng.uniform_index(7),
                            1 + rng.uniform_index(5));
      s.meta.dtype = dtype;
      s.meta.model_name = "m" + std::to_string(t);
      if (dtype == rk::tensorio::DType::kF32) {
        for (auto& l : s.layers) {
          for (double& v : l.matrix.flat()) v = static_cast<float>(v);
        }
      }
      const auto bytes = rk::tensorio::encode_stack(s);
      const auto back = rk::tensorio::decode_stack(bytes);
      bool same = back.layers.size() == s.layers.size();
      for (std::size_t l = 0; same && l < s.layers.size(); ++l) {
        const auto a = s.layers[l].matrix.flat();
        const auto b = back.layers[l].matrix.flat();
        same = back.layers[l].rows() == s.layers[l].rows() &&
               back.layers[l].cols() == s.layers[l].cols() &&
               std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
      }
      c.expect(same, "round trip not bit-exact");
      c.expect(rk::tensorio::encode_stack(back) == bytes, "re-encode differs");
      if (t % 8 == 0) {
        for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
          c.throws(rk::ErrorCode::kTruncatedFile,
                   [&] { rk::tensorio::decode_stack(std::span(bytes).first(cut)); },
                   "truncated at " + std::to_string(cut));
        }
      }
      auto bad = bytes;
      bad[0] = std::byte{'X'};
      c.throws(rk::ErrorCode::kBadMagic, [&] { rk::tensorio::decode_stack(bad); }, "bad magic");
    }
  }
}

void end_to_end(Check& c) {
  rk::testing::TempDir dir("acceptance_e2e");
  rk::testing::write_toy_world(dir.path());
  rk::testing::write_file(dir / "pipeline.json",
                          rk::testing::toy_pipeline_config().dump(2));
  const std::vector<std::string> args{"pipeline", "--config", (dir / "pipeline.json").string()};
  std::vector<std::string> manifests;
  for (int run = 0; run < 2; ++run) {
    std::ostringstream out, err;
    const int code = rk::cli::run_cli(args, out, err);
    c.expect(code == 0, "pipeline exit " + std::to_string(code) + ": " + err.str());
    if (code != 0) return;
    manifests.push_back(rk::testing::read_file(dir / "manifest.json"));
  }
  const auto manifest = nlohmann::json::parse(manifests[0]);
  c.expect(manifest.size() == 6, "expected 6 manifest entries");
  std::vector<std::string> commands;
  for (const auto& e : manifest) commands.push_back(e["command"]);
  c.expect(commands == std::vector<std::string>{"perturb", "probe", "probe", "robustness",
                                                "layer-impact", "report"},
           "unexpected step order");
  c.expect(manifests[0] == manifests[1], "manifest hashes differ across runs");
  const auto impact = nlohmann::json::parse(rk::testing::read_file(dir / "out/impact.json"));
  c.expect(impact["top_affected"].size() == 3, "layer-impact top-3 missing");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"CKA property suite", 5.0, cka_properties},
      {"CKA oracle equivalence", 5.0, cka_oracle},
      {"HSIC formula check", 0.0, hsic_exact},
      {"STIR self-identity and brute-force oracle", 0.0, stir_checks},
      {"Perturbation golden tests", 0.0, perturbation_goldens},
      {"change_char statistics", 0.0, change_char_rate},
      {"Robustness formula", 0.0, robustness_formula},
      {"Probe suite", 0.0, probe_suite},
      {"Metric references", 0.0, metric_references},
      {"Format", 0.0, format_checks},
      {"End-to-end desk-scale pipeline", 60.0, end_to_end},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("unexpected exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.budget_seconds > 0 && seconds >= cr.budget_seconds) {
      check.expect(false, "runtime " + std::to_string(seconds) + " s over budget");
    }
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(3);
    line << (check.ok() ? "PASS" : "FAIL") << "  " << cr.name << "  (" << check.checks()
         << " checks, " << seconds << " s)";
    std::cout << line.str() << "\n";
    if (!check.ok()) {
      ++failed;
      const auto& f = check.failures();
      for (std::size_t i = 0; i < std::min<std::size_t>(5, f.size()); ++i) {
        std::cout << "      " << f[i] << "\n";
      }
      if (f.size() > 5) std::cout << "      ... " << f.size() - 5 << " more\n";
    }
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
