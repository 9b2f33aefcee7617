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

#ifndef ROBUSTKIT_PERTURB_HPP_
#define ROBUSTKIT_PERTURB_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robustkit/dataio.hpp"
#include "robustkit/text.hpp"

namespace robustkit::perturb {

enum class PerturbationKind {
  kDropNoun,
  kDropVerb,
  kDropFirst,
  kDropLast,
  kSwapText,
  kChangeChar,
  kAddText,
  kBias,
};

std::string_view kind_name(PerturbationKind kind);
// Throws kUnknownPerturbationKind.
PerturbationKind parse_kind(std::string_view name);
std::span<const PerturbationKind> all_kinds();

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::kDropFirst;
  double char_prob = 0.10;
  double add_ratio = 0.10;
  std::uint32_t swap_pairs = 1;
  std::uint64_t seed = 0;

  // Throws kInvalidPerturbationSpec.
  void validate() const;
};

enum class Fields { kA, kB, kBoth };
Fields parse_fields(std::string_view name);

// Number of distractor words add_text inserts into a text of n tokens:
// ceil(add_ratio * n) with a small guard, so 0.1 * 30 gives 3.
std::size_t insertion_count(double add_ratio, std::size_t n_tokens);

// A perturbation spec bound to the lexicons it needs. Holds references to
// the lexicons and word list; they must outlive the Perturber.
class Perturber {
 public:
  // Throws kInvalidPerturbationSpec, or kEmptyDistractorList for add_text
  // with no distractors.
  Perturber(PerturbationSpec spec, const GenderLexicon& gender,
            std::span<const std::string> distractors,
            const PosLexicon& pos = PosLexicon::builtin(),
            const PretaggedCorpus* pretagged = nullptr);

  // Pure function of (text, spec, record_id, field). The random stream is
  // seeded from (spec.seed, record_id) for field 'a' and from
  // (spec.seed, record_id + "\x1f" "b") for field 'b'.
  std::string apply(std::string_view text, std::string_view record_id,
                    char field = 'a') const;

  const PerturbationSpec& spec() const noexcept { return spec_; }

 private:
  std::vector<Token> tagged_tokens(std::string_view text,
                                   std::string_view record_id,
                                   char field) const;

  PerturbationSpec spec_;
  const GenderLexicon& gender_;
  std::span<const std::string> distractors_;
  const PosLexicon& pos_;
  const PretaggedCorpus* pretagged_;
};

// Convenience wrapper using the built-in POS lexicon.
std::string apply(std::string_view text, const PerturbationSpec& spec,
                  const GenderLexicon& gender,
                  std::span<const std::string> distractors,
                  std::string_view record_id);

// Same ids, labels and order; perturbed text fields. Records may be
// processed on several threads; the result is identical to a serial run.
dataio::LabeledDataset perturb_dataset(const dataio::LabeledDataset& ds,
                                       const Perturber& perturber,
                                       Fields fields = Fields::kBoth,
                                       unsigned threads = 1);

}  // namespace robustkit::perturb

#endif  // ROBUSTKIT_PERTURB_HPP_
