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

#include "robustkit/perturb.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "robustkit/error.hpp"
#include "robustkit/parallel.hpp"
#include "robustkit/random.hpp"

namespace robustkit::perturb {

namespace {

constexpr std::array<PerturbationKind, 8> kAllKinds = {
    PerturbationKind::kDropNoun,  PerturbationKind::kDropVerb,
    PerturbationKind::kDropFirst, PerturbationKind::kDropLast,
    PerturbationKind::kSwapText,  PerturbationKind::kChangeChar,
    PerturbationKind::kAddText,   PerturbationKind::kBias,
};

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

enum class CaseShape { kLower, kCapitalized, kUpper, kMixed };

CaseShape case_shape(std::string_view w) {
  const bool all_lower = std::none_of(w.begin(), w.end(), is_upper);
  if (all_lower) return CaseShape::kLower;
  const bool rest_lower =
      std::none_of(w.begin() + 1, w.end(), is_upper) && is_upper(w.front());
  if (rest_lower && w.size() == 1) return CaseShape::kUpper;
  if (rest_lower) return CaseShape::kCapitalized;
  if (std::none_of(w.begin(), w.end(), is_lower)) return CaseShape::kUpper;
  return CaseShape::kMixed;
}

std::string apply_shape(std::string_view lower, CaseShape shape) {
  std::string out(lower);
  if (shape == CaseShape::kUpper) {
    for (char& c : out) {
      if (is_lower(c)) c = static_cast<char>(c - 'a' + 'A');
    }
  } else if (shape == CaseShape::kCapitalized && !out.empty() &&
             is_lower(out.front())) {
    out.front() = static_cast<char>(out.front() - 'a' + 'A');
  }
  return out;
}

std::string drop_tagged(std::string_view text, std::vector<Token> tokens,
                        PosTag tag) {
  const auto removed =
      std::erase_if(tokens, [tag](const Token& t) { return t.pos == tag; });
  return removed == 0 ? std::string(text) : detokenize(tokens);
}

std::string drop_first(std::vector<Token> tokens) {
  if (!tokens.empty()) tokens.erase(tokens.begin());
  return detokenize(tokens);
}

std::string drop_last(std::vector<Token> tokens) {
  if (tokens.empty()) return {};
  auto it = std::find_if(tokens.rbegin(), tokens.rend(), [](const Token& t) {
    return !is_punctuation_token(t.surface);
  });
  if (it == tokens.rend()) {
    tokens.pop_back();
  } else {
    tokens.erase(std::next(it).base());
  }
  return detokenize(tokens);
}

std::string swap_text(std::string_view text, std::vector<Token> tokens,
                      std::uint32_t pairs, Rng& rng) {
  const std::size_t n = tokens.size();
  if (n < 2) return std::string(text);
  for (std::uint32_t k = 0; k < pairs; ++k) {
    const auto i = rng.uniform_index(n);
    auto j = rng.uniform_index(n - 1);
    if (j >= i) ++j;
    std::swap(tokens[i], tokens[j]);
  }
  return detokenize(tokens);
}

// Operates on the raw bytes so whitespace and punctuation are untouched.
std::string change_char(std::string_view text, double prob, Rng& rng) {
  std::string out(text);
  for (char& c : out) {
    if (!is_lower(c) && !is_upper(c)) continue;
    if (!(rng.uniform01() < prob)) continue;
    const char self = is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
    auto pick = static_cast<char>('a' + rng.uniform_index(25));
    if (pick >= self) ++pick;
    c = pick;
  }
  return out;
}

std::string add_text(std::string_view text, std::vector<Token> tokens,
                     double ratio, std::span<const std::string> distractors,
                     Rng& rng) {
  const std::size_t count = insertion_count(ratio, tokens.size());
  if (count == 0) return std::string(text);
  for (std::size_t k = 0; k < count; ++k) {
    const auto& word = distractors[rng.uniform_index(distractors.size())];
    const auto pos = rng.uniform_index(tokens.size() + 1);
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                  Token{word, std::nullopt, 0});
  }
  return detokenize(tokens);
}

// Splices replacements into the original text.
std::string bias(const TokenizedText& text, const GenderLexicon& gender) {
  std::string out;
  out.reserve(text.original.size());
  std::size_t copied = 0;
  for (const auto& token : text.tokens) {
    const auto swapped = gender.swap(ascii_lower(token.surface));
    if (!swapped) continue;
    const auto shape = case_shape(token.surface);
    if (shape == CaseShape::kMixed) continue;
    out.append(text.original, copied, token.offset - copied);
    out += apply_shape(*swapped, shape);
    copied = token.offset + token.surface.size();
  }
  out.append(text.original, copied, std::string::npos);
  return out;
}

}  // namespace

std::string_view kind_name(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kDropNoun:
      return "drop_noun";
    case PerturbationKind::kDropVerb:
      return "drop_verb";
    case PerturbationKind::kDropFirst:
      return "drop_first";
    case PerturbationKind::kDropLast:
      return "drop_last";
    case PerturbationKind::kSwapText:
      return "swap_text";
    case PerturbationKind::kChangeChar:
      return "change_char";
    case PerturbationKind::kAddText:
      return "add_text";
    case PerturbationKind::kBias:
      return "bias";
  }
  return "unknown";
}

PerturbationKind parse_kind(std::string_view name) {
  for (auto kind : kAllKinds) {
    if (kind_name(kind) == name) return kind;
  }
  throw Error(ErrorCode::kUnknownPerturbationKind,
              "unknown perturbation kind '" + std::string(name) + "'");
}

std::span<const PerturbationKind> all_kinds() { return kAllKinds; }

void PerturbationSpec::validate() const {
  if (!(char_prob >= 0.0 && char_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidPerturbationSpec,
                "char_prob must lie in [0, 1]");
  }
  if (!(add_ratio >= 0.0) || !std::isfinite(add_ratio)) {
    throw Error(ErrorCode::kInvalidPerturbationSpec, "add_ratio must be >= 0");
  }
  if (swap_pairs < 1) {
    throw Error(ErrorCode::kInvalidPerturbationSpec, "swap_pairs must be >= 1");
  }
}

Fields parse_fields(std::string_view name) {
  if (name == "a") return Fields::kA;
  if (name == "b") return Fields::kB;
  if (name == "both") return Fields::kBoth;
  throw Error(ErrorCode::kInvalidPerturbationSpec,
              "fields must be a, b or both");
}

std::size_t insertion_count(double add_ratio, std::size_t n_tokens) {
  const double product = add_ratio * static_cast<double>(n_tokens);
  const double nearest = std::nearbyint(product);
  if (std::abs(product - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(product));
}

Perturber::Perturber(PerturbationSpec spec, const GenderLexicon& gender,
                     std::span<const std::string> distractors,
                     const PosLexicon& pos, const PretaggedCorpus* pretagged)
    : spec_(spec),
      gender_(gender),
      distractors_(distractors),
      pos_(pos),
      pretagged_(pretagged) {
  spec_.validate();
  if (spec_.kind == PerturbationKind::kAddText && distractors_.empty()) {
    throw Error(ErrorCode::kEmptyDistractorList,
                "add_text needs a non-empty distractor list");
  }
}

std::vector<Token> Perturber::tagged_tokens(std::string_view text,
                                            std::string_view record_id,
                                            char field) const {
  if (pretagged_ != nullptr) {
    if (const auto* tokens = pretagged_->find(record_id, field)) return *tokens;
  }
  return tag_pos(tokenize(text), pos_).tokens;
}

std::string Perturber::apply(std::string_view text, std::string_view record_id,
                             char field) const {
  std::string key(record_id);
  if (field != 'a') {
    key += '\x1f';
    key += field;
  }
  Rng rng(derive_seed(spec_.seed, key));

  switch (spec_.kind) {
    case PerturbationKind::kDropNoun:
      return drop_tagged(text, tagged_tokens(text, record_id, field),
                         PosTag::kNoun);
    case PerturbationKind::kDropVerb:
      return drop_tagged(text, tagged_tokens(text, record_id, field),
                         PosTag::kVerb);
    case PerturbationKind::kDropFirst:
      return drop_first(tokenize(text).tokens);
    case PerturbationKind::kDropLast:
      return drop_last(tokenize(text).tokens);
    case PerturbationKind::kSwapText:
      return swap_text(text, tokenize(text).tokens, spec_.swap_pairs, rng);
    case PerturbationKind::kChangeChar:
      return change_char(text, spec_.char_prob, rng);
    case PerturbationKind::kAddText:
      return add_text(text, tokenize(text).tokens, spec_.add_ratio,
                      distractors_, rng);
    case PerturbationKind::kBias:
      return bias(tokenize(text), gender_);
  }
  return std::string(text);
}

std::string apply(std::string_view text, const PerturbationSpec& spec,
                  const GenderLexicon& gender,
                  std::span<const std::string> distractors,
                  std::string_view record_id) {
  return Perturber(spec, gender, distractors).apply(text, record_id);
}

dataio::LabeledDataset perturb_dataset(const dataio::LabeledDataset& ds,
                                       const Perturber& perturber,
                                       Fields fields, unsigned threads) {
  std::vector<dataio::Record> records = ds.records();
  const bool do_a = fields != Fields::kB;
  const bool do_b = fields != Fields::kA;
  parallel_for(records.size(), threads, [&](std::size_t i) {
    auto& rec = records[i];
    if (do_a) rec.text_a = perturber.apply(rec.text_a, rec.id, 'a');
    if (do_b && rec.text_b) rec.text_b = perturber.apply(*rec.text_b, rec.id, 'b');
  });
  return dataio::LabeledDataset(std::move(records), ds.task());
}

}  // namespace robustkit::perturb
