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

#ifndef ROBUSTKIT_TEXT_HPP_
#define ROBUSTKIT_TEXT_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

// Word-level text handling for the perturbation operators: tokenizer,
// a lexicon + suffix-rule part-of-speech tagger, the gender-swap lexicon
// and the distractor vocabulary.

namespace robustkit::perturb {

enum class PosTag { kNoun, kVerb, kOther };

std::string_view pos_name(PosTag tag);

struct Token {
  std::string surface;
  std::optional<PosTag> pos;
  // Byte offset of the token in the original text.
  std::size_t offset = 0;
};

struct TokenizedText {
  std::vector<Token> tokens;
  std::string original;
};

// Splits on ASCII whitespace, then peels the characters .,!?;:"'()[] off
// both ends of each chunk as one-character tokens. Interior apostrophes
// and hyphens stay attached ("state-of-the-art.", "Jon's").
TokenizedText tokenize(std::string_view text);

// Canonical detokenization: surfaces joined by single spaces.
std::string detokenize(std::span<const Token> tokens);

// True when every byte is ASCII punctuation (".", "``", "--", ...).
bool is_punctuation_token(std::string_view surface);

std::string ascii_lower(std::string_view s);

class PosLexicon {
 public:
  // The embedded lexicon, parsed once.
  static const PosLexicon& builtin();

  // "@NOUN" / "@VERB" / "@OTHER" section headers followed by
  // whitespace-separated words; "#" starts a comment line. Regular noun
  // plurals and verb third-person forms are derived unless listed.
  // Throws kInvalidLexicon on a word listed twice.
  static PosLexicon parse(std::string_view source);

  std::optional<PosTag> lookup(std::string_view lower_word) const;
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t explicit_size() const noexcept { return explicit_count_; }

 private:
  std::unordered_map<std::string, PosTag> entries_;
  std::size_t explicit_count_ = 0;
};

// Lexicon lookup on the lowercased form, then suffix heuristics:
// -tion/-ness/-ment/-ity -> NOUN; -ize/-ate/-ify -> VERB; -ed/-ing forms
// whose stem is a lexicon verb -> VERB; everything else (including
// punctuation and numbers) -> OTHER.
PosTag tag_word(std::string_view surface, const PosLexicon& lexicon);

TokenizedText tag_pos(TokenizedText text, const PosLexicon& lexicon);

// Pre-tagged sentences keyed by (record id, field), read from CoNLL-style
// input. Blocks are separated by blank lines; "# sent_id = <id>" names the
// record and the optional "# field = a|b" the text field (default a).
// Token lines are either "FORM<TAB>TAG" or 10-column CoNLL-U (FORM in
// column 2, UPOS in column 4). Tags map to NOUN for NOUN/PROPN/NN*,
// VERB for VERB/AUX/VB*, OTHER otherwise.
class PretaggedCorpus {
 public:
  static PretaggedCorpus parse(std::string_view source);
  static PretaggedCorpus load(const std::filesystem::path& path);

  const std::vector<Token>* find(std::string_view record_id,
                                 char field) const;
  std::size_t size() const noexcept { return sentences_.size(); }

 private:
  std::map<std::pair<std::string, char>, std::vector<Token>> sentences_;
};

// Involutive word mapping (he<->she, him<->her, ...). Lookup is on the
// lowercased form.
class GenderLexicon {
 public:
  static const GenderLexicon& builtin();

  // Throws kInvalidLexicon if a word appears in two pairs or pairs with
  // itself.
  explicit GenderLexicon(
      std::span<const std::pair<std::string, std::string>> pairs);

  // TSV, one "word<TAB>word" pair per line; blank lines and "#" comments
  // are skipped.
  static GenderLexicon load_tsv(const std::filesystem::path& path);

  std::optional<std::string_view> swap(std::string_view lower_word) const;
  std::size_t pair_count() const noexcept { return mapping_.size() / 2; }

 private:
  std::unordered_map<std::string, std::string> mapping_;
};

// 64 neutral words inserted by add_text.
std::span<const std::string> default_distractors();

// One word per line; blank lines skipped.
std::vector<std::string> load_word_list(const std::filesystem::path& path);

}  // namespace robustkit::perturb

#endif  // ROBUSTKIT_TEXT_HPP_
