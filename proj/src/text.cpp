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

#include "robustkit/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "robustkit/error.hpp"

namespace robustkit::perturb {

namespace detail {
extern const std::string_view kBuiltinPosLexicon;
}  // namespace detail

namespace {

constexpr std::string_view kEdgePunctuation = ".,!?;:\"'()[]";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_edge_punct(char c) {
  return kEdgePunctuation.find(c) != std::string_view::npos;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

std::string add_s(std::string_view w, bool verb) {
  std::string out(w);
  if (ends_with(w, "s") || ends_with(w, "x") || ends_with(w, "z") ||
      ends_with(w, "ch") || ends_with(w, "sh") || (verb && ends_with(w, "o"))) {
    return out + "es";
  }
  if (w.size() >= 2 && w.back() == 'y' && !is_vowel(w[w.size() - 2])) {
    out.pop_back();
    return out + "ies";
  }
  return out + "s";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line,
                                           bool tabs_only) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (tabs_only) {
      auto tab = line.find('\t', i);
      if (tab == std::string_view::npos) tab = line.size();
      out.push_back(line.substr(i, tab - i));
      i = tab + 1;
      continue;
    }
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

PosTag map_external_tag(std::string_view raw) {
  std::string tag(raw);
  std::transform(tag.begin(), tag.end(), tag.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (tag == "NOUN" || tag == "PROPN" || tag.rfind("NN", 0) == 0) {
    return PosTag::kNoun;
  }
  if (tag == "VERB" || tag == "AUX" || tag.rfind("VB", 0) == 0) {
    return PosTag::kVerb;
  }
  return PosTag::kOther;
}

}  // namespace

std::string_view pos_name(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun:
      return "NOUN";
    case PosTag::kVerb:
      return "VERB";
    case PosTag::kOther:
      return "OTHER";
  }
  return "OTHER";
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  out.original = std::string(text);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;

    std::size_t lo = i;
    std::size_t hi = end;
    while (lo < hi && is_edge_punct(text[lo])) {
      out.tokens.push_back({std::string(1, text[lo]), std::nullopt, lo});
      ++lo;
    }
    std::size_t trail = hi;
    while (trail > lo && is_edge_punct(text[trail - 1])) --trail;
    if (trail > lo) {
      out.tokens.push_back(
          {std::string(text.substr(lo, trail - lo)), std::nullopt, lo});
    }
    for (std::size_t p = trail; p < hi; ++p) {
      out.tokens.push_back({std::string(1, text[p]), std::nullopt, p});
    }
    i = end;
  }
  return out;
}

std::string detokenize(std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i].surface;
  }
  return out;
}

bool is_punctuation_token(std::string_view surface) {
  if (surface.empty()) return false;
  return std::all_of(surface.begin(), surface.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && std::ispunct(u);
  });
}

PosLexicon PosLexicon::parse(std::string_view source) {
  PosLexicon lex;
  std::vector<std::pair<std::string, PosTag>> derivable;
  std::optional<PosTag> section;
  for (auto line : split_lines(source)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '@') {
      const auto name = line.substr(1);
      if (name == "NOUN") section = PosTag::kNoun;
      else if (name == "VERB") section = PosTag::kVerb;
      else if (name == "OTHER") section = PosTag::kOther;
      else {
        throw Error(ErrorCode::kInvalidLexicon,
                    "unknown lexicon section '" + std::string(name) + "'");
      }
      continue;
    }
    if (!section) {
      throw Error(ErrorCode::kInvalidLexicon, "word before any @TAG section");
    }
    for (auto word : split_fields(line, false)) {
      auto lower = ascii_lower(word);
      if (!lex.entries_.emplace(lower, *section).second) {
        throw Error(ErrorCode::kInvalidLexicon,
                    "word '" + lower + "' listed twice");
      }
      if (*section != PosTag::kOther) derivable.emplace_back(lower, *section);
    }
  }
  lex.explicit_count_ = lex.entries_.size();
  for (const auto& [word, tag] : derivable) {
    lex.entries_.emplace(add_s(word, tag == PosTag::kVerb), tag);
  }
  return lex;
}

const PosLexicon& PosLexicon::builtin() {
  static const PosLexicon lex = parse(detail::kBuiltinPosLexicon);
  return lex;
}

std::optional<PosTag> PosLexicon::lookup(std::string_view lower_word) const {
  const auto it = entries_.find(std::string(lower_word));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

PosTag tag_word(std::string_view surface, const PosLexicon& lexicon) {
  if (std::none_of(surface.begin(), surface.end(), is_alpha)) {
    return PosTag::kOther;
  }
  const std::string w = ascii_lower(surface);
  if (auto tag = lexicon.lookup(w)) return *tag;

  for (std::string_view suffix : {"tion", "ness", "ment", "ity"}) {
    if (w.size() > suffix.size() && ends_with(w, suffix)) return PosTag::kNoun;
  }
  for (std::string_view suffix : {"ize", "ate", "ify"}) {
    if (w.size() > suffix.size() && ends_with(w, suffix)) return PosTag::kVerb;
  }

  auto is_verb = [&](const std::string& stem) {
    const auto tag = lexicon.lookup(stem);
    return tag && *tag == PosTag::kVerb;
  };
  std::vector<std::string> stems;
  if (w.size() > 3 && ends_with(w, "ed")) {
    const std::string base = w.substr(0, w.size() - 2);
    stems.push_back(base);                        // walked -> walk
    stems.push_back(w.substr(0, w.size() - 1));   // moved -> move
    if (base.size() >= 2 && base.back() == base[base.size() - 2]) {
      stems.push_back(base.substr(0, base.size() - 1));  // stopped -> stop
    }
    if (ends_with(w, "ied")) {
      stems.push_back(w.substr(0, w.size() - 3) + "y");  // carried -> carry
    }
  } else if (w.size() > 4 && ends_with(w, "ing")) {
    const std::string base = w.substr(0, w.size() - 3);
    stems.push_back(base);        // walking -> walk
    stems.push_back(base + "e");  // moving -> move
    if (base.size() >= 2 && base.back() == base[base.size() - 2]) {
      stems.push_back(base.substr(0, base.size() - 1));  // running -> run
    }
  }
  if (std::any_of(stems.begin(), stems.end(), is_verb)) return PosTag::kVerb;
  return PosTag::kOther;
}

TokenizedText tag_pos(TokenizedText text, const PosLexicon& lexicon) {
  for (auto& token : text.tokens) token.pos = tag_word(token.surface, lexicon);
  return text;
}

PretaggedCorpus PretaggedCorpus::parse(std::string_view source) {
  PretaggedCorpus corpus;
  std::string id;
  char field = 'a';
  std::vector<Token> tokens;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (!tokens.empty()) {
      if (id.empty()) {
        throw Error(ErrorCode::kInvalidLexicon,
                    "CoNLL block ending at line " + std::to_string(line_no) +
                        " has no '# sent_id'");
      }
      if (!corpus.sentences_.emplace(std::make_pair(id, field), tokens).second) {
        throw Error(ErrorCode::kInvalidLexicon,
                    "duplicate CoNLL block for '" + id + "'");
      }
    }
    tokens.clear();
    id.clear();
    field = 'a';
  };

  for (auto line : split_lines(source)) {
    ++line_no;
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = trim(body.substr(0, eq));
      const auto value = trim(body.substr(eq + 1));
      if (key == "sent_id") {
        id = std::string(value);
      } else if (key == "field") {
        if (value != "a" && value != "b") {
          throw Error(ErrorCode::kInvalidLexicon,
                      "line " + std::to_string(line_no) + ": field must be a or b");
        }
        field = value.front();
      }
      continue;
    }
    auto cols = split_fields(line, true);
    if (cols.size() < 10) cols = split_fields(line, false);
    std::string_view form;
    std::string_view tag;
    if (cols.size() >= 10) {
      // CoNLL-U; multiword ranges ("3-4") and empty nodes ("5.1") skipped.
      if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
      form = cols[1];
      tag = cols[3];
    } else if (cols.size() == 2) {
      form = cols[0];
      tag = cols[1];
    } else {
      throw Error(ErrorCode::kInvalidLexicon,
                  "line " + std::to_string(line_no) +
                      ": expected 'FORM TAG' or 10 CoNLL-U columns");
    }
    tokens.push_back({std::string(form), map_external_tag(tag), 0});
  }
  flush();
  return corpus;
}

PretaggedCorpus PretaggedCorpus::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

const std::vector<Token>* PretaggedCorpus::find(std::string_view record_id,
                                                char field) const {
  const auto it = sentences_.find({std::string(record_id), field});
  return it == sentences_.end() ? nullptr : &it->second;
}

GenderLexicon::GenderLexicon(
    std::span<const std::pair<std::string, std::string>> pairs) {
  for (const auto& [raw_a, raw_b] : pairs) {
    const auto a = ascii_lower(raw_a);
    const auto b = ascii_lower(raw_b);
    if (a.empty() || b.empty() || a == b) {
      throw Error(ErrorCode::kInvalidLexicon,
                  "invalid gender pair '" + raw_a + "' / '" + raw_b + "'");
    }
    for (const auto& w : {a, b}) {
      if (mapping_.count(w)) {
        throw Error(ErrorCode::kInvalidLexicon,
                    "word '" + w + "' appears in two gender pairs");
      }
    }
    mapping_.emplace(a, b);
    mapping_.emplace(b, a);
  }
}

const GenderLexicon& GenderLexicon::builtin() {
  static const std::vector<std::pair<std::string, std::string>> kPairs = {
      {"he", "she"},
      {"him", "her"},
      {"his", "hers"},
      {"himself", "herself"},
      {"man", "woman"},
      {"men", "women"},
      {"boy", "girl"},
      {"boys", "girls"},
      {"father", "mother"},
      {"fathers", "mothers"},
      {"son", "daughter"},
      {"sons", "daughters"},
      {"husband", "wife"},
      {"husbands", "wives"},
      {"mr", "mrs"},
      {"king", "queen"},
      {"kings", "queens"},
      {"brother", "sister"},
      {"brothers", "sisters"},
      {"uncle", "aunt"},
      {"uncles", "aunts"},
      {"actor", "actress"},
      {"actors", "actresses"},
      {"nephew", "niece"},
      {"nephews", "nieces"},
      {"gentleman", "lady"},
      {"gentlemen", "ladies"},
      {"prince", "princess"},
      {"princes", "princesses"},
      {"grandfather", "grandmother"},
      {"grandson", "granddaughter"},
      {"boyfriend", "girlfriend"},
      {"groom", "bride"},
      {"sir", "madam"},
      {"male", "female"},
      {"males", "females"},
      {"dad", "mom"},
      {"daddy", "mommy"},
      {"grandpa", "grandma"},
      {"waiter", "waitress"},
      {"hero", "heroine"},
      {"god", "goddess"},
      {"monk", "nun"},
      {"widower", "widow"},
      {"stepfather", "stepmother"},
      {"policeman", "policewoman"},
      {"policemen", "policewomen"},
      {"businessman", "businesswoman"},
      {"chairman", "chairwoman"},
      {"spokesman", "spokeswoman"},
  };
  static const GenderLexicon lex(kPairs);
  return lex;
}

GenderLexicon GenderLexicon::load_tsv(const std::filesystem::path& path) {
  const auto text = read_file(path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto cols = split_fields(line, true);
    if (cols.size() != 2) {
      throw Error(ErrorCode::kInvalidLexicon,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected two tab-separated words");
    }
    pairs.emplace_back(std::string(trim(cols[0])), std::string(trim(cols[1])));
  }
  return GenderLexicon(pairs);
}

std::optional<std::string_view> GenderLexicon::swap(
    std::string_view lower_word) const {
  const auto it = mapping_.find(std::string(lower_word));
  if (it == mapping_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::string> default_distractors() {
  static const std::array<std::string, 64> kWords = {
      "trouble", "state",   "table",   "window",  "river",   "paper",
      "number",  "system",  "moment",  "color",   "stone",   "cloud",
      "garden",  "market",  "corner",  "street",  "minute",  "letter",
      "bridge",  "forest",  "morning", "island",  "metal",   "circle",
      "engine",  "signal",  "pocket",  "village", "season",  "ladder",
      "bottle",  "basket",  "pencil",  "button",  "mirror",  "carpet",
      "ticket",  "wallet",  "planet",  "pattern", "lesson",  "surface",
      "channel", "harbor",  "blanket", "kettle",  "rabbit",  "saddle",
      "anchor",  "lantern", "marble",  "pillow",  "compass", "gravel",
      "meadow",  "cabinet", "tunnel",  "spoon",   "needle",  "feather",
      "valley",  "harvest", "record",  "square",
  };
  return kWords;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  const auto text = read_file(path);
  std::vector<std::string> words;
  for (auto line : split_lines(text)) {
    line = trim(line);
    if (!line.empty()) words.emplace_back(line);
  }
  return words;
}

}  // namespace robustkit::perturb
