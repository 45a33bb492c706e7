// Copyright 2026 The uralprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef URALPROBE_CORPUS_HPP_
#define URALPROBE_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uralprobe {

struct Token {
  std::string form;
  std::optional<std::string> lemma;
  std::optional<std::string> upos;
  std::map<std::string, std::string> feats;
  std::optional<std::string> ner;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::string id;
  std::vector<Token> tokens;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Treebank {
  std::string language;
  std::vector<Sentence> sentences;
};

// One probing target: a token inside a sentence together with its label.
struct ProbingInstance {
  std::string sentence_id;
  std::size_t target = 0;
  std::string label;
  std::string form;

  friend bool operator==(const ProbingInstance&, const ProbingInstance&) =
      default;
};

// Language codes of the evaluated Uralic treebanks.
std::span<const std::string_view> known_languages();
bool is_known_language(std::string_view code);

// Parses CoNLL-U. Multiword range lines (1-2) and empty nodes (3.1) are
// skipped, so each sentence holds syntactic words only. Sentence ids are
// "<source>:<index>" with a 0-based block index.
//
// Throws ParseError (with line number) for rows without 10 columns or with a
// malformed FEATS column, EncodingError for invalid UTF-8.
std::vector<Sentence> parse_conllu(std::string_view text,
                                   std::string_view source = "conllu");

// Parses WikiAnn "token<TAB>tag" lines. A leading "xx:" language prefix on
// the token is removed. Tags must be O, B-X or I-X with X in [A-Z]+; I-X after
// O is kept as-is here and repaired at span extraction time.
std::vector<Sentence> parse_wikiann(std::string_view text,
                                    std::string_view source = "wikiann");

// BIO tag grammar: O | (B|I)-[A-Z]+
bool is_bio_tag(std::string_view tag);

// Parses FEATS "Key=Value|Key=Value" ("_" means empty).
std::map<std::string, std::string> parse_feats(std::string_view feats);
std::string format_feats(const std::map<std::string, std::string>& feats);

// Writes ID, FORM, LEMMA, UPOS and FEATS; other columns are "_".
std::string to_conllu(std::span<const Sentence> sentences);

enum class CorpusFormat { kConllu, kWikiann };

// Reads and parses a file. Unknown language codes are accepted with a warning
// on stderr.
Treebank load_treebank(const std::filesystem::path& path,
                       std::string_view language, CorpusFormat format);

std::vector<ProbingInstance> extract_morph_instances(const Treebank& tb,
                                                     std::string_view feature,
                                                     std::string_view upos);

// Reads a whole file into memory; throws Error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace uralprobe

#endif  // URALPROBE_CORPUS_HPP_
