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

#ifndef URALPROBE_TOKENIZE_HPP_
#define URALPROBE_TOKENIZE_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace uralprobe {

enum class VocabKind {
  kWordPiece,          // BERT family: "##" continuation, whole word -> [UNK]
  kSentencePieceLike,  // XLM-R family: "▁" word start, unknown chars deleted
};

struct VocabMarkers {
  std::string continuation = "##";
  std::string word_begin = "▁";
  std::string unk;  // empty: "[UNK]" for WordPiece, "<unk>" otherwise

  static VocabMarkers defaults(VocabKind kind);
};

// Words longer than this many characters always segment to the unk piece.
inline constexpr std::size_t kMaxWordChars = 512;

class Vocabulary {
 public:
  // Throws InvalidArgument on duplicate pieces or a missing unk piece.
  Vocabulary(std::vector<std::string> pieces, VocabKind kind,
             VocabMarkers markers);

  // WordPiece files hold one piece per line; SentencePiece-style files hold
  // "piece<TAB>score" rows (scores are ignored).
  static Vocabulary load(const std::filesystem::path& path, VocabKind kind,
                         VocabMarkers markers);
  static Vocabulary parse(std::string_view text, VocabKind kind,
                          VocabMarkers markers);

  VocabKind kind() const { return kind_; }
  const VocabMarkers& markers() const { return markers_; }
  const std::string& unk_piece() const { return markers_.unk; }
  std::span<const std::string> pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }

  bool contains(std::string_view piece) const;
  bool covers(char32_t c) const { return alphabet_.contains(c); }
  const std::unordered_set<char32_t>& alphabet() const { return alphabet_; }

  // Length in bytes of the longest piece; bounds the match search.
  std::size_t max_piece_bytes() const { return max_piece_bytes_; }

  // Piece text with its marker removed.
  std::string_view strip_marker(std::string_view piece) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> pieces_;
  VocabKind kind_;
  VocabMarkers markers_;
  std::unordered_set<std::string, Hash, std::equal_to<>> index_;
  std::unordered_set<char32_t> alphabet_;
  std::size_t max_piece_bytes_ = 0;
};

struct Segmentation {
  std::string word;
  std::vector<std::string> pieces;
  bool is_unk = false;
  std::size_t deleted_chars = 0;

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

// Greedy longest-match-first, left to right. Any position without a match
// turns the whole word into the unk piece. Throws InvalidArgument for an empty
// word or one containing whitespace.
Segmentation wordpiece_segment(const Vocabulary& vocab, std::string_view word);

// Deletes characters outside the alphabet, then segments the residue greedily
// with the word-begin marker on the first piece. A residue character that no
// piece can start with is deleted as well. An empty residue is the unk piece.
Segmentation splike_segment(const Vocabulary& vocab, std::string_view word);

// Dispatches on vocab.kind().
Segmentation segment(const Vocabulary& vocab, std::string_view word);

struct TokenizerStats {
  std::size_t types = 0;
  std::size_t unk_types = 0;
  double missing_rate = 0.0;
  // Undefined (nullopt) when every type is unknown.
  std::optional<double> mean_subword_len;
  std::optional<double> std_subword_len;
  std::optional<double> mean_char_len;
  std::optional<double> fertility;
};

// Statistics over distinct word types. Length and fertility figures use
// non-UNK types only; subword length is measured in characters with markers
// stripped, and its deviation is the population standard deviation.
TokenizerStats tokenizer_stats(const Vocabulary& vocab,
                               std::span<const std::string> types);

// CSV header matching the row labels of the usual tokenizer comparison table.
std::string stats_csv_header();
std::string stats_csv_row(std::string_view language, std::string_view model,
                          std::size_t vocab_size, const TokenizerStats& stats);

}  // namespace uralprobe

#endif  // URALPROBE_TOKENIZE_HPP_
