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

#include "uralprobe/tokenize.hpp"

#include <cmath>
#include <sstream>

#include "uralprobe/corpus.hpp"
#include "uralprobe/error.hpp"
#include "uralprobe/unicode.hpp"

namespace uralprobe {
namespace {

void check_word(std::string_view word) {
  if (word.empty()) throw InvalidArgument("cannot segment an empty word");
  for (char32_t c : unicode::decode(word)) {
    if (unicode::is_whitespace(c)) {
      throw InvalidArgument("word contains whitespace: '" + std::string(word) +
                            "'");
    }
  }
}

Segmentation unk_segmentation(const Vocabulary& vocab, std::string_view word,
                              std::size_t deleted = 0) {
  return Segmentation{std::string(word), {vocab.unk_piece()}, true, deleted};
}

std::string format_optional(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream out;
  out.precision(6);
  out << *v;
  return out.str();
}

}  // namespace

VocabMarkers VocabMarkers::defaults(VocabKind kind) {
  VocabMarkers m;
  m.unk = kind == VocabKind::kWordPiece ? "[UNK]" : "<unk>";
  return m;
}

Vocabulary::Vocabulary(std::vector<std::string> pieces, VocabKind kind,
                       VocabMarkers markers)
    : pieces_(std::move(pieces)), kind_(kind), markers_(std::move(markers)) {
  if (markers_.unk.empty()) markers_.unk = VocabMarkers::defaults(kind).unk;
  index_.reserve(pieces_.size());
  for (const std::string& p : pieces_) {
    if (!index_.insert(p).second) {
      throw InvalidArgument("duplicate vocabulary piece '" + p + "'");
    }
    max_piece_bytes_ = std::max(max_piece_bytes_, p.size());
    for (char32_t c : unicode::decode(strip_marker(p))) alphabet_.insert(c);
  }
  if (!index_.contains(markers_.unk)) {
    throw InvalidArgument("vocabulary lacks the unknown piece '" +
                          markers_.unk + "'");
  }
}

Vocabulary Vocabulary::parse(std::string_view text, VocabKind kind,
                             VocabMarkers markers) {
  unicode::validate_utf8(text);
  std::vector<std::string> pieces;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (kind == VocabKind::kSentencePieceLike) {
      const std::size_t tab = line.find('\t');
      if (tab != std::string_view::npos) line = line.substr(0, tab);
    }
    if (line.empty()) {
      throw ParseError("empty vocabulary entry", line_no);
    }
    pieces.emplace_back(line);
  }
  return Vocabulary(std::move(pieces), kind, std::move(markers));
}

Vocabulary Vocabulary::load(const std::filesystem::path& path, VocabKind kind,
                            VocabMarkers markers) {
  return parse(read_file(path), kind, std::move(markers));
}

bool Vocabulary::contains(std::string_view piece) const {
  return index_.find(piece) != index_.end();
}

std::string_view Vocabulary::strip_marker(std::string_view piece) const {
  const std::string& marker = kind_ == VocabKind::kWordPiece
                                  ? markers_.continuation
                                  : markers_.word_begin;
  if (!marker.empty() && piece.starts_with(marker)) {
    piece.remove_prefix(marker.size());
  }
  return piece;
}

Segmentation wordpiece_segment(const Vocabulary& vocab, std::string_view word) {
  check_word(word);
  const std::vector<std::size_t> bounds = unicode::char_boundaries(word);
  const std::size_t n = bounds.size() - 1;
  if (n > kMaxWordChars) return unk_segmentation(vocab, word);

  const std::string& marker = vocab.markers().continuation;
  Segmentation seg;
  seg.word = std::string(word);
  std::string candidate;
  std::size_t start = 0;
  while (start < n) {
    bool found = false;
    for (std::size_t end = n; end > start; --end) {
      const std::size_t bytes = bounds[end] - bounds[start];
      const std::size_t prefix = start == 0 ? 0 : marker.size();
      if (bytes + prefix > vocab.max_piece_bytes()) continue;
      candidate.assign(start == 0 ? std::string_view{} : marker);
      candidate.append(word.substr(bounds[start], bytes));
      if (vocab.contains(candidate)) {
        seg.pieces.push_back(candidate);
        start = end;
        found = true;
        break;
      }
    }
    if (!found) return unk_segmentation(vocab, word);
  }
  return seg;
}

Segmentation splike_segment(const Vocabulary& vocab, std::string_view word) {
  check_word(word);
  const std::vector<char32_t> chars = unicode::decode(word);
  if (chars.size() > kMaxWordChars) return unk_segmentation(vocab, word);

  std::string residue;
  std::size_t deleted = 0;
  for (char32_t c : chars) {
    if (vocab.covers(c)) {
      residue += unicode::encode(c);
    } else {
      ++deleted;
    }
  }

  const std::string& marker = vocab.markers().word_begin;
  const std::vector<std::size_t> bounds = unicode::char_boundaries(residue);
  const std::size_t n = bounds.size() - 1;

  auto longest_match = [&](std::size_t start,
                           std::string_view prefix) -> std::size_t {
    std::string candidate;
    for (std::size_t end = n; end > start; --end) {
      const std::size_t bytes = bounds[end] - bounds[start];
      if (bytes + prefix.size() > vocab.max_piece_bytes()) continue;
      candidate.assign(prefix);
      candidate.append(residue, bounds[start], bytes);
      if (vocab.contains(candidate)) return end;
    }
    return start;
  };

  Segmentation seg;
  seg.word = std::string(word);
  bool need_marker = !marker.empty();
  std::size_t start = 0;
  while (start < n) {
    if (need_marker) {
      const std::size_t end = longest_match(start, marker);
      if (end > start) {
        seg.pieces.push_back(marker +
                             residue.substr(bounds[start], bounds[end] - bounds[start]));
        start = end;
        need_marker = false;
        continue;
      }
      if (vocab.contains(marker)) {
        seg.pieces.push_back(marker);
        need_marker = false;
        continue;
      }
    }
    const std::size_t end = longest_match(start, {});
    if (end > start) {
      seg.pieces.push_back(
          residue.substr(bounds[start], bounds[end] - bounds[start]));
      start = end;
      need_marker = false;
    } else {
      ++deleted;
      ++start;
    }
  }
  // A lone marker piece carries no characters of the word.
  const bool empty = seg.pieces.empty() ||
                     (seg.pieces.size() == 1 && seg.pieces[0] == marker);
  if (empty) return unk_segmentation(vocab, word, chars.size());
  seg.deleted_chars = deleted;
  return seg;
}

Segmentation segment(const Vocabulary& vocab, std::string_view word) {
  return vocab.kind() == VocabKind::kWordPiece ? wordpiece_segment(vocab, word)
                                               : splike_segment(vocab, word);
}

TokenizerStats tokenizer_stats(const Vocabulary& vocab,
                               std::span<const std::string> types) {
  if (types.empty()) throw InvalidArgument("type list is empty");
  std::unordered_set<std::string_view> seen;
  seen.reserve(types.size());

  TokenizerStats stats;
  stats.types = types.size();
  std::size_t known = 0;
  std::size_t piece_total = 0;
  std::size_t char_total = 0;
  std::vector<double> lengths;
  for (const std::string& type : types) {
    if (!seen.insert(type).second) {
      throw InvalidArgument("duplicate word type '" + type + "'");
    }
    const Segmentation seg = segment(vocab, type);
    if (seg.is_unk) {
      ++stats.unk_types;
      continue;
    }
    ++known;
    char_total += unicode::char_count(type);
    piece_total += seg.pieces.size();
    for (const std::string& piece : seg.pieces) {
      lengths.push_back(static_cast<double>(
          unicode::char_count(vocab.strip_marker(piece))));
    }
  }
  stats.missing_rate =
      static_cast<double>(stats.unk_types) / static_cast<double>(stats.types);
  if (known > 0) {
    const auto pieces = static_cast<double>(piece_total);
    double sum = 0.0;
    for (double len : lengths) sum += len;
    const double mean = sum / pieces;
    double sq = 0.0;
    for (double len : lengths) sq += (len - mean) * (len - mean);
    stats.mean_subword_len = mean;
    stats.std_subword_len = std::sqrt(sq / pieces);
    stats.mean_char_len =
        static_cast<double>(char_total) / static_cast<double>(known);
    stats.fertility = pieces / static_cast<double>(known);
  }
  return stats;
}

std::string stats_csv_header() {
  return "language,model,vocab_size,types,missing_pct,subword_length_mean,"
         "subword_length_std,character_length,fertility";
}

std::string stats_csv_row(std::string_view language, std::string_view model,
                          std::size_t vocab_size, const TokenizerStats& stats) {
  std::ostringstream out;
  out << language << ',' << model << ',' << vocab_size << ',' << stats.types
      << ',' << format_optional(stats.missing_rate * 100.0) << ','
      << format_optional(stats.mean_subword_len) << ','
      << format_optional(stats.std_subword_len) << ','
      << format_optional(stats.mean_char_len) << ','
      << format_optional(stats.fertility);
  return out.str();
}

}  // namespace uralprobe
