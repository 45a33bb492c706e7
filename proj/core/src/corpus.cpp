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

#include "uralprobe/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <sstream>

#include "uralprobe/error.hpp"
#include "uralprobe/unicode.hpp"

namespace uralprobe {
namespace {

constexpr std::array<std::string_view, 11> kLanguages = {
    "et", "fi", "hu", "myv", "mdf", "krl", "olo", "koi", "kpv", "sme", "sms"};

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Splits into lines, dropping a trailing '\r'.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return lines;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::optional<std::string> optional_column(std::string_view value) {
  if (value == "_") return std::nullopt;
  return std::string(value);
}

std::string make_id(std::string_view source, std::size_t index) {
  return std::string(source) + ":" + std::to_string(index);
}

bool is_upper_ascii(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

}  // namespace

std::span<const std::string_view> known_languages() { return kLanguages; }

bool is_known_language(std::string_view code) {
  return std::find(kLanguages.begin(), kLanguages.end(), code) !=
         kLanguages.end();
}

bool is_bio_tag(std::string_view tag) {
  if (tag == "O") return true;
  if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-') {
    return false;
  }
  return is_upper_ascii(tag.substr(2));
}

std::map<std::string, std::string> parse_feats(std::string_view feats) {
  std::map<std::string, std::string> out;
  if (feats == "_" || feats.empty()) return out;
  for (std::string_view item : split(feats, '|')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
      throw ParseError("malformed feature '" + std::string(item) + "'");
    }
    auto [it, inserted] = out.emplace(std::string(item.substr(0, eq)),
                                      std::string(item.substr(eq + 1)));
    if (!inserted) {
      throw ParseError("duplicate feature '" + it->first + "'");
    }
  }
  return out;
}

std::string format_feats(const std::map<std::string, std::string>& feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto& [key, value] : feats) {
    if (!out.empty()) out += '|';
    out += key;
    out += '=';
    out += value;
  }
  return out;
}

std::vector<Sentence> parse_conllu(std::string_view text,
                                   std::string_view source) {
  unicode::validate_utf8(text);
  std::vector<Sentence> sentences;
  Sentence current;
  auto flush = [&]() {
    if (!current.tokens.empty()) {
      current.id = make_id(source, sentences.size());
      sentences.push_back(std::move(current));
    }
    current = Sentence{};
  };

  const auto lines = lines_of(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = lines[n];
    const std::size_t line_no = n + 1;
    if (is_blank(line)) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;

    const auto cols = split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError("expected 10 tab-separated columns, found " +
                           std::to_string(cols.size()),
                       line_no);
    }
    const std::string_view id = cols[0];
    if (id.empty()) throw ParseError("empty ID column", line_no);
    if (id.find('-') != std::string_view::npos ||
        id.find('.') != std::string_view::npos) {
      continue;
    }
    if (cols[1].empty()) throw ParseError("empty FORM column", line_no);

    Token token;
    token.form = std::string(cols[1]);
    token.lemma = optional_column(cols[2]);
    token.upos = optional_column(cols[3]);
    try {
      token.feats = parse_feats(cols[5]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    current.tokens.push_back(std::move(token));
  }
  flush();
  return sentences;
}

std::vector<Sentence> parse_wikiann(std::string_view text,
                                    std::string_view source) {
  unicode::validate_utf8(text);
  std::vector<Sentence> sentences;
  Sentence current;
  auto flush = [&]() {
    if (!current.tokens.empty()) {
      current.id = make_id(source, sentences.size());
      sentences.push_back(std::move(current));
    }
    current = Sentence{};
  };

  const auto lines = lines_of(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = lines[n];
    const std::size_t line_no = n + 1;
    if (is_blank(line)) {
      flush();
      continue;
    }
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("expected token<TAB>tag", line_no);
    }
    std::string_view form = line.substr(0, tab);
    const std::string_view tag = line.substr(tab + 1);

    // Language prefix "xx:" or "xxx:"; a bare "xx:" with nothing after it is
    // kept literally.
    const std::size_t colon = form.find(':');
    if (colon >= 2 && colon <= 3 && colon + 1 < form.size() &&
        std::all_of(form.begin(), form.begin() + static_cast<std::ptrdiff_t>(colon),
                    [](char c) { return c >= 'a' && c <= 'z'; })) {
      form.remove_prefix(colon + 1);
    }
    if (form.empty()) throw ParseError("empty token", line_no);
    if (!is_bio_tag(tag)) {
      throw ParseError("tag '" + std::string(tag) + "' is not O, B-X or I-X",
                       line_no);
    }
    Token token;
    token.form = std::string(form);
    token.ner = std::string(tag);
    current.tokens.push_back(std::move(token));
  }
  flush();
  return sentences;
}

std::string to_conllu(std::span<const Sentence> sentences) {
  std::ostringstream out;
  for (const Sentence& s : sentences) {
    out << "# sent_id = " << s.id << '\n';
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const Token& t = s.tokens[i];
      out << (i + 1) << '\t' << t.form << '\t' << t.lemma.value_or("_") << '\t'
          << t.upos.value_or("_") << "\t_\t" << format_feats(t.feats)
          << "\t_\t_\t_\t_\n";
    }
    out << '\n';
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Treebank load_treebank(const std::filesystem::path& path,
                       std::string_view language, CorpusFormat format) {
  if (!is_known_language(language)) {
    std::cerr << "warning: language code '" << language
              << "' is not one of the evaluated treebank languages\n";
  }
  const std::string text = read_file(path);
  const std::string source = path.filename().string();
  Treebank tb;
  tb.language = std::string(language);
  tb.sentences = format == CorpusFormat::kConllu ? parse_conllu(text, source)
                                                 : parse_wikiann(text, source);
  return tb;
}

std::vector<ProbingInstance> extract_morph_instances(const Treebank& tb,
                                                     std::string_view feature,
                                                     std::string_view upos) {
  std::vector<ProbingInstance> out;
  for (const Sentence& s : tb.sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const Token& t = s.tokens[i];
      if (!t.upos || *t.upos != upos) continue;
      const auto it = t.feats.find(std::string(feature));
      if (it == t.feats.end()) continue;
      out.push_back(ProbingInstance{s.id, i, it->second, t.form});
    }
  }
  return out;
}

}  // namespace uralprobe
