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

#include "uralprobe/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstdint>

#include "uralprobe/error.hpp"

namespace uralprobe::unicode {
namespace {

// Decodes one code point at offset i; returns a negative value on invalid
// input and advances i past the offending bytes either way.
UChar32 next_code_point(std::string_view text, std::size_t& i) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  auto pos = static_cast<std::int32_t>(i);
  UChar32 c = 0;
  U8_NEXT(s, pos, length, c);
  i = static_cast<std::size_t>(pos);
  return c;
}

bool is_mark(UChar32 c) {
  const auto mask = U_GET_GC_MASK(c);
  return (mask & U_GC_M_MASK) != 0;
}

char32_t fold_stroke_letter(char32_t c) {
  switch (c) {
    case U'đ': return U'd';
    case U'Đ': return U'D';
    case U'ŧ': return U't';
    case U'Ŧ': return U'T';
    case U'ŋ': return U'n';
    case U'Ŋ': return U'N';
    default: return c;
  }
}

const icu::Normalizer2& nfd() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status) || norm == nullptr) {
    throw Error("ICU NFD normalizer unavailable");
  }
  return *norm;
}

}  // namespace

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (next_code_point(text, i) < 0) return false;
  }
  return true;
}

void validate_utf8(std::string_view text) {
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < text.size()) {
    const std::size_t start = i;
    const UChar32 c = next_code_point(text, i);
    if (c < 0) {
      throw EncodingError("invalid UTF-8 at byte " + std::to_string(start) +
                          " (line " + std::to_string(line) + ")");
    }
    if (c == '\n') ++line;
  }
}

std::vector<std::size_t> char_boundaries(std::string_view text) {
  std::vector<std::size_t> out;
  out.reserve(text.size() + 1);
  std::size_t i = 0;
  while (i < text.size()) {
    out.push_back(i);
    next_code_point(text, i);
  }
  out.push_back(text.size());
  return out;
}

std::vector<char32_t> decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const UChar32 c = next_code_point(text, i);
    if (c < 0) throw EncodingError("invalid UTF-8 sequence");
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string encode(char32_t cp) {
  std::uint8_t buf[U8_MAX_LENGTH];
  std::int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) throw EncodingError("cannot encode code point");
  return std::string(reinterpret_cast<const char*>(buf),
                     static_cast<std::size_t>(len));
}

std::string encode(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t c : cps) out += encode(c);
  return out;
}

std::size_t char_count(std::string_view text) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    next_code_point(text, i);
    ++n;
  }
  return n;
}

std::string fold_case(std::string_view text) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
  u.foldCase();
  std::string out;
  u.toUTF8String(out);
  return out;
}

bool is_whitespace(char32_t cp) {
  return u_isUWhiteSpace(static_cast<UChar32>(cp)) != 0;
}

std::string strip_diacritics(std::string_view text) {
  const icu::Normalizer2& norm = nfd();
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    const UChar32 c = next_code_point(text, i);
    if (c < 0) {
      out.append(text.substr(start, i - start));
      continue;
    }
    if (is_mark(c)) continue;

    icu::UnicodeString decomposition;
    bool has_mark = false;
    if (norm.getDecomposition(c, decomposition)) {
      for (std::int32_t k = 0; k < decomposition.length();) {
        const UChar32 d = decomposition.char32At(k);
        if (is_mark(d)) has_mark = true;
        k += U16_LENGTH(d);
      }
    }
    if (!has_mark) {
      out += encode(fold_stroke_letter(static_cast<char32_t>(c)));
      continue;
    }
    for (std::int32_t k = 0; k < decomposition.length();) {
      const UChar32 d = decomposition.char32At(k);
      if (!is_mark(d)) out += encode(fold_stroke_letter(static_cast<char32_t>(d)));
      k += U16_LENGTH(d);
    }
  }
  return out;
}

}  // namespace uralprobe::unicode
