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

#ifndef URALPROBE_UNICODE_HPP_
#define URALPROBE_UNICODE_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace uralprobe::unicode {

// Throws EncodingError on the first invalid sequence.
void validate_utf8(std::string_view text);

bool is_valid_utf8(std::string_view text);

// Byte offsets of each code point start, plus text.size() as the final entry.
std::vector<std::size_t> char_boundaries(std::string_view text);

std::vector<char32_t> decode(std::string_view text);
std::string encode(char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

std::size_t char_count(std::string_view text);

// Full Unicode case folding.
std::string fold_case(std::string_view text);

bool is_whitespace(char32_t cp);

// Removes diacritics: each code point whose canonical decomposition contains
// combining marks is replaced by the decomposition without the marks, bare
// combining marks are dropped, and the stroke letters that have no
// decomposition are folded (đ->d, ŧ->t, ŋ->n and capitals). Anything else is
// copied through unchanged, including invalid byte sequences.
std::string strip_diacritics(std::string_view text);

}  // namespace uralprobe::unicode

#endif  // URALPROBE_UNICODE_HPP_
