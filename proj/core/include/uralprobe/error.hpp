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

#ifndef URALPROBE_ERROR_HPP_
#define URALPROBE_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uralprobe {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input (CoNLL-U, WikiAnn, vocabulary files, JSON-lines).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  explicit ParseError(const std::string& what) : ParseError(what, 0) {}

  // 1-based line number, 0 when not applicable.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

// Binary container problems: bad magic, unsupported layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Binary container ended before the declared payload.
class LengthError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Structural invariant violated (alignment ranges, dimension mismatch).
class ValidationError : public FormatError {
 public:
  using FormatError::FormatError;
};

// A dataset cannot be built under the requested sizes and constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace uralprobe

#endif  // URALPROBE_ERROR_HPP_
