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

#ifndef URALPROBE_EMBSTORE_HPP_
#define URALPROBE_EMBSTORE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

// ULEMB01 layout (all integers u32 little-endian, floats IEEE-754 binary32
// little-endian):
//
//   magic      8 bytes  "ULEMB01\n"
//   L H S      layer count (embedding layer included), hidden size, sentences
//   meta_len   followed by meta_len bytes of UTF-8 JSON
//   S times:
//     W T        words, content subwords (special tokens are not stored)
//     W x (start, end)   half-open subword range of each word, tiling [0, T)
//     L*T*H floats       layer-major, then subword, then dimension
//
// The metadata key "sentence_ids" (array of S strings) names the dataset
// sentence behind each record.
namespace uralprobe {

inline constexpr std::string_view kEmbeddingMagic{"ULEMB01\n", 8};

struct EmbeddingHeader {
  std::uint32_t layers = 0;
  std::uint32_t hidden = 0;
  std::uint32_t sentences = 0;
  nlohmann::json meta = nlohmann::json::object();
};

struct WordSpan {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  std::uint32_t size() const { return end - begin; }
  friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

class SentenceEmbedding {
 public:
  // Throws ValidationError when the alignment or the value count is invalid.
  SentenceEmbedding(std::uint32_t layers, std::uint32_t subwords,
                    std::uint32_t hidden, std::vector<WordSpan> alignment,
                    std::vector<float> values);

  std::uint32_t layers() const { return layers_; }
  std::uint32_t subwords() const { return subwords_; }
  std::uint32_t hidden() const { return hidden_; }
  std::size_t word_count() const { return alignment_.size(); }
  std::span<const WordSpan> alignment() const { return alignment_; }
  std::span<const float> values() const { return values_; }

  std::span<const float> vector(std::size_t layer, std::size_t subword) const {
    return std::span<const float>(values_).subspan(
        (layer * subwords_ + subword) * hidden_, hidden_);
  }

  friend bool operator==(const SentenceEmbedding&,
                         const SentenceEmbedding&) = default;

 private:
  std::uint32_t layers_;
  std::uint32_t subwords_;
  std::uint32_t hidden_;
  std::vector<WordSpan> alignment_;
  std::vector<float> values_;
};

struct EmbeddingFile {
  EmbeddingHeader header;
  std::vector<SentenceEmbedding> sentences;

  // meta["sentence_ids"] when present, otherwise "0".."S-1".
  std::vector<std::string> sentence_ids() const;
};

// Serializes to bytes. Throws ValidationError on any dimension mismatch
// between the header and a sentence.
std::string encode_embeddings(const EmbeddingHeader& header,
                              std::span<const SentenceEmbedding> sentences);
void write_embeddings(std::ostream& out, const EmbeddingHeader& header,
                      std::span<const SentenceEmbedding> sentences);
// Writes to a temporary sibling and renames it into place.
void write_embeddings_file(const std::filesystem::path& path,
                           const EmbeddingHeader& header,
                           std::span<const SentenceEmbedding> sentences);

// Throws FormatError for a bad magic or metadata, LengthError for a
// truncated stream and ValidationError for invariant violations.
EmbeddingFile read_embeddings(std::string_view bytes);
EmbeddingFile read_embeddings(std::istream& in);
EmbeddingFile read_embeddings_file(const std::filesystem::path& path);

enum class Pooling { kFirst, kLast };
enum class LayerMode { kMix, kTop };

std::string_view to_string(Pooling pooling);
std::string_view to_string(LayerMode mode);
Pooling parse_pooling(std::string_view name);
LayerMode parse_layer_mode(std::string_view name);

// Index of the subword that represents a word.
std::size_t pooled_subword(const SentenceEmbedding& se, std::size_t word_index,
                           Pooling pooling);

// All L layer vectors (L*H, layer-major) of the pooled subword.
std::vector<float> pooled_layers(const SentenceEmbedding& se,
                                 std::size_t word_index, Pooling pooling);

// Softmax over raw scalars, computed with the max subtracted.
std::vector<double> softmax(std::span<const double> raw);

// sum_i softmax(raw)_i * x_i over L layer vectors of size H stored
// layer-major. Throws InvalidArgument when sizes disagree.
template <typename T>
std::vector<double> mix_layers(std::span<const T> vectors,
                               std::span<const double> raw_weights,
                               std::size_t hidden);

// Gradient of <d_out, mix_layers(vectors, raw)> with respect to raw:
// alpha_j * (g_j - sum_i alpha_i g_i) where g_i = <d_out, x_i>.
template <typename T>
std::vector<double> mix_layers_backward(std::span<const T> vectors,
                                        std::span<const double> raw_weights,
                                        std::span<const double> d_out);

// Learned scalar mixing of layers, starting from uniform weights.
class LayerMixer {
 public:
  explicit LayerMixer(std::size_t layers) : raw_(layers, 0.0) {}
  explicit LayerMixer(std::vector<double> raw) : raw_(std::move(raw)) {}

  std::size_t layers() const { return raw_.size(); }
  std::span<const double> raw_weights() const { return raw_; }
  std::span<double> raw_weights() { return raw_; }
  std::vector<double> weights() const { return softmax(raw_); }

  template <typename T>
  std::vector<double> mix(std::span<const T> vectors, std::size_t hidden) const {
    return mix_layers(vectors, std::span<const double>(raw_), hidden);
  }

 private:
  std::vector<double> raw_;
};

// H-vector for a word: the pooled subword at the top layer (L-1), or its
// layers mixed with `mixer` (L weights; uniform when null).
// Throws InvalidArgument for an out-of-range word index.
std::vector<double> pool(const SentenceEmbedding& se, std::size_t word_index,
                         Pooling pooling, LayerMode mode,
                         const LayerMixer* mixer = nullptr);

}  // namespace uralprobe

#endif  // URALPROBE_EMBSTORE_HPP_
