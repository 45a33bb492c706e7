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

#include "uralprobe/embstore.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "uralprobe/corpus.hpp"
#include "uralprobe/error.hpp"

namespace uralprobe {
namespace {

void append_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xffu));
  }
}

void validate_alignment(std::span<const WordSpan> alignment,
                        std::uint32_t subwords) {
  if (alignment.empty()) throw ValidationError("sentence has no words");
  std::uint32_t expected = 0;
  for (std::size_t w = 0; w < alignment.size(); ++w) {
    const WordSpan& span = alignment[w];
    const std::string where = "word " + std::to_string(w) + " [" +
                              std::to_string(span.begin) + ", " +
                              std::to_string(span.end) + ")";
    if (span.end <= span.begin) throw ValidationError(where + " is empty");
    if (span.end > subwords) {
      throw ValidationError(where + " ends past T=" + std::to_string(subwords));
    }
    if (span.begin != expected) {
      throw ValidationError(where + " does not start where the previous word "
                            "ended (" + std::to_string(expected) + ")");
    }
    expected = span.end;
  }
  if (expected != subwords) {
    throw ValidationError("alignment covers " + std::to_string(expected) +
                          " of " + std::to_string(subwords) + " subwords");
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw LengthError(std::string("truncated ULEMB01 stream while reading ") +
                        what + " (need " + std::to_string(n) + " bytes, " +
                        std::to_string(bytes_.size() - pos_) + " left)");
    }
    const std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint32_t u32(const char* what) {
    const std::string_view b = take(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | static_cast<std::uint8_t>(b[static_cast<std::size_t>(i)]);
    }
    return v;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void check_header(const EmbeddingHeader& header) {
  if (header.layers == 0) throw ValidationError("layer count must be >= 1");
  if (header.hidden == 0) throw ValidationError("hidden size must be >= 1");
  if (header.meta.contains("sentence_ids")) {
    const auto& ids = header.meta["sentence_ids"];
    if (!ids.is_array() || ids.size() != header.sentences) {
      throw ValidationError("meta.sentence_ids must list exactly S ids");
    }
  }
}

}  // namespace

SentenceEmbedding::SentenceEmbedding(std::uint32_t layers,
                                     std::uint32_t subwords,
                                     std::uint32_t hidden,
                                     std::vector<WordSpan> alignment,
                                     std::vector<float> values)
    : layers_(layers),
      subwords_(subwords),
      hidden_(hidden),
      alignment_(std::move(alignment)),
      values_(std::move(values)) {
  if (layers_ == 0 || hidden_ == 0) {
    throw ValidationError("layer count and hidden size must be positive");
  }
  validate_alignment(alignment_, subwords_);
  const std::size_t expected =
      std::size_t{layers_} * std::size_t{subwords_} * std::size_t{hidden_};
  if (values_.size() != expected) {
    throw ValidationError("expected " + std::to_string(expected) +
                          " values, got " + std::to_string(values_.size()));
  }
}

std::vector<std::string> EmbeddingFile::sentence_ids() const {
  std::vector<std::string> ids;
  if (header.meta.contains("sentence_ids")) {
    for (const auto& id : header.meta["sentence_ids"]) {
      ids.push_back(id.get<std::string>());
    }
    return ids;
  }
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    ids.push_back(std::to_string(i));
  }
  return ids;
}

std::string encode_embeddings(const EmbeddingHeader& header,
                              std::span<const SentenceEmbedding> sentences) {
  check_header(header);
  if (sentences.size() != header.sentences) {
    throw ValidationError("header declares " +
                          std::to_string(header.sentences) +
                          " sentences, got " + std::to_string(sentences.size()));
  }
  const std::string meta = header.meta.dump();
  std::string out(kEmbeddingMagic);
  append_u32(out, header.layers);
  append_u32(out, header.hidden);
  append_u32(out, header.sentences);
  append_u32(out, static_cast<std::uint32_t>(meta.size()));
  out += meta;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const SentenceEmbedding& se = sentences[s];
    if (se.layers() != header.layers || se.hidden() != header.hidden) {
      throw ValidationError("sentence " + std::to_string(s) +
                            " has L=" + std::to_string(se.layers()) +
                            " H=" + std::to_string(se.hidden()) +
                            ", header says L=" + std::to_string(header.layers) +
                            " H=" + std::to_string(header.hidden));
    }
    validate_alignment(se.alignment(), se.subwords());
    append_u32(out, static_cast<std::uint32_t>(se.word_count()));
    append_u32(out, se.subwords());
    for (const WordSpan& span : se.alignment()) {
      append_u32(out, span.begin);
      append_u32(out, span.end);
    }
    out.reserve(out.size() + se.values().size() * 4);
    for (float v : se.values()) append_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

void write_embeddings(std::ostream& out, const EmbeddingHeader& header,
                      std::span<const SentenceEmbedding> sentences) {
  const std::string bytes = encode_embeddings(header, sentences);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed to write embeddings");
}

void write_embeddings_file(const std::filesystem::path& path,
                           const EmbeddingHeader& header,
                           std::span<const SentenceEmbedding> sentences) {
  const std::string bytes = encode_embeddings(header, sentences);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed to write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

EmbeddingFile read_embeddings(std::string_view bytes) {
  if (bytes.size() < kEmbeddingMagic.size() ||
      bytes.substr(0, kEmbeddingMagic.size()) != kEmbeddingMagic) {
    throw FormatError("not a ULEMB01 stream (bad magic)");
  }
  Reader r(bytes.substr(kEmbeddingMagic.size()));
  EmbeddingFile file;
  EmbeddingHeader& h = file.header;
  h.layers = r.u32("layer count");
  h.hidden = r.u32("hidden size");
  h.sentences = r.u32("sentence count");
  const std::uint32_t meta_len = r.u32("metadata length");
  const std::string_view meta = r.take(meta_len, "metadata");
  try {
    h.meta = meta.empty() ? nlohmann::json::object() : nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("metadata is not valid JSON: ") + e.what());
  }
  check_header(h);

  const std::uint64_t per_subword =
      std::uint64_t{h.layers} * std::uint64_t{h.hidden} * 4;
  file.sentences.reserve(std::min<std::size_t>(h.sentences, r.remaining() / 8 + 1));
  for (std::uint32_t s = 0; s < h.sentences; ++s) {
    const std::uint32_t words = r.u32("word count");
    const std::uint32_t subwords = r.u32("subword count");
    if (std::uint64_t{words} * 8 > r.remaining()) {
      throw LengthError("truncated ULEMB01 stream in alignment of sentence " +
                        std::to_string(s));
    }
    std::vector<WordSpan> alignment(words);
    for (WordSpan& span : alignment) {
      span.begin = r.u32("alignment");
      span.end = r.u32("alignment");
    }
    const std::uint64_t payload = per_subword * subwords;
    if (payload > r.remaining()) {
      throw LengthError("truncated ULEMB01 payload in sentence " +
                        std::to_string(s) + ": need " +
                        std::to_string(payload) + " bytes, " +
                        std::to_string(r.remaining()) + " left");
    }
    const std::string_view raw = r.take(static_cast<std::size_t>(payload), "payload");
    std::vector<float> values(static_cast<std::size_t>(payload / 4));
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::uint32_t bits = 0;
      for (int b = 3; b >= 0; --b) {
        bits = (bits << 8) |
               static_cast<std::uint8_t>(raw[i * 4 + static_cast<std::size_t>(b)]);
      }
      values[i] = std::bit_cast<float>(bits);
    }
    try {
      file.sentences.emplace_back(h.layers, subwords, h.hidden,
                                  std::move(alignment), std::move(values));
    } catch (const ValidationError& e) {
      throw ValidationError("sentence " + std::to_string(s) + ": " + e.what());
    }
  }
  if (r.remaining() != 0) {
    throw FormatError(std::to_string(r.remaining()) +
                      " trailing bytes after the last sentence");
  }
  return file;
}

EmbeddingFile read_embeddings(std::istream& in) {
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return read_embeddings(bytes);
}

EmbeddingFile read_embeddings_file(const std::filesystem::path& path) {
  return read_embeddings(read_file(path));
}

std::string_view to_string(Pooling pooling) {
  return pooling == Pooling::kFirst ? "first" : "last";
}

std::string_view to_string(LayerMode mode) {
  return mode == LayerMode::kMix ? "mix" : "top";
}

Pooling parse_pooling(std::string_view name) {
  if (name == "first") return Pooling::kFirst;
  if (name == "last") return Pooling::kLast;
  throw InvalidArgument("pooling must be 'first' or 'last', got '" +
                        std::string(name) + "'");
}

LayerMode parse_layer_mode(std::string_view name) {
  if (name == "mix") return LayerMode::kMix;
  if (name == "top") return LayerMode::kTop;
  throw InvalidArgument("layer mode must be 'mix' or 'top', got '" +
                        std::string(name) + "'");
}

std::size_t pooled_subword(const SentenceEmbedding& se, std::size_t word_index,
                           Pooling pooling) {
  if (word_index >= se.word_count()) {
    throw InvalidArgument("word index " + std::to_string(word_index) +
                          " out of range for " +
                          std::to_string(se.word_count()) + " words");
  }
  const WordSpan span = se.alignment()[word_index];
  return pooling == Pooling::kFirst ? span.begin : span.end - 1;
}

std::vector<float> pooled_layers(const SentenceEmbedding& se,
                                 std::size_t word_index, Pooling pooling) {
  const std::size_t subword = pooled_subword(se, word_index, pooling);
  std::vector<float> out;
  out.reserve(std::size_t{se.layers()} * se.hidden());
  for (std::size_t layer = 0; layer < se.layers(); ++layer) {
    const auto v = se.vector(layer, subword);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<double> softmax(std::span<const double> raw) {
  std::vector<double> out(raw.size());
  if (raw.empty()) return out;
  const double max = *std::max_element(raw.begin(), raw.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = std::exp(raw[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

template <typename T>
std::vector<double> mix_layers(std::span<const T> vectors,
                               std::span<const double> raw_weights,
                               std::size_t hidden) {
  const std::size_t layers = raw_weights.size();
  if (layers == 0 || hidden == 0 || vectors.size() != layers * hidden) {
    throw InvalidArgument("mixing expects " + std::to_string(layers) + "x" +
                          std::to_string(hidden) + " values, got " +
                          std::to_string(vectors.size()));
  }
  const std::vector<double> alpha = softmax(raw_weights);
  std::vector<double> out(hidden, 0.0);
  for (std::size_t l = 0; l < layers; ++l) {
    const T* x = vectors.data() + l * hidden;
    for (std::size_t h = 0; h < hidden; ++h) {
      out[h] += alpha[l] * static_cast<double>(x[h]);
    }
  }
  return out;
}

template <typename T>
std::vector<double> mix_layers_backward(std::span<const T> vectors,
                                        std::span<const double> raw_weights,
                                        std::span<const double> d_out) {
  const std::size_t layers = raw_weights.size();
  const std::size_t hidden = d_out.size();
  if (vectors.size() != layers * hidden) {
    throw InvalidArgument("mixing gradient: size mismatch");
  }
  const std::vector<double> alpha = softmax(raw_weights);
  std::vector<double> g(layers, 0.0);
  double weighted = 0.0;
  for (std::size_t l = 0; l < layers; ++l) {
    const T* x = vectors.data() + l * hidden;
    double dot = 0.0;
    for (std::size_t h = 0; h < hidden; ++h) dot += d_out[h] * static_cast<double>(x[h]);
    g[l] = dot;
    weighted += alpha[l] * dot;
  }
  for (std::size_t l = 0; l < layers; ++l) g[l] = alpha[l] * (g[l] - weighted);
  return g;
}

template std::vector<double> mix_layers<float>(std::span<const float>,
                                               std::span<const double>,
                                               std::size_t);
template std::vector<double> mix_layers<double>(std::span<const double>,
                                                std::span<const double>,
                                                std::size_t);
template std::vector<double> mix_layers_backward<float>(
    std::span<const float>, std::span<const double>, std::span<const double>);
template std::vector<double> mix_layers_backward<double>(
    std::span<const double>, std::span<const double>, std::span<const double>);

std::vector<double> pool(const SentenceEmbedding& se, std::size_t word_index,
                         Pooling pooling, LayerMode mode,
                         const LayerMixer* mixer) {
  const std::size_t subword = pooled_subword(se, word_index, pooling);
  if (mode == LayerMode::kTop) {
    const auto v = se.vector(se.layers() - 1, subword);
    return std::vector<double>(v.begin(), v.end());
  }
  const LayerMixer uniform(se.layers());
  const LayerMixer& m = mixer != nullptr ? *mixer : uniform;
  if (m.layers() != se.layers()) {
    throw InvalidArgument("mixer has " + std::to_string(m.layers()) +
                          " weights for " + std::to_string(se.layers()) +
                          " layers");
  }
  const std::vector<float> layers = pooled_layers(se, word_index, pooling);
  return m.mix(std::span<const float>(layers), se.hidden());
}

}  // namespace uralprobe
