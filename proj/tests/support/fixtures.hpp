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

// Synthetic corpora, vocabularies and embedding files for tests.

#ifndef URALPROBE_TESTS_FIXTURES_HPP_
#define URALPROBE_TESTS_FIXTURES_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uralprobe/corpus.hpp"
#include "uralprobe/dataset.hpp"
#include "uralprobe/embstore.hpp"
#include "uralprobe/random.hpp"

namespace uralprobe::fixture {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "uralprobe");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

// Characters drawn by the random generators; the last two are never put in
// vocabularies.
const std::vector<std::string>& alphabet();

std::string random_word(Rng& rng, std::size_t min_chars, std::size_t max_chars,
                        bool foreign_chars);

struct VocabCase {
  std::vector<std::string> pieces;
  std::string word;
};

// WordPiece vocabulary with "[UNK]", random initial and "##" pieces.
std::vector<std::string> random_wordpiece_vocab(Rng& rng);
VocabCase random_wordpiece_case(Rng& rng);

// SentencePiece-style vocabulary with "<unk>", "▁" pieces and plain pieces.
std::vector<std::string> random_sp_vocab(Rng& rng);
VocabCase random_sp_case(Rng& rng);

// n distinct word types.
std::vector<std::string> random_types(Rng& rng, std::size_t n,
                                      bool foreign_chars = true);

struct TreebankParams {
  std::string language = "fi";
  std::size_t sentences = 1200;
  std::size_t labels = 3;          // Case values on NOUN
  std::size_t stems = 4000;        // smaller pools repeat forms more often
  bool balanced = true;            // else random label weights
  double noun_share = 0.45;
};

// NOUN tokens carry Case (and Number), VERB tokens carry Tense; the other
// tokens are featureless fillers.
Treebank random_treebank(Rng& rng, const TreebankParams& p);

// Case values used by random_treebank, in label order.
std::vector<std::string> case_labels(std::size_t n);

enum class Signal { kGoldLeak, kRandom };

struct EmbeddingParams {
  std::uint32_t layers = 4;
  std::uint32_t hidden = 32;
  std::uint32_t max_pieces_per_word = 3;
  Signal signal = Signal::kGoldLeak;
  // Leak into the last subword only; otherwise into every subword.
  bool leak_last_only = false;
  // Leaking vectors hold leak_scale * one-hot(label) in their first
  // leak_dims coordinates; the rest stays noise.
  std::uint32_t leak_dims = 16;
  float leak_scale = 1.0f;
  // Amplitude of the uniform noise in every coordinate outside the leak.
  float noise = 0.05f;
  std::uint64_t seed = 1;
};

// Label index of word w of a sentence, nullopt for no leak.
using Labeler =
    std::function<std::optional<std::size_t>(const Sentence&, std::size_t)>;

// One embedding per sentence. Values are uniform noise in [-noise, noise]; with a
// gold leak, the leaking subwords carry the one-hot label block in every
// layer.
std::vector<SentenceEmbedding> synthetic_embeddings(
    const std::vector<Sentence>& sentences, const Labeler& labeler,
    const EmbeddingParams& p);

void write_synthetic_embeddings(const std::filesystem::path& path,
                                const std::vector<Sentence>& sentences,
                                const Labeler& labeler, const EmbeddingParams& p);

struct ProbeFixture {
  std::filesystem::path manifest;
  std::filesystem::path embeddings;
  std::vector<ProbingDataset> datasets;
};

// Samples every feasible task of a random treebank, writes the manifest,
// task files, sentences and a ULEMB01 file whose leak encodes the Case label.
ProbeFixture write_probe_fixture(const std::filesystem::path& dir,
                                 const TreebankParams& tb_params,
                                 const SplitConfig& split,
                                 const EmbeddingParams& emb, std::uint64_t seed);

struct TaggerFixture {
  std::filesystem::path dataset;
  std::filesystem::path embeddings;
  TaggingDataset data;
};

// POS-tagged random sentences; the leak encodes the UPOS tag.
TaggerFixture write_tagger_fixture(const std::filesystem::path& dir,
                                   std::size_t sentences,
                                   const SplitConfig& split,
                                   const EmbeddingParams& emb, std::uint64_t seed);

// BIO-tagged random sentences over PER/LOC/ORG; the leak encodes the tag.
TaggerFixture write_ner_fixture(const std::filesystem::path& dir,
                                std::size_t sentences, const SplitConfig& split,
                                const EmbeddingParams& emb, std::uint64_t seed);

// Random BIO sequence, ill-formed I- tags included.
std::vector<std::string> random_bio(Rng& rng, std::size_t length);

}  // namespace uralprobe::fixture

#endif  // URALPROBE_TESTS_FIXTURES_HPP_
