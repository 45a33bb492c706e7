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

#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <unistd.h>

#include "uralprobe/jsonl.hpp"

namespace uralprobe::fixture {
namespace fs = std::filesystem;

TempDir::TempDir(const std::string& prefix) {
  std::string templ = (fs::temp_directory_path() / (prefix + "-XXXXXX")).string();
  if (mkdtemp(templ.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = templ;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

const std::vector<std::string>& alphabet() {
  static const std::vector<std::string> chars = {
      "a", "e", "i", "k", "l", "n", "s", "t", "u", "ä", "ö", "š", "Q", "ж"};
  return chars;
}

namespace {

constexpr std::size_t kForeign = 2;

std::string pick(Rng& rng, bool foreign) {
  const auto& chars = alphabet();
  const std::size_t n = foreign ? chars.size() : chars.size() - kForeign;
  return chars[rng.uniform_below(n)];
}

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform_below(hi - lo + 1));
}

std::vector<std::string> dedup(std::vector<std::string> v) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (auto& s : v) {
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::string random_word(Rng& rng, std::size_t min_chars, std::size_t max_chars,
                        bool foreign_chars) {
  const std::size_t n = between(rng, min_chars, max_chars);
  std::string w;
  for (std::size_t i = 0; i < n; ++i) {
    w += (foreign_chars && rng.uniform01() < 0.05) ? pick(rng, true) : pick(rng, false);
  }
  return w;
}

std::vector<std::string> random_wordpiece_vocab(Rng& rng) {
  std::vector<std::string> pieces = {"[UNK]"};
  const std::size_t initial = between(rng, 3, 60);
  const std::size_t continuation = between(rng, 3, 60);
  for (std::size_t i = 0; i < initial; ++i) pieces.push_back(random_word(rng, 1, 4, false));
  for (std::size_t i = 0; i < continuation; ++i) {
    pieces.push_back("##" + random_word(rng, 1, 4, false));
  }
  return dedup(std::move(pieces));
}

VocabCase random_wordpiece_case(Rng& rng) {
  VocabCase c{random_wordpiece_vocab(rng), {}};
  // Mostly words built from vocabulary pieces so that matches are common.
  if (rng.uniform01() < 0.7) {
    const std::size_t parts = between(rng, 1, 5);
    for (std::size_t i = 0; i < parts; ++i) {
      std::string piece = c.pieces[1 + rng.uniform_below(c.pieces.size() - 1)];
      if (piece.rfind("##", 0) == 0) piece = piece.substr(2);
      c.word += piece;
    }
    if (rng.uniform01() < 0.1) c.word += pick(rng, true);
  } else {
    c.word = random_word(rng, 1, 12, true);
  }
  return c;
}

std::vector<std::string> random_sp_vocab(Rng& rng) {
  std::vector<std::string> pieces = {"<unk>"};
  if (rng.uniform01() < 0.5) pieces.push_back("▁");
  const std::size_t begin = between(rng, 2, 50);
  const std::size_t plain = between(rng, 2, 50);
  for (std::size_t i = 0; i < begin; ++i) pieces.push_back("▁" + random_word(rng, 1, 4, false));
  for (std::size_t i = 0; i < plain; ++i) pieces.push_back(random_word(rng, 1, 4, false));
  return dedup(std::move(pieces));
}

VocabCase random_sp_case(Rng& rng) {
  return {random_sp_vocab(rng), random_word(rng, 1, 14, true)};
}

std::vector<std::string> random_types(Rng& rng, std::size_t n, bool foreign_chars) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string w = random_word(rng, 1, 10, foreign_chars);
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::string> case_labels(std::size_t n) {
  static const std::vector<std::string> all = {"Nom", "Gen", "Par", "Ine", "Ela",
                                               "Ill", "Ade", "Abl", "All", "Ess",
                                               "Tra", "Abe", "Com", "Ins"};
  if (n > all.size()) throw std::invalid_argument("too many case labels");
  std::vector<std::string> out(all.begin(), all.begin() + static_cast<long>(n));
  std::sort(out.begin(), out.end());
  return out;
}

Treebank random_treebank(Rng& rng, const TreebankParams& p) {
  static const std::vector<std::string> kSuffixes = {
      "", "n", "a", "ssa", "sta", "hin", "lla", "lta", "lle", "na", "ksi", "tta", "ine", "in"};
  const std::vector<std::string> labels = case_labels(p.labels);
  std::vector<double> weights(p.labels, 1.0);
  if (!p.balanced) {
    for (double& w : weights) w = rng.uniform(0.05, 1.0);
  }
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;

  std::vector<std::string> stems;
  for (std::size_t i = 0; i < p.stems; ++i) stems.push_back(random_word(rng, 3, 7, false));

  Treebank tb;
  tb.language = p.language;
  for (std::size_t s = 0; s < p.sentences; ++s) {
    Sentence sent;
    sent.id = "synthetic:" + std::to_string(s + 1);
    const std::size_t len = between(rng, 4, 9);
    for (std::size_t w = 0; w < len; ++w) {
      Token t;
      const double r = rng.uniform01();
      if (r < p.noun_share) {
        double x = rng.uniform(0.0, weight_sum);
        std::size_t label = 0;
        while (label + 1 < weights.size() && x >= weights[label]) x -= weights[label++];
        t.form = stems[rng.uniform_below(stems.size())] + kSuffixes[label];
        if (rng.uniform01() < 0.1) t.form[0] = static_cast<char>(std::toupper(t.form[0]));
        t.upos = "NOUN";
        t.feats = {{"Case", labels[label]}, {"Number", rng.uniform01() < 0.7 ? "Sing" : "Plur"}};
      } else if (r < p.noun_share + 0.25) {
        t.form = random_word(rng, 3, 8, false) + (rng.uniform01() < 0.5 ? "i" : "u");
        t.upos = "VERB";
        t.feats = {{"Tense", t.form.back() == 'i' ? "Past" : "Pres"}};
      } else {
        t.form = random_word(rng, 1, 6, false);
        t.upos = rng.uniform01() < 0.5 ? "ADV" : "ADP";
      }
      t.lemma = t.form;
      sent.tokens.push_back(std::move(t));
    }
    tb.sentences.push_back(std::move(sent));
  }
  return tb;
}

std::vector<SentenceEmbedding> synthetic_embeddings(
    const std::vector<Sentence>& sentences, const Labeler& labeler,
    const EmbeddingParams& p) {
  Rng rng(p.seed);
  std::vector<SentenceEmbedding> out;
  out.reserve(sentences.size());
  for (const Sentence& s : sentences) {
    std::vector<WordSpan> alignment;
    std::uint32_t t = 0;
    for (std::size_t w = 0; w < s.tokens.size(); ++w) {
      const auto n = static_cast<std::uint32_t>(1 + rng.uniform_below(p.max_pieces_per_word));
      alignment.push_back({t, t + n});
      t += n;
    }
    std::vector<float> values(std::size_t{p.layers} * t * p.hidden);
    for (float& v : values) v = static_cast<float>(rng.uniform(-p.noise, p.noise));
    if (p.signal == Signal::kGoldLeak) {
      for (std::size_t w = 0; w < s.tokens.size(); ++w) {
        const auto label = labeler(s, w);
        if (!label) continue;
        if (*label >= p.leak_dims || p.leak_dims > p.hidden) {
          throw std::invalid_argument("label does not fit the leak block");
        }
        const std::uint32_t first = p.leak_last_only ? alignment[w].end - 1 : alignment[w].begin;
        for (std::uint32_t l = 0; l < p.layers; ++l) {
          for (std::uint32_t sub = first; sub < alignment[w].end; ++sub) {
            float* v = values.data() + (std::size_t{l} * t + sub) * p.hidden;
            std::fill(v, v + p.leak_dims, 0.0f);
            v[*label] = p.leak_scale;
          }
        }
      }
    }
    out.emplace_back(p.layers, t, p.hidden, std::move(alignment), std::move(values));
  }
  return out;
}

void write_synthetic_embeddings(const fs::path& path,
                                const std::vector<Sentence>& sentences,
                                const Labeler& labeler, const EmbeddingParams& p) {
  const auto embeddings = synthetic_embeddings(sentences, labeler, p);
  EmbeddingHeader header;
  header.layers = p.layers;
  header.hidden = p.hidden;
  header.sentences = static_cast<std::uint32_t>(sentences.size());
  std::vector<std::string> ids;
  for (const Sentence& s : sentences) ids.push_back(s.id);
  header.meta = {{"model", "synthetic"}, {"sentence_ids", ids}};
  write_embeddings_file(path, header, embeddings);
}

ProbeFixture write_probe_fixture(const fs::path& dir, const TreebankParams& tb_params,
                                 const SplitConfig& split, const EmbeddingParams& emb,
                                 std::uint64_t seed) {
  Rng rng(seed);
  const Treebank tb = random_treebank(rng, tb_params);
  ProbeFixture fx;
  fx.manifest = dir / "tasks.json";
  fx.embeddings = dir / "emb.ulemb";

  jsonl::ProbingManifest manifest;
  manifest.language = tb.language;
  manifest.seed = split.seed;
  for (const ProbingTaskSpec& spec : enumerate_tasks(tb, 10, split)) {
    if (spec.feature != "Case") continue;
    const auto instances = extract_morph_instances(tb, spec.feature, spec.upos);
    fx.datasets.push_back(sample_probing_split(instances, spec, split));
    const std::string file = spec.feature + "_" + spec.upos + ".jsonl";
    std::ofstream out(dir / file);
    jsonl::write_probing(out, fx.datasets.back());
    manifest.tasks.push_back({spec, file});
  }
  if (manifest.tasks.empty()) throw std::runtime_error("fixture has no Case task");
  {
    std::ofstream out(dir / manifest.sentences_file);
    jsonl::write_sentences(out, tb.sentences);
  }
  jsonl::write_manifest(fx.manifest, manifest);

  const std::vector<std::string>& label_set = fx.datasets.front().spec.label_set;
  const Labeler labeler = [&](const Sentence& s, std::size_t w) -> std::optional<std::size_t> {
    const auto it = s.tokens[w].feats.find("Case");
    if (it == s.tokens[w].feats.end()) return std::nullopt;
    const auto pos = std::find(label_set.begin(), label_set.end(), it->second);
    if (pos == label_set.end()) return std::nullopt;
    return static_cast<std::size_t>(pos - label_set.begin());
  };
  write_synthetic_embeddings(fx.embeddings, tb.sentences, labeler, emb);
  return fx;
}

namespace {

TaggerFixture finish_tagger(const fs::path& dir, const std::string& name,
                            const std::vector<Sentence>& sentences, TaggingTask task,
                            const std::vector<std::string>& inventory,
                            const SplitConfig& split, const EmbeddingParams& emb) {
  TaggerFixture fx;
  fx.dataset = dir / (name + ".jsonl");
  fx.embeddings = dir / (name + ".ulemb");
  fx.data = sample_tagging_split(sentences, task, split);
  {
    std::ofstream out(fx.dataset);
    jsonl::write_tagging(out, fx.data);
  }
  const Labeler labeler = [&](const Sentence& s, std::size_t w) -> std::optional<std::size_t> {
    const Token& t = s.tokens[w];
    const std::string tag = task == TaggingTask::kPos ? *t.upos : *t.ner;
    return static_cast<std::size_t>(
        std::find(inventory.begin(), inventory.end(), tag) - inventory.begin());
  };
  write_synthetic_embeddings(fx.embeddings, sentences, labeler, emb);
  return fx;
}

}  // namespace

TaggerFixture write_tagger_fixture(const fs::path& dir, std::size_t count,
                                   const SplitConfig& split, const EmbeddingParams& emb,
                                   std::uint64_t seed) {
  static const std::vector<std::string> kTags = {"ADJ", "ADP", "ADV", "NOUN", "PRON", "VERB"};
  static const std::vector<double> kWeights = {0.1, 0.1, 0.15, 0.3, 0.1, 0.25};
  Rng rng(seed);
  std::vector<Sentence> sentences;
  for (std::size_t s = 0; s < count; ++s) {
    Sentence sent;
    sent.id = "pos:" + std::to_string(s + 1);
    const std::size_t len = between(rng, 3, 12);
    for (std::size_t w = 0; w < len; ++w) {
      double x = rng.uniform01();
      std::size_t k = 0;
      while (k + 1 < kTags.size() && x >= kWeights[k]) x -= kWeights[k++];
      Token t;
      t.form = random_word(rng, 1, 9, false);
      t.upos = kTags[k];
      sent.tokens.push_back(std::move(t));
    }
    sentences.push_back(std::move(sent));
  }
  return finish_tagger(dir, "pos", sentences, TaggingTask::kPos, kTags, split, emb);
}

TaggerFixture write_ner_fixture(const fs::path& dir, std::size_t count,
                                const SplitConfig& split, const EmbeddingParams& emb,
                                std::uint64_t seed) {
  static const std::vector<std::string> kTypes = {"LOC", "ORG", "PER"};
  std::vector<std::string> inventory = {"O"};
  for (const auto& type : kTypes) {
    inventory.push_back("B-" + type);
    inventory.push_back("I-" + type);
  }
  Rng rng(seed);
  std::vector<Sentence> sentences;
  for (std::size_t s = 0; s < count; ++s) {
    Sentence sent;
    sent.id = "ner:" + std::to_string(s + 1);
    const std::size_t len = between(rng, 3, 12);
    while (sent.tokens.size() < len) {
      if (rng.uniform01() < 0.3) {
        const std::string& type = kTypes[rng.uniform_below(kTypes.size())];
        const std::size_t span = between(rng, 1, 3);
        for (std::size_t k = 0; k < span; ++k) {
          Token t;
          t.form = random_word(rng, 2, 8, false);
          t.ner = (k == 0 ? "B-" : "I-") + type;
          sent.tokens.push_back(std::move(t));
        }
      } else {
        Token t;
        t.form = random_word(rng, 1, 8, false);
        t.ner = "O";
        sent.tokens.push_back(std::move(t));
      }
    }
    sentences.push_back(std::move(sent));
  }
  return finish_tagger(dir, "ner", sentences, TaggingTask::kNer, inventory, split, emb);
}

std::vector<std::string> random_bio(Rng& rng, std::size_t length) {
  static const std::vector<std::string> kTypes = {"LOC", "ORG", "PER"};
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < length; ++i) {
    const double r = rng.uniform01();
    const std::string& type = kTypes[rng.uniform_below(kTypes.size())];
    if (r < 0.4) {
      tags.push_back("O");
    } else if (r < 0.65) {
      tags.push_back("B-" + type);
    } else if (r < 0.9 && i > 0 && tags.back() != "O") {
      tags.push_back("I-" + tags.back().substr(2));  // well-formed continuation
    } else {
      tags.push_back("I-" + type);
    }
  }
  return tags;
}

}  // namespace uralprobe::fixture
