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

#ifndef URALPROBE_JSONL_HPP_
#define URALPROBE_JSONL_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uralprobe/dataset.hpp"

// JSON-lines files exchanged with the embedding exporter.
//
//   sentences.jsonl   {"id": str, "words": [str]}
//   <task>.jsonl      {"split": "train|dev|test", "sentence_id": str,
//                      "target": int, "label": str, "form": str}
//   tagging .jsonl    {"split": ..., "id": str, "words": [str], "tags": [str]}
//   tasks.json        manifest tying probing files to their task specs
//
// Every line an exporter reads carries "id" and "words".
namespace uralprobe::jsonl {

void write_sentences(std::ostream& out, std::span<const Sentence> sentences);
std::vector<Sentence> read_sentences(std::istream& in);

void write_probing(std::ostream& out, const ProbingDataset& dataset);
ProbingDataset read_probing(std::istream& in, ProbingTaskSpec spec);

void write_tagging(std::ostream& out, const TaggingDataset& dataset);
TaggingDataset read_tagging(std::istream& in, TaggingTask task);

nlohmann::json to_json(const ProbingTaskSpec& spec);
ProbingTaskSpec spec_from_json(const nlohmann::json& j);

struct ProbingManifest {
  struct Entry {
    ProbingTaskSpec spec;
    std::string file;  // relative to the manifest directory
  };
  std::string language;
  bool strip_diacritics = false;
  std::uint64_t seed = 0;
  std::string sentences_file = "sentences.jsonl";
  std::vector<Entry> tasks;
};

void write_manifest(const std::filesystem::path& path,
                    const ProbingManifest& manifest);
ProbingManifest read_manifest(const std::filesystem::path& path);

}  // namespace uralprobe::jsonl

#endif  // URALPROBE_JSONL_HPP_
