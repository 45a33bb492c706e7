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

#ifndef URALPROBE_DATASET_HPP_
#define URALPROBE_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uralprobe/corpus.hpp"

namespace uralprobe {

struct ProbingTaskSpec {
  std::string language;
  std::string feature;  // UD feature name, e.g. Case
  std::string upos;     // e.g. NOUN
  std::vector<std::string> label_set;

  // "<language>/<feature>_<upos>", e.g. "fi/Case_NOUN".
  std::string id() const;

  friend bool operator==(const ProbingTaskSpec&, const ProbingTaskSpec&) =
      default;
};

struct SplitConfig {
  std::size_t train_size = 2000;
  std::size_t dev_size = 200;
  std::size_t test_size = 200;
  // Majority label count may be at most this multiple of the minority count.
  double max_imbalance = 3.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ProbingDataset {
  ProbingTaskSpec spec;
  std::vector<ProbingInstance> train;
  std::vector<ProbingInstance> dev;
  std::vector<ProbingInstance> test;
};

enum class TaggingTask { kPos, kNer };

std::string_view to_string(TaggingTask task);
TaggingTask parse_tagging_task(std::string_view name);

struct TaggingDataset {
  TaggingTask task = TaggingTask::kPos;
  std::vector<Sentence> train;
  std::vector<Sentence> dev;
  std::vector<Sentence> test;
};

// Key used for target-word disjointness: the case-folded surface form.
std::string form_key(std::string_view form);

// Most balanced per-label counts summing to `total` with count[i] <=
// available[i]: the majority labels are capped (water-filling), nothing is
// ever duplicated. Throws InfeasibleError when the total cannot be reached,
// a label has nothing available, or the result exceeds max_imbalance.
std::vector<std::size_t> allocate_label_counts(
    std::span<const std::size_t> available, std::size_t total,
    double max_imbalance);

// Builds train/dev/test for one probing task.
//
// Every distinct target form (case-folded) goes to exactly one split. Forms
// are grouped by their most frequent label, shuffled with cfg.seed, and dealt
// to test, dev and train in proportion to the requested sizes. Each split is
// then downsampled per label with allocate_label_counts. Instances whose label
// is not in spec.label_set are ignored. Throws InfeasibleError naming the
// binding constraint.
ProbingDataset sample_probing_split(std::span<const ProbingInstance> instances,
                                    const ProbingTaskSpec& spec,
                                    const SplitConfig& cfg);

// Lists the viable probing tasks of a treebank: every (feature, UPOS) pair
// whose labels with at least min_per_label distinct forms number two or more
// and admit a compliant split under cfg. Labels that make the imbalance cap
// unattainable are dropped rarest-first.
std::vector<ProbingTaskSpec> enumerate_tasks(const Treebank& tb,
                                             std::size_t min_per_label,
                                             const SplitConfig& cfg = {});

// Shuffles sentences with cfg.seed and allocates
//   test = min(cfg.test_size, max(1, floor(N / 10))), dev likewise,
//   train = min(cfg.train_size, N - test - dev).
// Every token must carry the gold tag (UPOS or NER) for the task.
TaggingDataset sample_tagging_split(std::span<const Sentence> sentences,
                                    TaggingTask task, const SplitConfig& cfg);

// Returns a copy with diacritics removed from every form and lemma.
Sentence strip_sentence_diacritics(const Sentence& sentence);

}  // namespace uralprobe

#endif  // URALPROBE_DATASET_HPP_
