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

#ifndef URALPROBE_RUNNER_HPP_
#define URALPROBE_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "uralprobe/embstore.hpp"
#include "uralprobe/error.hpp"
#include "uralprobe/nn.hpp"

namespace uralprobe {

enum class TaskKind { kMorphProbe, kPos, kNer };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

// Experiment description. Probing defaults to last-subword pooling with
// learned layer mixing; POS and NER default to the first subword at the top
// layer.
//
// JSON form (every key optional except task, embeddings and dataset):
//   {"task": "morph-probe|pos|ner", "language": "fi", "model": "finbert",
//    "embeddings": "x.ulemb", "dataset": "tasks.json or tagging .jsonl",
//    "pool": "first|last", "layers": "mix|top", "strip_diacritics": false,
//    "train": {"batch_size": 128, "dropout": 0.2, "patience": 5,
//              "max_epochs": 200, "seed": 0, "lr": 1e-4, "beta1": 0.9,
//              "beta2": 0.999, "eps": 1e-8, "weight_decay": 0.01}}
struct ExperimentConfig {
  TaskKind task = TaskKind::kMorphProbe;
  std::string language;
  std::string model = "model";
  std::filesystem::path embeddings;
  std::filesystem::path dataset;
  Pooling pooling = Pooling::kLast;
  LayerMode layers = LayerMode::kMix;
  nn::TrainConfig train;
  bool strip_diacritics = false;
  // Not part of the fingerprint.
  std::optional<std::filesystem::path> checkpoint_dir;

  static ExperimentConfig defaults(TaskKind task);
  // Relative paths are resolved against base_dir.
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir = {});
  nlohmann::json to_json() const;

  // 16 hex digits of FNV-1a/64 over the canonical JSON form.
  std::string fingerprint() const;
};

struct ResultRow {
  std::string fingerprint;
  std::string task_id;
  std::string language;
  std::string model;
  std::string pooling;
  std::string layers;
  std::string metric;  // "accuracy" or "span-f1"
  double value = 0.0;
  double majority_baseline = 0.0;
  std::size_t epochs = 0;
  std::string timestamp;

  // Equality that ignores the timestamp.
  bool same_result(const ResultRow& other) const;
};

// Sentences referenced by a dataset but absent from the embedding file.
class MissingSentenceError : public FormatError {
 public:
  explicit MissingSentenceError(std::vector<std::string> ids);
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

// Trains and evaluates one probe per task of the manifest at cfg.dataset.
std::vector<ResultRow> run_probing_experiment(const ExperimentConfig& cfg);

// Trains one shared token classifier; POS reports token accuracy, NER
// span-F1. Test tags unseen in training count as errors.
ResultRow run_tagging_experiment(const ExperimentConfig& cfg);

// Dispatches on cfg.task.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Re-evaluates a saved checkpoint on one split ("train", "dev" or "test") of
// the dataset it was trained for.
ResultRow evaluate_checkpoint(const std::filesystem::path& checkpoint,
                              const std::filesystem::path& embeddings,
                              const std::filesystem::path& dataset,
                              std::string_view split = "test");

struct Report {
  std::string csv;
  std::string markdown;
};

// CSV with one line per row (sorted by fingerprint, then task id) and one
// markdown pivot per metric: languages down, models across, cells holding the
// mean over tasks. When both poolings are present the mean last-minus-first
// gap is tabulated as well.
Report emit_report(std::vector<ResultRow> rows);

std::string results_csv_header();
std::vector<ResultRow> parse_results_csv(std::string_view text);

// Mean over tasks of (last - first) for rows of one language/model pair that
// exist under both poolings; nullopt when no task has both.
std::optional<double> pooling_gap(const std::vector<ResultRow>& rows);

}  // namespace uralprobe

#endif  // URALPROBE_RUNNER_HPP_
