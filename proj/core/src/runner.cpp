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

#include "uralprobe/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include "uralprobe/checkpoint.hpp"
#include "uralprobe/jsonl.hpp"
#include "uralprobe/metrics.hpp"

namespace uralprobe {
namespace {

using nlohmann::json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

// Index of each sentence id in the embedding file.
class EmbeddingIndex {
 public:
  explicit EmbeddingIndex(const EmbeddingFile& file) : file_(file) {
    const auto ids = file.sentence_ids();
    for (std::size_t i = 0; i < ids.size(); ++i) index_.emplace(ids[i], i);
  }

  const SentenceEmbedding* find(const std::string& id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &file_.sentences[it->second];
  }

  const EmbeddingFile& file() const { return file_; }

 private:
  const EmbeddingFile& file_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Features of one word: all layers of the pooled subword when mixing,
// otherwise the top-layer vector.
std::vector<float> word_features(const SentenceEmbedding& se, std::size_t word,
                                 Pooling pooling, LayerMode mode) {
  if (mode == LayerMode::kMix) return pooled_layers(se, word, pooling);
  const std::size_t subword = pooled_subword(se, word, pooling);
  const auto v = se.vector(se.layers() - 1, subword);
  return std::vector<float>(v.begin(), v.end());
}

std::size_t feature_size(const EmbeddingHeader& h, LayerMode mode) {
  return mode == LayerMode::kMix ? std::size_t{h.layers} * h.hidden : h.hidden;
}

nn::LabeledData probing_features(const std::vector<ProbingInstance>& split,
                                 const std::map<std::string, std::size_t>& labels,
                                 const EmbeddingIndex& index, Pooling pooling,
                                 LayerMode mode) {
  nn::LabeledData data;
  data.feature_size = feature_size(index.file().header, mode);
  for (const ProbingInstance& inst : split) {
    const SentenceEmbedding* se = index.find(inst.sentence_id);
    if (se == nullptr) throw MissingSentenceError({inst.sentence_id});
    if (inst.target >= se->word_count()) {
      throw ValidationError("sentence " + inst.sentence_id + " has " +
                            std::to_string(se->word_count()) +
                            " words, target index " +
                            std::to_string(inst.target));
    }
    const auto it = labels.find(inst.label);
    const std::size_t label = it == labels.end() ? labels.size() : it->second;
    data.add(word_features(*se, inst.target, pooling, mode), label);
  }
  return data;
}

struct TokenFeatures {
  nn::LabeledData data;
  std::vector<std::vector<std::string>> gold;  // per sentence
};

TokenFeatures tagging_features(const std::vector<Sentence>& sentences,
                               TaggingTask task,
                               const std::map<std::string, std::size_t>& tags,
                               const EmbeddingIndex& index, Pooling pooling,
                               LayerMode mode) {
  TokenFeatures out;
  out.data.feature_size = feature_size(index.file().header, mode);
  for (const Sentence& s : sentences) {
    const SentenceEmbedding* se = index.find(s.id);
    if (se == nullptr) throw MissingSentenceError({s.id});
    if (se->word_count() != s.tokens.size()) {
      throw ValidationError("sentence " + s.id + " has " +
                            std::to_string(s.tokens.size()) +
                            " words but its embedding has " +
                            std::to_string(se->word_count()));
    }
    std::vector<std::string> gold;
    for (std::size_t w = 0; w < s.tokens.size(); ++w) {
      const Token& t = s.tokens[w];
      const std::string tag = task == TaggingTask::kPos ? t.upos.value_or("")
                                                       : t.ner.value_or("");
      const auto it = tags.find(tag);
      out.data.add(word_features(*se, w, pooling, mode),
                   it == tags.end() ? tags.size() : it->second);
      gold.push_back(tag);
    }
    out.gold.push_back(std::move(gold));
  }
  return out;
}

// Accuracy of always predicting the most frequent training label.
double majority_baseline(const nn::LabeledData& train,
                         const nn::LabeledData& test) {
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t l : train.labels) ++counts[l];
  std::size_t best = 0;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  const std::vector<std::size_t> preds(test.size(), best);
  return accuracy(preds, test.labels);
}

void check_missing(const std::vector<std::string>& referenced,
                   const EmbeddingIndex& index) {
  std::set<std::string> missing;
  for (const std::string& id : referenced) {
    if (index.find(id) == nullptr) missing.insert(id);
  }
  if (!missing.empty()) {
    throw MissingSentenceError({missing.begin(), missing.end()});
  }
}

nn::MlpModel fresh_model(const ExperimentConfig& cfg, const EmbeddingHeader& h,
                         std::size_t classes) {
  Rng init(Rng::derive(cfg.train.seed, 0x1a7e5));
  const std::size_t mix = cfg.layers == LayerMode::kMix ? h.layers : 0;
  return nn::MlpModel::initialized(h.hidden, classes, mix, init);
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), '/', '_');
  return s;
}

std::vector<std::string> split_names() { return {"train", "dev", "test"}; }

}  // namespace

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kMorphProbe: return "morph-probe";
    case TaskKind::kPos: return "pos";
    case TaskKind::kNer: return "ner";
  }
  return "?";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "morph-probe") return TaskKind::kMorphProbe;
  if (name == "pos") return TaskKind::kPos;
  if (name == "ner") return TaskKind::kNer;
  throw InvalidArgument("task must be morph-probe, pos or ner, got '" +
                        std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::defaults(TaskKind task) {
  ExperimentConfig cfg;
  cfg.task = task;
  if (task == TaskKind::kMorphProbe) {
    cfg.pooling = Pooling::kLast;
    cfg.layers = LayerMode::kMix;
  } else {
    cfg.pooling = Pooling::kFirst;
    cfg.layers = LayerMode::kTop;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json(const json& j,
                                             const std::filesystem::path& base_dir) {
  try {
    ExperimentConfig cfg = defaults(parse_task_kind(j.at("task").get<std::string>()));
    cfg.language = j.value("language", cfg.language);
    cfg.model = j.value("model", cfg.model);
    cfg.embeddings = resolve(base_dir, j.value("embeddings", std::string()));
    cfg.dataset = resolve(base_dir, j.value("dataset", std::string()));
    if (j.contains("pool")) cfg.pooling = parse_pooling(j["pool"].get<std::string>());
    if (j.contains("layers")) cfg.layers = parse_layer_mode(j["layers"].get<std::string>());
    cfg.strip_diacritics = j.value("strip_diacritics", false);
    if (j.contains("train")) {
      const json& t = j["train"];
      nn::TrainConfig& tc = cfg.train;
      tc.batch_size = t.value("batch_size", tc.batch_size);
      tc.dropout = t.value("dropout", tc.dropout);
      tc.patience = t.value("patience", tc.patience);
      tc.max_epochs = t.value("max_epochs", tc.max_epochs);
      tc.seed = t.value("seed", tc.seed);
      tc.optimizer.lr = t.value("lr", tc.optimizer.lr);
      tc.optimizer.beta1 = t.value("beta1", tc.optimizer.beta1);
      tc.optimizer.beta2 = t.value("beta2", tc.optimizer.beta2);
      tc.optimizer.eps = t.value("eps", tc.optimizer.eps);
      tc.optimizer.weight_decay = t.value("weight_decay", tc.optimizer.weight_decay);
    }
    if (j.contains("checkpoint_dir")) {
      cfg.checkpoint_dir = resolve(base_dir, j["checkpoint_dir"].get<std::string>());
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
}

json ExperimentConfig::to_json() const {
  return json{{"task", std::string(uralprobe::to_string(task))},
              {"language", language},
              {"model", model},
              {"embeddings", embeddings.string()},
              {"dataset", dataset.string()},
              {"pool", std::string(uralprobe::to_string(pooling))},
              {"layers", std::string(uralprobe::to_string(layers))},
              {"strip_diacritics", strip_diacritics},
              {"train", uralprobe::to_json(train)}};
}

std::string ExperimentConfig::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool ResultRow::same_result(const ResultRow& o) const {
  return fingerprint == o.fingerprint && task_id == o.task_id &&
         language == o.language && model == o.model && pooling == o.pooling &&
         layers == o.layers && metric == o.metric && value == o.value &&
         majority_baseline == o.majority_baseline && epochs == o.epochs;
}

MissingSentenceError::MissingSentenceError(std::vector<std::string> ids)
    : FormatError([&] {
        std::string msg = std::to_string(ids.size()) +
                          " sentence id(s) missing from the embedding file:";
        for (std::size_t i = 0; i < ids.size() && i < 20; ++i) msg += " " + ids[i];
        if (ids.size() > 20) msg += " ...";
        return msg;
      }()),
      ids_(std::move(ids)) {}

std::vector<ResultRow> run_probing_experiment(const ExperimentConfig& cfg) {
  const jsonl::ProbingManifest manifest = jsonl::read_manifest(cfg.dataset);
  const std::filesystem::path dir = cfg.dataset.parent_path();

  std::vector<ProbingDataset> datasets;
  std::vector<std::string> referenced;
  for (const auto& entry : manifest.tasks) {
    std::ifstream in(resolve(dir, entry.file));
    if (!in) throw Error("cannot open " + resolve(dir, entry.file).string());
    datasets.push_back(jsonl::read_probing(in, entry.spec));
    for (const auto* split : {&datasets.back().train, &datasets.back().dev,
                              &datasets.back().test}) {
      for (const ProbingInstance& inst : *split) referenced.push_back(inst.sentence_id);
    }
  }

  const EmbeddingFile emb = read_embeddings_file(cfg.embeddings);
  const EmbeddingIndex index(emb);
  check_missing(referenced, index);

  const std::string fp = cfg.fingerprint();
  std::vector<ResultRow> rows;
  for (const ProbingDataset& ds : datasets) {
    std::map<std::string, std::size_t> labels;
    for (const std::string& l : ds.spec.label_set) labels.emplace(l, labels.size());
    const auto train_set = probing_features(ds.train, labels, index, cfg.pooling, cfg.layers);
    const auto dev_set = probing_features(ds.dev, labels, index, cfg.pooling, cfg.layers);
    const auto test_set = probing_features(ds.test, labels, index, cfg.pooling, cfg.layers);

    nn::TrainResult result = nn::train(fresh_model(cfg, emb.header, labels.size()),
                                       train_set, dev_set, cfg.train);
    ResultRow row;
    row.fingerprint = fp;
    row.task_id = ds.spec.id();
    row.language = ds.spec.language.empty() ? cfg.language : ds.spec.language;
    row.model = cfg.model;
    row.pooling = std::string(to_string(cfg.pooling));
    row.layers = std::string(to_string(cfg.layers));
    row.metric = "accuracy";
    row.value = accuracy(nn::predict(result.model, test_set), test_set.labels);
    row.majority_baseline = majority_baseline(train_set, test_set);
    row.epochs = result.history.epochs.size();
    row.timestamp = utc_timestamp();
    rows.push_back(row);

    if (cfg.checkpoint_dir) {
      std::filesystem::create_directories(*cfg.checkpoint_dir);
      const json meta{{"task", "morph-probe"},
                      {"spec", jsonl::to_json(ds.spec)},
                      {"labels", ds.spec.label_set},
                      {"pool", row.pooling},
                      {"layers", row.layers},
                      {"fingerprint", fp},
                      {"strip_diacritics", cfg.strip_diacritics}};
      save_checkpoint(*cfg.checkpoint_dir / (sanitize(row.task_id) + ".ckpt"),
                      result.model, cfg.train, meta);
    }
  }
  return rows;
}

ResultRow run_tagging_experiment(const ExperimentConfig& cfg) {
  if (cfg.task == TaskKind::kMorphProbe) {
    throw InvalidArgument("run_tagging_experiment needs a pos or ner config");
  }
  const TaggingTask task =
      cfg.task == TaskKind::kPos ? TaggingTask::kPos : TaggingTask::kNer;
  std::ifstream in(cfg.dataset);
  if (!in) throw Error("cannot open " + cfg.dataset.string());
  const TaggingDataset ds = jsonl::read_tagging(in, task);
  if (ds.train.empty() || ds.dev.empty() || ds.test.empty()) {
    throw InvalidArgument("tagging dataset needs non-empty train, dev and test");
  }

  const EmbeddingFile emb = read_embeddings_file(cfg.embeddings);
  const EmbeddingIndex index(emb);
  std::vector<std::string> referenced;
  for (const auto* split : {&ds.train, &ds.dev, &ds.test}) {
    for (const Sentence& s : *split) referenced.push_back(s.id);
  }
  check_missing(referenced, index);

  std::set<std::string> inventory;
  for (const Sentence& s : ds.train) {
    for (const Token& t : s.tokens) {
      inventory.insert(task == TaggingTask::kPos ? t.upos.value_or("") : t.ner.value_or(""));
    }
  }
  std::map<std::string, std::size_t> tags;
  for (const std::string& t : inventory) tags.emplace(t, tags.size());
  std::vector<std::string> tag_names(inventory.begin(), inventory.end());

  const auto train_set = tagging_features(ds.train, task, tags, index, cfg.pooling, cfg.layers);
  const auto dev_set = tagging_features(ds.dev, task, tags, index, cfg.pooling, cfg.layers);
  const auto test_set = tagging_features(ds.test, task, tags, index, cfg.pooling, cfg.layers);

  nn::TrainResult result = nn::train(fresh_model(cfg, emb.header, tags.size()),
                                     train_set.data, dev_set.data, cfg.train);
  const std::vector<std::size_t> preds = nn::predict(result.model, test_set.data);

  ResultRow row;
  row.fingerprint = cfg.fingerprint();
  row.task_id = cfg.language + "/" + std::string(to_string(task));
  row.language = cfg.language;
  row.model = cfg.model;
  row.pooling = std::string(to_string(cfg.pooling));
  row.layers = std::string(to_string(cfg.layers));
  row.majority_baseline = majority_baseline(train_set.data, test_set.data);
  row.epochs = result.history.epochs.size();
  row.timestamp = utc_timestamp();
  if (task == TaggingTask::kPos) {
    row.metric = "accuracy";
    row.value = accuracy(preds, test_set.data.labels);
  } else {
    std::vector<std::vector<std::string>> predicted;
    std::size_t k = 0;
    for (const auto& gold : test_set.gold) {
      std::vector<std::string> sentence;
      for (std::size_t w = 0; w < gold.size(); ++w) sentence.push_back(tag_names[preds[k++]]);
      predicted.push_back(std::move(sentence));
    }
    row.metric = "span-f1";
    row.value = span_f1(predicted, test_set.gold).f1;
  }

  if (cfg.checkpoint_dir) {
    std::filesystem::create_directories(*cfg.checkpoint_dir);
    const json meta{{"task", std::string(to_string(cfg.task))},
                    {"labels", tag_names},
                    {"pool", row.pooling},
                    {"layers", row.layers},
                    {"language", cfg.language},
                    {"fingerprint", row.fingerprint},
                    {"strip_diacritics", cfg.strip_diacritics}};
    save_checkpoint(*cfg.checkpoint_dir / (sanitize(row.task_id) + ".ckpt"),
                    result.model, cfg.train, meta);
  }
  return row;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.task == TaskKind::kMorphProbe) return run_probing_experiment(cfg);
  return {run_tagging_experiment(cfg)};
}

ResultRow evaluate_checkpoint(const std::filesystem::path& checkpoint,
                              const std::filesystem::path& embeddings,
                              const std::filesystem::path& dataset,
                              std::string_view split) {
  const auto names = split_names();
  const auto split_it = std::find(names.begin(), names.end(), split);
  if (split_it == names.end()) {
    throw InvalidArgument("split must be train, dev or test");
  }
  const std::size_t split_index = static_cast<std::size_t>(split_it - names.begin());

  const Checkpoint ck = load_checkpoint(checkpoint);
  json meta;
  TaskKind kind = TaskKind::kMorphProbe;
  Pooling pooling = Pooling::kFirst;
  LayerMode mode = LayerMode::kTop;
  std::vector<std::string> label_names;
  std::optional<ProbingTaskSpec> spec;
  try {
    meta = ck.header.at("metadata");
    kind = parse_task_kind(meta.at("task").get<std::string>());
    pooling = parse_pooling(meta.at("pool").get<std::string>());
    mode = parse_layer_mode(meta.at("layers").get<std::string>());
    label_names = meta.at("labels").get<std::vector<std::string>>();
    if (kind == TaskKind::kMorphProbe) spec = jsonl::spec_from_json(meta.at("spec"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint metadata: ") + e.what());
  }
  std::map<std::string, std::size_t> labels;
  for (const auto& l : label_names) labels.emplace(l, labels.size());

  const EmbeddingFile emb = read_embeddings_file(embeddings);
  const EmbeddingIndex index(emb);
  if (emb.header.hidden != ck.model.input_dim() ||
      (ck.model.mixes() && emb.header.layers != ck.model.mix_layers())) {
    throw ValidationError("checkpoint dimensions do not match the embeddings");
  }

  ResultRow row;
  row.fingerprint = meta.value("fingerprint", std::string());
  row.pooling = std::string(to_string(pooling));
  row.layers = std::string(to_string(mode));
  row.timestamp = utc_timestamp();
  row.metric = "accuracy";

  if (kind == TaskKind::kMorphProbe) {
    std::ifstream in(dataset);
    if (!in) throw Error("cannot open " + dataset.string());
    const ProbingDataset ds = jsonl::read_probing(in, *spec);
    const std::vector<ProbingInstance>* splits[] = {&ds.train, &ds.dev, &ds.test};
    const auto data = probing_features(*splits[split_index], labels, index, pooling, mode);
    row.task_id = spec->id();
    row.language = spec->language;
    row.value = accuracy(nn::predict(ck.model, data), data.labels);
    return row;
  }

  const TaggingTask task = kind == TaskKind::kPos ? TaggingTask::kPos : TaggingTask::kNer;
  std::ifstream in(dataset);
  if (!in) throw Error("cannot open " + dataset.string());
  const TaggingDataset ds = jsonl::read_tagging(in, task);
  const std::vector<Sentence>* splits[] = {&ds.train, &ds.dev, &ds.test};
  const auto features = tagging_features(*splits[split_index], task, labels, index, pooling, mode);
  const auto preds = nn::predict(ck.model, features.data);
  row.language = meta.value("language", std::string());
  row.task_id = row.language + "/" + std::string(to_string(task));
  if (task == TaggingTask::kPos) {
    row.value = accuracy(preds, features.data.labels);
  } else {
    std::vector<std::vector<std::string>> predicted;
    std::size_t k = 0;
    for (const auto& gold : features.gold) {
      std::vector<std::string> sentence;
      for (std::size_t w = 0; w < gold.size(); ++w) sentence.push_back(label_names[preds[k++]]);
      predicted.push_back(std::move(sentence));
    }
    row.metric = "span-f1";
    row.value = span_f1(predicted, features.gold).f1;
  }
  return row;
}

}  // namespace uralprobe
