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

// uralprobe: tokenizer diagnostics, probing/tagging dataset generation and
// classifier training over precomputed contextual embeddings.
//
// Exit codes: 0 success, 1 other failure, 2 infeasible dataset, 3 format error.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "uralprobe/corpus.hpp"
#include "uralprobe/dataset.hpp"
#include "uralprobe/error.hpp"
#include "uralprobe/jsonl.hpp"
#include "uralprobe/metrics.hpp"
#include "uralprobe/runner.hpp"
#include "uralprobe/tokenize.hpp"
#include "uralprobe/unicode.hpp"

namespace fs = std::filesystem;
using namespace uralprobe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitFormat = 3;

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw InvalidArgument("not a number: " + item);
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string vocab;
  std::string tokenizer = "wordpiece";
  std::string unk;
  std::string types_file;
  std::vector<std::string> conllu;
  bool strip_diacritics = false;
  std::string language = "xx";
  std::string model = "model";
  std::string output;
  bool no_header = false;
};

int run_stats(const StatsArgs& a) {
  const VocabKind kind =
      a.tokenizer == "sp" ? VocabKind::kSentencePieceLike : VocabKind::kWordPiece;
  VocabMarkers markers = VocabMarkers::defaults(kind);
  if (!a.unk.empty()) markers.unk = a.unk;
  const Vocabulary vocab = Vocabulary::load(a.vocab, kind, markers);

  std::set<std::string> seen;
  std::vector<std::string> types;
  auto add = [&](std::string word) {
    if (a.strip_diacritics) word = unicode::strip_diacritics(word);
    if (word.empty()) return;
    if (seen.insert(word).second) types.push_back(std::move(word));
  };
  if (!a.types_file.empty()) {
    std::istringstream in(read_file(a.types_file));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      add(line);
    }
  }
  for (const auto& path : a.conllu) {
    const auto sentences = parse_conllu(read_file(path), fs::path(path).filename().string());
    for (const auto& s : sentences) {
      for (const auto& t : s.tokens) add(t.form);
    }
  }
  if (types.empty()) throw InvalidArgument("no word types given (--types or --conllu)");

  const TokenizerStats stats = tokenizer_stats(vocab, types);
  std::string text;
  if (!a.no_header) text += stats_csv_header() + "\n";
  text += stats_csv_row(a.language, a.model, vocab.size(), stats) + "\n";
  write_output(text, a.output);
  return kExitOk;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string conllu;
  std::string wikiann;
  std::string language;
  std::string task = "probe";
  std::string out;
  std::uint64_t seed = 0;
  bool strip_diacritics = false;
  std::size_t min_per_label = 10;
  std::size_t train_size = 2000;
  std::size_t dev_size = 200;
  std::size_t test_size = 200;
  double max_imbalance = 3.0;
  std::string feature;
  std::string upos;
};

int run_sample(const SampleArgs& a) {
  if (a.conllu.empty() == a.wikiann.empty()) {
    throw InvalidArgument("give exactly one of --conllu or --wikiann");
  }
  const bool is_conllu = !a.conllu.empty();
  Treebank tb = load_treebank(is_conllu ? a.conllu : a.wikiann, a.language,
                              is_conllu ? CorpusFormat::kConllu : CorpusFormat::kWikiann);
  if (a.strip_diacritics) {
    for (Sentence& s : tb.sentences) s = strip_sentence_diacritics(s);
  }
  SplitConfig cfg;
  cfg.train_size = a.train_size;
  cfg.dev_size = a.dev_size;
  cfg.test_size = a.test_size;
  cfg.max_imbalance = a.max_imbalance;
  cfg.seed = a.seed;
  cfg.validate();

  const fs::path out_dir(a.out);
  fs::create_directories(out_dir);

  if (a.task == "pos" || a.task == "ner") {
    const TaggingTask task = parse_tagging_task(a.task);
    const TaggingDataset ds = sample_tagging_split(tb.sentences, task, cfg);
    const fs::path path = out_dir / (a.task + ".jsonl");
    std::ofstream out(path);
    jsonl::write_tagging(out, ds);
    std::cerr << a.task << ": " << ds.train.size() << "/" << ds.dev.size() << "/"
              << ds.test.size() << " sentences -> " << path.string() << '\n';
    return kExitOk;
  }
  if (a.task != "probe") throw InvalidArgument("--task must be probe, pos or ner");

  std::vector<ProbingTaskSpec> specs;
  if (!a.feature.empty() || !a.upos.empty()) {
    if (a.feature.empty() || a.upos.empty()) {
      throw InvalidArgument("--feature and --upos go together");
    }
    const auto instances = extract_morph_instances(tb, a.feature, a.upos);
    std::set<std::string> labels;
    for (const auto& inst : instances) labels.insert(inst.label);
    specs.push_back({tb.language, a.feature, a.upos, {labels.begin(), labels.end()}});
  } else {
    specs = enumerate_tasks(tb, a.min_per_label, cfg);
    if (specs.empty()) throw InfeasibleError("no probing task admits a compliant split");
  }

  std::map<std::string, const Sentence*> by_id;
  for (const Sentence& s : tb.sentences) by_id.emplace(s.id, &s);
  std::set<std::string> referenced;

  jsonl::ProbingManifest manifest;
  manifest.language = tb.language;
  manifest.strip_diacritics = a.strip_diacritics;
  manifest.seed = a.seed;
  for (const ProbingTaskSpec& spec : specs) {
    const auto instances = extract_morph_instances(tb, spec.feature, spec.upos);
    const ProbingDataset ds = sample_probing_split(instances, spec, cfg);
    const std::string file = spec.feature + "_" + spec.upos + ".jsonl";
    std::ofstream out(out_dir / file);
    jsonl::write_probing(out, ds);
    for (const auto* split : {&ds.train, &ds.dev, &ds.test}) {
      for (const auto& inst : *split) referenced.insert(inst.sentence_id);
    }
    manifest.tasks.push_back({spec, file});
    std::cerr << spec.id() << ": " << spec.label_set.size() << " labels -> " << file << '\n';
  }
  std::vector<Sentence> sentences;
  for (const auto& id : referenced) sentences.push_back(*by_id.at(id));
  std::ofstream sout(out_dir / manifest.sentences_file);
  jsonl::write_sentences(sout, sentences);
  jsonl::write_manifest(out_dir / "tasks.json", manifest);
  return kExitOk;
}

// ---------------------------------------------------------------- training

struct TrainArgs {
  std::string config;
  std::string task;
  std::string embeddings;
  std::string dataset;
  std::string pool;
  std::string layers;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_epochs;
  std::optional<std::size_t> patience;
  std::optional<std::size_t> batch_size;
  std::string language;
  std::string model;
  std::string checkpoint_dir;
  std::string results;
  bool strip_diacritics = false;
};

ExperimentConfig build_config(const TrainArgs& a, TaskKind fallback) {
  ExperimentConfig cfg;
  if (!a.config.empty()) {
    const fs::path path(a.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(a.config + ": " + e.what());
    }
    if (!j.contains("task")) {
      j["task"] = a.task.empty() ? std::string(to_string(fallback)) : a.task;
    }
    cfg = ExperimentConfig::from_json(j, path.parent_path());
  } else {
    cfg = ExperimentConfig::defaults(a.task.empty() ? fallback : parse_task_kind(a.task));
  }
  if (!a.task.empty() && parse_task_kind(a.task) != cfg.task) {
    // Switching task keeps explicit pooling choices but resets the defaults.
    const ExperimentConfig d = ExperimentConfig::defaults(parse_task_kind(a.task));
    cfg.task = d.task;
    cfg.pooling = d.pooling;
    cfg.layers = d.layers;
  }
  if (!a.embeddings.empty()) cfg.embeddings = a.embeddings;
  if (!a.dataset.empty()) cfg.dataset = a.dataset;
  if (!a.pool.empty()) cfg.pooling = parse_pooling(a.pool);
  if (!a.layers.empty()) cfg.layers = parse_layer_mode(a.layers);
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.max_epochs) cfg.train.max_epochs = *a.max_epochs;
  if (a.patience) cfg.train.patience = *a.patience;
  if (a.batch_size) cfg.train.batch_size = *a.batch_size;
  if (!a.language.empty()) cfg.language = a.language;
  if (!a.model.empty()) cfg.model = a.model;
  if (!a.checkpoint_dir.empty()) cfg.checkpoint_dir = fs::path(a.checkpoint_dir);
  if (a.strip_diacritics) cfg.strip_diacritics = true;
  if (cfg.embeddings.empty() || cfg.dataset.empty()) {
    throw InvalidArgument("--embeddings and --dataset (or a --config naming them) are required");
  }
  return cfg;
}

int run_train(const TrainArgs& a, TaskKind fallback) {
  const ExperimentConfig cfg = build_config(a, fallback);
  if ((fallback == TaskKind::kMorphProbe) != (cfg.task == TaskKind::kMorphProbe)) {
    throw InvalidArgument("train-probe runs morph-probe configs, train-tagger pos/ner configs");
  }
  if (cfg.task == TaskKind::kMorphProbe) {
    const auto manifest = jsonl::read_manifest(cfg.dataset);
    if (manifest.strip_diacritics != cfg.strip_diacritics) {
      std::cerr << "warning: dataset was prepared with strip_diacritics="
                << manifest.strip_diacritics << " but the config says "
                << cfg.strip_diacritics << '\n';
    }
  }
  const auto rows = run_experiment(cfg);
  const Report report = emit_report(rows);
  write_output(report.csv, a.results);
  if (!a.results.empty() && a.results != "-") std::cout << report.csv;
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint;
  std::string embeddings;
  std::string dataset;
  std::string split = "test";
};

int run_eval(const EvalArgs& a) {
  const ResultRow row = evaluate_checkpoint(a.checkpoint, a.embeddings, a.dataset, a.split);
  std::cout << row.task_id << '\t' << row.metric << '\t' << row.value << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- ttest

struct TTestArgs {
  std::string a_file;
  std::string b_file;
  std::string a_values;
  std::string b_values;
};

int run_ttest(const TTestArgs& args) {
  std::vector<double> a;
  std::vector<double> b;
  if (!args.a_file.empty() || !args.b_file.empty()) {
    if (args.a_file.empty() || args.b_file.empty()) {
      throw InvalidArgument("--a and --b go together");
    }
    std::map<std::string, double> by_task;
    for (const auto& r : parse_results_csv(read_file(args.a_file))) by_task[r.task_id] = r.value;
    std::size_t unmatched = 0;
    for (const auto& r : parse_results_csv(read_file(args.b_file))) {
      const auto it = by_task.find(r.task_id);
      if (it == by_task.end()) {
        ++unmatched;
        continue;
      }
      a.push_back(it->second);
      b.push_back(r.value);
    }
    if (unmatched > 0) std::cerr << "warning: " << unmatched << " task(s) only in --b\n";
  } else {
    a = parse_list(args.a_values);
    b = parse_list(args.b_values);
  }
  const TTestResult r = paired_t_test(a, b);
  std::cout << "n=" << a.size() << " df=" << r.df;
  if (r.defined) {
    std::cout << " t=" << r.t << " p=" << r.p << '\n';
  } else {
    std::cout << " t=undefined p=undefined (constant non-zero differences)\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> results;
  std::string csv;
  std::string markdown;
};

int run_report(const ReportArgs& a) {
  std::vector<ResultRow> rows;
  for (const auto& path : a.results) {
    auto part = parse_results_csv(read_file(path));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const Report report = emit_report(std::move(rows));
  if (!a.csv.empty()) write_output(report.csv, a.csv);
  if (!a.markdown.empty()) write_output(report.markdown, a.markdown);
  if (a.csv.empty() && a.markdown.empty()) std::cout << report.markdown;
  return kExitOk;
}

void add_train_options(CLI::App* cmd, TrainArgs& a, bool tagger) {
  cmd->add_option("--config", a.config, "Experiment config (JSON)");
  if (tagger) {
    cmd->add_option("--task", a.task, "pos or ner")->check(CLI::IsMember({"pos", "ner"}));
  }
  cmd->add_option("--embeddings", a.embeddings, "ULEMB01 embedding file");
  cmd->add_option("--dataset", a.dataset,
                  tagger ? "Tagging JSON-lines file" : "Probing manifest (tasks.json)");
  cmd->add_option("--pool", a.pool, "Subword pooling")->check(CLI::IsMember({"first", "last"}));
  cmd->add_option("--layers", a.layers, "Layer mode")->check(CLI::IsMember({"mix", "top"}));
  cmd->add_option("--seed", a.seed, "Training seed");
  cmd->add_option("--max-epochs", a.max_epochs);
  cmd->add_option("--patience", a.patience);
  cmd->add_option("--batch-size", a.batch_size);
  cmd->add_option("--language", a.language);
  cmd->add_option("--model", a.model, "Model name used in reports");
  cmd->add_option("--checkpoint-dir", a.checkpoint_dir, "Save one checkpoint per task here");
  cmd->add_option("--results", a.results, "Write result rows as CSV here");
  cmd->add_flag("--strip-diacritics", a.strip_diacritics,
                "Record that inputs were prepared without diacritics");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tokenizer diagnostics and probing/tagging over contextual embeddings"};
  app.require_subcommand(1);

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Tokenizer diagnostics over word types");
  stats_cmd->add_option("--vocab", stats.vocab, "Vocabulary file")->required();
  stats_cmd->add_option("--tokenizer", stats.tokenizer, "wordpiece or sp")
      ->check(CLI::IsMember({"wordpiece", "sp"}));
  stats_cmd->add_option("--unk", stats.unk, "Unknown piece (default [UNK] / <unk>)");
  stats_cmd->add_option("--types", stats.types_file, "One word type per line");
  stats_cmd->add_option("--conllu", stats.conllu, "Take types from CoNLL-U files");
  stats_cmd->add_flag("--strip-diacritics", stats.strip_diacritics);
  stats_cmd->add_option("--language", stats.language);
  stats_cmd->add_option("--model", stats.model);
  stats_cmd->add_option("--output", stats.output, "CSV destination (default stdout)");
  stats_cmd->add_flag("--no-header", stats.no_header);

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Generate probing or tagging datasets");
  sample_cmd->add_option("--conllu", sample.conllu, "CoNLL-U treebank");
  sample_cmd->add_option("--wikiann", sample.wikiann, "WikiAnn NER file");
  sample_cmd->add_option("--language", sample.language, "Language code")->required();
  sample_cmd->add_option("--task", sample.task, "probe, pos or ner")
      ->check(CLI::IsMember({"probe", "pos", "ner"}));
  sample_cmd->add_option("--out", sample.out, "Output directory")->required();
  sample_cmd->add_option("--seed", sample.seed);
  sample_cmd->add_flag("--strip-diacritics", sample.strip_diacritics);
  sample_cmd->add_option("--min-per-label", sample.min_per_label,
                         "Distinct forms a label needs to be kept");
  sample_cmd->add_option("--train-size", sample.train_size);
  sample_cmd->add_option("--dev-size", sample.dev_size);
  sample_cmd->add_option("--test-size", sample.test_size);
  sample_cmd->add_option("--max-imbalance", sample.max_imbalance);
  sample_cmd->add_option("--feature", sample.feature, "Single probing task: UD feature");
  sample_cmd->add_option("--upos", sample.upos, "Single probing task: UPOS");

  TrainArgs probe;
  auto* probe_cmd = app.add_subcommand("train-probe", "Train and test morphological probes");
  add_train_options(probe_cmd, probe, false);

  TrainArgs tagger;
  auto* tagger_cmd = app.add_subcommand("train-tagger", "Train and test a POS or NER tagger");
  add_train_options(tagger_cmd, tagger, true);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved checkpoint");
  eval_cmd->add_option("--checkpoint", eval.checkpoint)->required();
  eval_cmd->add_option("--embeddings", eval.embeddings)->required();
  eval_cmd->add_option("--dataset", eval.dataset, "Task JSON-lines file")->required();
  eval_cmd->add_option("--split", eval.split)->check(CLI::IsMember({"train", "dev", "test"}));

  TTestArgs ttest;
  auto* ttest_cmd = app.add_subcommand("ttest", "Paired t-test over per-task scores");
  ttest_cmd->add_option("--a", ttest.a_file, "Results CSV of model A");
  ttest_cmd->add_option("--b", ttest.b_file, "Results CSV of model B");
  ttest_cmd->add_option("--values-a", ttest.a_values, "Comma-separated scores of A");
  ttest_cmd->add_option("--values-b", ttest.b_values, "Comma-separated scores of B");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Merge result CSVs into tables");
  report_cmd->add_option("--results", report.results, "Result CSV files")->required();
  report_cmd->add_option("--csv", report.csv);
  report_cmd->add_option("--markdown", report.markdown);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; usage errors map to the generic code.
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (*stats_cmd) return run_stats(stats);
    if (*sample_cmd) return run_sample(sample);
    if (*probe_cmd) return run_train(probe, TaskKind::kMorphProbe);
    if (*tagger_cmd) {
      return run_train(tagger, tagger.task == "ner" ? TaskKind::kNer : TaskKind::kPos);
    }
    if (*eval_cmd) return run_eval(eval);
    if (*ttest_cmd) return run_ttest(ttest);
    if (*report_cmd) return run_report(report);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ParseError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const EncodingError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
