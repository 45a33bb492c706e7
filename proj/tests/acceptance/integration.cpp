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

// Integration checks on real vocabularies, treebanks and exported
// embeddings. Asset paths come from the environment:
//
//   URALPROBE_FINBERT_VOCAB, URALPROBE_FI_CONLLU
//   URALPROBE_ESTBERT_VOCAB, URALPROBE_MYV_CONLLU
//   URALPROBE_MBERT_VOCAB,   URALPROBE_HU_CONLLU
//   URALPROBE_PROBE_DIRS     colon-separated directories, each holding a
//                            probing manifest (tasks.json) and the exported
//                            embeddings of its sentences (embeddings.ulemb)
//
// *_CONLLU may list several files separated by colons. Checks whose assets
// are missing print SKIP; exit status 77 means nothing was checked.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "uralprobe/corpus.hpp"
#include "uralprobe/runner.hpp"
#include "uralprobe/tokenize.hpp"

namespace uralprobe {
namespace {

namespace fs = std::filesystem;

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

std::vector<std::string> split_paths(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, ':')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::vector<std::string> treebank_types(const std::string& paths) {
  std::vector<std::string> types;
  std::unordered_set<std::string> seen;
  for (const auto& path : split_paths(paths)) {
    for (const auto& s : parse_conllu(read_file(path), fs::path(path).filename().string())) {
      for (const auto& t : s.tokens) {
        if (!t.form.empty() && seen.insert(t.form).second) types.push_back(t.form);
      }
    }
  }
  return types;
}

struct Tally {
  int pass = 0;
  int fail = 0;
  int skip = 0;
  void line(bool ok, const std::string& name, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    ok ? ++pass : ++fail;
  }
  void skipped(const std::string& name, const std::string& why) {
    std::printf("SKIP %s: %s\n", name.c_str(), why.c_str());
    ++skip;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::optional<TokenizerStats> stats_for(Tally& t, const std::string& name, const char* vocab_var,
                                        const char* conllu_var) {
  const auto vocab = env(vocab_var);
  const auto conllu = env(conllu_var);
  if (!vocab || !conllu) {
    t.skipped(name, std::string("set ") + vocab_var + " and " + conllu_var);
    return std::nullopt;
  }
  const auto v = Vocabulary::load(*vocab, VocabKind::kWordPiece,
                                  VocabMarkers::defaults(VocabKind::kWordPiece));
  return tokenizer_stats(v, treebank_types(*conllu));
}

void tokenizer_checks(Tally& t) {
  if (const auto s = stats_for(t, "finbert-fi-fertility", "URALPROBE_FINBERT_VOCAB",
                               "URALPROBE_FI_CONLLU")) {
    const double f = s->fertility.value_or(NAN);
    t.line(std::abs(f - 1.9) <= 0.4, "finbert-fi-fertility",
           "fertility=" + num(f) + " (target 1.9 +- 0.4)");
  }
  if (const auto s = stats_for(t, "estbert-myv-missing-rate", "URALPROBE_ESTBERT_VOCAB",
                               "URALPROBE_MYV_CONLLU")) {
    t.line(s->missing_rate >= 0.90, "estbert-myv-missing-rate",
           "missing rate=" + num(s->missing_rate) + " (target >= 0.90)");
  }
  if (const auto s = stats_for(t, "mbert-hu-fertility", "URALPROBE_MBERT_VOCAB",
                               "URALPROBE_HU_CONLLU")) {
    const double f = s->fertility.value_or(NAN);
    t.line(std::abs(f - 4.0) <= 0.8, "mbert-hu-fertility",
           "fertility=" + num(f) + " (target 4.0 +- 0.8)");
  }
}

void probe_checks(Tally& t) {
  const auto dirs = env("URALPROBE_PROBE_DIRS");
  if (!dirs) {
    t.skipped("real-probes-last-beats-first", "set URALPROBE_PROBE_DIRS");
    t.skipped("real-probes-beat-majority", "set URALPROBE_PROBE_DIRS");
    return;
  }
  std::vector<ResultRow> rows;
  double value_sum = 0;
  double majority_sum = 0;
  std::size_t last_rows = 0;
  for (const auto& dir : split_paths(*dirs)) {
    ExperimentConfig cfg = ExperimentConfig::defaults(TaskKind::kMorphProbe);
    cfg.dataset = fs::path(dir) / "tasks.json";
    cfg.embeddings = fs::path(dir) / "embeddings.ulemb";
    cfg.model = fs::path(dir).filename().string();
    for (Pooling pooling : {Pooling::kLast, Pooling::kFirst}) {
      cfg.pooling = pooling;
      for (const ResultRow& row : run_probing_experiment(cfg)) {
        if (pooling == Pooling::kLast) {
          value_sum += row.value;
          majority_sum += row.majority_baseline;
          ++last_rows;
        }
        rows.push_back(row);
      }
    }
  }
  const auto gap = pooling_gap(rows);
  t.line(gap.has_value() && *gap > 0, "real-probes-last-beats-first",
         gap ? "mean Last - First=" + num(*gap) : "no paired tasks");
  if (last_rows == 0) {
    t.line(false, "real-probes-beat-majority", "no tasks");
    return;
  }
  const double margin = (value_sum - majority_sum) / static_cast<double>(last_rows);
  t.line(margin >= 0.20, "real-probes-beat-majority",
         "mean accuracy - majority=" + num(margin) + " over " + std::to_string(last_rows) +
             " tasks (target >= 0.20)");
}

}  // namespace
}  // namespace uralprobe

int main() {
  uralprobe::Tally t;
  try {
    uralprobe::tokenizer_checks(t);
    uralprobe::probe_checks(t);
  } catch (const std::exception& e) {
    std::printf("FAIL integration: %s\n", e.what());
    return 1;
  }
  if (t.fail > 0) return 1;
  return t.pass == 0 ? 77 : 0;
}
