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

#include "uralprobe/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "uralprobe/error.hpp"
#include "uralprobe/random.hpp"
#include "uralprobe/unicode.hpp"

namespace uralprobe {
namespace {

struct FormGroup {
  std::string key;
  std::vector<std::size_t> members;  // indices into the instance list
  std::size_t label = 0;             // dominant label index
};

std::string describe_split(int split) {
  static constexpr std::string_view kNames[] = {"train", "dev", "test"};
  return std::string(kNames[split]);
}

}  // namespace

std::string ProbingTaskSpec::id() const {
  return language + "/" + feature + "_" + upos;
}

void SplitConfig::validate() const {
  if (train_size == 0 || dev_size == 0 || test_size == 0) {
    throw InvalidArgument("split sizes must be positive");
  }
  if (!(max_imbalance >= 1.0)) {
    throw InvalidArgument("max_imbalance must be at least 1");
  }
}

std::string_view to_string(TaggingTask task) {
  return task == TaggingTask::kPos ? "pos" : "ner";
}

TaggingTask parse_tagging_task(std::string_view name) {
  if (name == "pos") return TaggingTask::kPos;
  if (name == "ner") return TaggingTask::kNer;
  throw InvalidArgument("unknown tagging task '" + std::string(name) + "'");
}

std::string form_key(std::string_view form) { return unicode::fold_case(form); }

std::vector<std::size_t> allocate_label_counts(
    std::span<const std::size_t> available, std::size_t total,
    double max_imbalance) {
  if (available.empty()) throw InvalidArgument("no labels to allocate");
  std::size_t sum = 0;
  std::size_t max_avail = 0;
  for (std::size_t i = 0; i < available.size(); ++i) {
    if (available[i] == 0) {
      throw InfeasibleError("label coverage: label #" + std::to_string(i) +
                            " has no candidates");
    }
    sum += available[i];
    max_avail = std::max(max_avail, available[i]);
  }
  if (sum < total) {
    throw InfeasibleError("split size: " + std::to_string(total) +
                          " instances requested but only " +
                          std::to_string(sum) + " available");
  }
  if (total < available.size()) {
    throw InfeasibleError("split size: " + std::to_string(total) +
                          " instances cannot cover " +
                          std::to_string(available.size()) + " labels");
  }

  auto filled = [&](std::size_t cap) {
    std::size_t s = 0;
    for (std::size_t a : available) s += std::min(a, cap);
    return s;
  };
  std::size_t lo = 1;
  std::size_t hi = max_avail;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (filled(mid) >= total) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const std::size_t cap = lo;

  std::vector<std::size_t> counts(available.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < available.size(); ++i) {
    counts[i] = std::min(available[i], cap);
    assigned += counts[i];
  }
  for (std::size_t i = 0; i < counts.size() && assigned > total; ++i) {
    if (counts[i] == cap) {
      --counts[i];
      --assigned;
    }
  }

  const auto [min_it, max_it] = std::minmax_element(counts.begin(), counts.end());
  if (static_cast<double>(*max_it) >
      max_imbalance * static_cast<double>(*min_it)) {
    throw InfeasibleError("class imbalance: best allocation has " +
                          std::to_string(*max_it) + " vs " +
                          std::to_string(*min_it) + " instances");
  }
  return counts;
}

ProbingDataset sample_probing_split(std::span<const ProbingInstance> instances,
                                    const ProbingTaskSpec& spec,
                                    const SplitConfig& cfg) {
  cfg.validate();
  if (spec.label_set.size() < 2) {
    throw InvalidArgument("a probing task needs at least two labels");
  }
  std::unordered_map<std::string, std::size_t> label_index;
  for (std::size_t i = 0; i < spec.label_set.size(); ++i) {
    label_index.emplace(spec.label_set[i], i);
  }
  const std::size_t num_labels = spec.label_set.size();

  // Group retained instances by case-folded form; std::map keeps the order
  // independent of the input hash layout.
  std::map<std::string, FormGroup> groups;
  std::vector<std::size_t> instance_label(instances.size(), num_labels);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto it = label_index.find(instances[i].label);
    if (it == label_index.end()) continue;
    instance_label[i] = it->second;
    std::string key = form_key(instances[i].form);
    FormGroup& g = groups[key];
    if (g.key.empty()) g.key = std::move(key);
    g.members.push_back(i);
  }

  std::vector<std::vector<FormGroup*>> strata(num_labels);
  for (auto& [key, g] : groups) {
    std::vector<std::size_t> votes(num_labels, 0);
    for (std::size_t i : g.members) ++votes[instance_label[i]];
    g.label = static_cast<std::size_t>(
        std::max_element(votes.begin(), votes.end()) - votes.begin());
    strata[g.label].push_back(&g);
  }

  Rng rng(cfg.seed);
  const double total_size =
      static_cast<double>(cfg.train_size + cfg.dev_size + cfg.test_size);
  const double test_share = static_cast<double>(cfg.test_size) / total_size;
  const double dev_share = static_cast<double>(cfg.dev_size) / total_size;

  // split index: 0 train, 1 dev, 2 test
  std::vector<std::vector<std::size_t>> split_members(3);
  for (auto& stratum : strata) {
    rng.shuffle(std::span<FormGroup*>(stratum));
    std::size_t stratum_total = 0;
    for (const FormGroup* g : stratum) stratum_total += g->members.size();
    const double test_target = test_share * static_cast<double>(stratum_total);
    const double dev_target = dev_share * static_cast<double>(stratum_total);
    double test_assigned = 0.0;
    double dev_assigned = 0.0;
    for (const FormGroup* g : stratum) {
      int split = 0;
      if (test_assigned < test_target) {
        split = 2;
        test_assigned += static_cast<double>(g->members.size());
      } else if (dev_assigned < dev_target) {
        split = 1;
        dev_assigned += static_cast<double>(g->members.size());
      }
      auto& dst = split_members[static_cast<std::size_t>(split)];
      dst.insert(dst.end(), g->members.begin(), g->members.end());
    }
  }

  ProbingDataset out;
  out.spec = spec;
  const std::size_t sizes[3] = {cfg.train_size, cfg.dev_size, cfg.test_size};
  std::vector<ProbingInstance>* targets[3] = {&out.train, &out.dev, &out.test};
  for (int split = 0; split < 3; ++split) {
    auto& members = split_members[static_cast<std::size_t>(split)];
    std::sort(members.begin(), members.end());
    std::vector<std::vector<std::size_t>> by_label(num_labels);
    for (std::size_t i : members) by_label[instance_label[i]].push_back(i);

    std::vector<std::size_t> available(num_labels);
    for (std::size_t l = 0; l < num_labels; ++l) {
      available[l] = by_label[l].size();
      if (available[l] == 0) {
        throw InfeasibleError("label coverage: label '" + spec.label_set[l] +
                              "' has no instances left for the " +
                              describe_split(split) + " split of " + spec.id());
      }
    }
    std::vector<std::size_t> counts;
    try {
      counts = allocate_label_counts(available, sizes[split], cfg.max_imbalance);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(std::string(e.what()) + " (" +
                            describe_split(split) + " split of " + spec.id() +
                            ")");
    }

    std::vector<ProbingInstance>& dst = *targets[split];
    dst.reserve(sizes[split]);
    for (std::size_t l = 0; l < num_labels; ++l) {
      rng.shuffle(std::span<std::size_t>(by_label[l]));
      for (std::size_t k = 0; k < counts[l]; ++k) {
        dst.push_back(instances[by_label[l][k]]);
      }
    }
    rng.shuffle(std::span<ProbingInstance>(dst));
  }
  return out;
}

std::vector<ProbingTaskSpec> enumerate_tasks(const Treebank& tb,
                                             std::size_t min_per_label,
                                             const SplitConfig& cfg) {
  // (feature, upos) -> label -> distinct form keys
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, std::set<std::string>>>
      forms;
  for (const Sentence& s : tb.sentences) {
    for (const Token& t : s.tokens) {
      if (!t.upos) continue;
      for (const auto& [feature, value] : t.feats) {
        forms[{feature, *t.upos}][value].insert(form_key(t.form));
      }
    }
  }

  std::vector<ProbingTaskSpec> out;
  for (const auto& [pair, by_label] : forms) {
    std::vector<std::pair<std::size_t, std::string>> ranked;
    for (const auto& [label, keys] : by_label) {
      if (keys.size() >= min_per_label) ranked.emplace_back(keys.size(), label);
    }
    if (ranked.size() < 2) continue;
    // Most frequent first, ties by label name.
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

    const auto instances = extract_morph_instances(tb, pair.first, pair.second);
    while (ranked.size() >= 2) {
      ProbingTaskSpec spec{tb.language, pair.first, pair.second, {}};
      for (const auto& entry : ranked) spec.label_set.push_back(entry.second);
      std::sort(spec.label_set.begin(), spec.label_set.end());
      try {
        sample_probing_split(instances, spec, cfg);
        out.push_back(std::move(spec));
        break;
      } catch (const InfeasibleError&) {
        ranked.pop_back();
      }
    }
  }
  return out;
}

TaggingDataset sample_tagging_split(std::span<const Sentence> sentences,
                                    TaggingTask task, const SplitConfig& cfg) {
  cfg.validate();
  const std::size_t n = sentences.size();
  if (n < 3) {
    throw InfeasibleError("split size: " + std::to_string(n) +
                          " sentences, at least 3 needed");
  }
  for (const Sentence& s : sentences) {
    if (s.tokens.empty()) {
      throw InvalidArgument("sentence " + s.id + " has no tokens");
    }
    for (const Token& t : s.tokens) {
      const bool tagged = task == TaggingTask::kPos ? t.upos.has_value()
                                                    : t.ner.has_value();
      if (!tagged) {
        throw InvalidArgument("sentence " + s.id + " lacks gold " +
                              std::string(to_string(task)) + " tags");
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(cfg.seed);
  rng.shuffle(std::span<std::size_t>(order));

  const std::size_t tenth = std::max<std::size_t>(1, n / 10);
  const std::size_t test = std::min(cfg.test_size, tenth);
  const std::size_t dev = std::min(cfg.dev_size, tenth);
  const std::size_t train = std::min(cfg.train_size, n - test - dev);

  TaggingDataset out;
  out.task = task;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < test; ++k) out.test.push_back(sentences[order[pos++]]);
  for (std::size_t k = 0; k < dev; ++k) out.dev.push_back(sentences[order[pos++]]);
  for (std::size_t k = 0; k < train; ++k) out.train.push_back(sentences[order[pos++]]);
  return out;
}

Sentence strip_sentence_diacritics(const Sentence& sentence) {
  Sentence out = sentence;
  for (Token& t : out.tokens) {
    // A form made only of marks would vanish; keep it as-is instead.
    if (std::string stripped = unicode::strip_diacritics(t.form);
        !stripped.empty()) {
      t.form = std::move(stripped);
    }
    if (t.lemma) t.lemma = unicode::strip_diacritics(*t.lemma);
  }
  return out;
}

}  // namespace uralprobe
