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

#include "uralprobe/jsonl.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "uralprobe/corpus.hpp"
#include "uralprobe/error.hpp"

namespace uralprobe::jsonl {
namespace {

using nlohmann::json;

constexpr const char* kSplitNames[] = {"train", "dev", "test"};

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    json j;
    try {
      j = json::parse(line);
      fn(j);
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
}

int split_index(const std::string& name) {
  for (int i = 0; i < 3; ++i) {
    if (name == kSplitNames[i]) return i;
  }
  throw ParseError("unknown split '" + name + "'");
}

std::vector<std::string> words_of(const Sentence& s) {
  std::vector<std::string> words;
  words.reserve(s.tokens.size());
  for (const Token& t : s.tokens) words.push_back(t.form);
  return words;
}

}  // namespace

void write_sentences(std::ostream& out, std::span<const Sentence> sentences) {
  for (const Sentence& s : sentences) {
    out << json{{"id", s.id}, {"words", words_of(s)}}.dump() << '\n';
  }
}

std::vector<Sentence> read_sentences(std::istream& in) {
  std::vector<Sentence> out;
  for_each_line(in, [&](const json& j) {
    Sentence s;
    s.id = j.at("id").get<std::string>();
    for (const auto& w : j.at("words")) {
      Token t;
      t.form = w.get<std::string>();
      s.tokens.push_back(std::move(t));
    }
    out.push_back(std::move(s));
  });
  return out;
}

void write_probing(std::ostream& out, const ProbingDataset& dataset) {
  const std::vector<ProbingInstance>* splits[] = {&dataset.train, &dataset.dev,
                                                  &dataset.test};
  for (int i = 0; i < 3; ++i) {
    for (const ProbingInstance& inst : *splits[i]) {
      out << json{{"split", kSplitNames[i]},
                  {"sentence_id", inst.sentence_id},
                  {"target", inst.target},
                  {"label", inst.label},
                  {"form", inst.form}}
                 .dump()
          << '\n';
    }
  }
}

ProbingDataset read_probing(std::istream& in, ProbingTaskSpec spec) {
  ProbingDataset out;
  out.spec = std::move(spec);
  std::vector<ProbingInstance>* splits[] = {&out.train, &out.dev, &out.test};
  for_each_line(in, [&](const json& j) {
    const int split = split_index(j.at("split").get<std::string>());
    splits[split]->push_back(ProbingInstance{
        j.at("sentence_id").get<std::string>(), j.at("target").get<std::size_t>(),
        j.at("label").get<std::string>(), j.at("form").get<std::string>()});
  });
  return out;
}

void write_tagging(std::ostream& out, const TaggingDataset& dataset) {
  const std::vector<Sentence>* splits[] = {&dataset.train, &dataset.dev,
                                           &dataset.test};
  for (int i = 0; i < 3; ++i) {
    for (const Sentence& s : *splits[i]) {
      std::vector<std::string> tags;
      for (const Token& t : s.tokens) {
        const auto& tag = dataset.task == TaggingTask::kPos ? t.upos : t.ner;
        tags.push_back(tag.value_or(""));
      }
      out << json{{"split", kSplitNames[i]},
                  {"id", s.id},
                  {"words", words_of(s)},
                  {"tags", tags}}
                 .dump()
          << '\n';
    }
  }
}

TaggingDataset read_tagging(std::istream& in, TaggingTask task) {
  TaggingDataset out;
  out.task = task;
  std::vector<Sentence>* splits[] = {&out.train, &out.dev, &out.test};
  for_each_line(in, [&](const json& j) {
    const int split = split_index(j.at("split").get<std::string>());
    const auto& words = j.at("words");
    const auto& tags = j.at("tags");
    if (words.size() != tags.size() || words.empty()) {
      throw ParseError("words and tags differ in length or are empty");
    }
    Sentence s;
    s.id = j.at("id").get<std::string>();
    for (std::size_t i = 0; i < words.size(); ++i) {
      Token t;
      t.form = words[i].get<std::string>();
      auto tag = tags[i].get<std::string>();
      if (task == TaggingTask::kPos) {
        t.upos = std::move(tag);
      } else {
        if (!is_bio_tag(tag)) throw ParseError("invalid BIO tag '" + tag + "'");
        t.ner = std::move(tag);
      }
      s.tokens.push_back(std::move(t));
    }
    splits[split]->push_back(std::move(s));
  });
  return out;
}

json to_json(const ProbingTaskSpec& spec) {
  return json{{"id", spec.id()},
              {"language", spec.language},
              {"feature", spec.feature},
              {"upos", spec.upos},
              {"labels", spec.label_set}};
}

ProbingTaskSpec spec_from_json(const json& j) {
  ProbingTaskSpec spec;
  spec.language = j.at("language").get<std::string>();
  spec.feature = j.at("feature").get<std::string>();
  spec.upos = j.at("upos").get<std::string>();
  spec.label_set = j.at("labels").get<std::vector<std::string>>();
  return spec;
}

void write_manifest(const std::filesystem::path& path,
                    const ProbingManifest& manifest) {
  json tasks = json::array();
  for (const auto& entry : manifest.tasks) {
    json t = to_json(entry.spec);
    t["file"] = entry.file;
    tasks.push_back(std::move(t));
  }
  const json j{{"language", manifest.language},
               {"strip_diacritics", manifest.strip_diacritics},
               {"seed", manifest.seed},
               {"sentences", manifest.sentences_file},
               {"tasks", tasks}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ProbingManifest read_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    const json j = json::parse(text);
    ProbingManifest m;
    m.language = j.at("language").get<std::string>();
    m.strip_diacritics = j.value("strip_diacritics", false);
    m.seed = j.value("seed", std::uint64_t{0});
    m.sentences_file = j.value("sentences", std::string("sentences.jsonl"));
    for (const auto& t : j.at("tasks")) {
      m.tasks.push_back({spec_from_json(t), t.at("file").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace uralprobe::jsonl
