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

#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "uralprobe/error.hpp"
#include "uralprobe/jsonl.hpp"

namespace uralprobe {
namespace {

TEST(Jsonl, SentencesRoundTrip) {
  Rng rng(1);
  fixture::TreebankParams p;
  p.sentences = 20;
  const Treebank tb = fixture::random_treebank(rng, p);
  std::stringstream buf;
  jsonl::write_sentences(buf, tb.sentences);
  const auto back = jsonl::read_sentences(buf);
  ASSERT_EQ(back.size(), tb.sentences.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, tb.sentences[i].id);
    ASSERT_EQ(back[i].tokens.size(), tb.sentences[i].tokens.size());
    for (std::size_t w = 0; w < back[i].tokens.size(); ++w) {
      EXPECT_EQ(back[i].tokens[w].form, tb.sentences[i].tokens[w].form);
    }
  }
}

TEST(Jsonl, SentenceLineLayout) {
  Token t;
  t.form = "Sámi";
  std::stringstream buf;
  jsonl::write_sentences(buf, std::vector<Sentence>{{"fi:1", {t}}});
  EXPECT_EQ(buf.str(), "{\"id\":\"fi:1\",\"words\":[\"Sámi\"]}\n");
}

TEST(Jsonl, ProbingRoundTrip) {
  ProbingDataset ds;
  ds.spec = {"fi", "Case", "NOUN", {"Gen", "Nom"}};
  ds.train = {{"a", 0, "Nom", "talo"}, {"b", 2, "Gen", "talon"}};
  ds.dev = {{"c", 1, "Nom", "koti"}};
  ds.test = {{"d", 3, "Gen", "kodin"}};
  std::stringstream buf;
  jsonl::write_probing(buf, ds);
  const auto back = jsonl::read_probing(buf, ds.spec);
  EXPECT_EQ(back.train, ds.train);
  EXPECT_EQ(back.dev, ds.dev);
  EXPECT_EQ(back.test, ds.test);
}

TEST(Jsonl, TaggingRoundTrip) {
  TaggingDataset ds;
  ds.task = TaggingTask::kNer;
  Token a;
  a.form = "Helsinki";
  a.ner = "B-LOC";
  Token b;
  b.form = "on";
  b.ner = "O";
  ds.train = {{"s1", {a, b}}};
  ds.dev = {{"s2", {b}}};
  ds.test = {{"s3", {a}}};
  std::stringstream buf;
  jsonl::write_tagging(buf, ds);
  const auto back = jsonl::read_tagging(buf, TaggingTask::kNer);
  EXPECT_EQ(back.train, ds.train);
  EXPECT_EQ(back.dev, ds.dev);
  EXPECT_EQ(back.test, ds.test);
}

TEST(Jsonl, ErrorsCarryLineNumbers) {
  std::stringstream buf("{\"id\":\"a\",\"words\":[\"x\"]}\n{broken\n");
  try {
    jsonl::read_sentences(buf);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::stringstream bad_tag(
      "{\"split\":\"train\",\"id\":\"a\",\"words\":[\"x\"],\"tags\":[\"X-LOC\"]}\n");
  EXPECT_THROW(jsonl::read_tagging(bad_tag, TaggingTask::kNer), ParseError);
}

TEST(Jsonl, ManifestRoundTrip) {
  fixture::TempDir dir;
  jsonl::ProbingManifest m;
  m.language = "et";
  m.strip_diacritics = true;
  m.seed = 77;
  m.tasks.push_back({{"et", "Case", "NOUN", {"Gen", "Nom"}}, "Case_NOUN.jsonl"});
  jsonl::write_manifest(dir / "tasks.json", m);
  const auto back = jsonl::read_manifest(dir / "tasks.json");
  EXPECT_EQ(back.language, "et");
  EXPECT_TRUE(back.strip_diacritics);
  EXPECT_EQ(back.seed, 77u);
  ASSERT_EQ(back.tasks.size(), 1u);
  EXPECT_EQ(back.tasks[0].spec, m.tasks[0].spec);
  EXPECT_EQ(back.tasks[0].file, "Case_NOUN.jsonl");
}

}  // namespace
}  // namespace uralprobe
