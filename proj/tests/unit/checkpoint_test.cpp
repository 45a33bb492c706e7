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

#include "fixtures.hpp"
#include "uralprobe/checkpoint.hpp"
#include "uralprobe/error.hpp"

namespace uralprobe {
namespace {

TEST(Checkpoint, RoundTripStoresFloat32) {
  Rng rng(1);
  const nn::MlpModel m = nn::MlpModel::initialized(12, 4, 3, rng);
  nn::TrainConfig cfg;
  cfg.seed = 99;
  fixture::TempDir dir;
  save_checkpoint(dir / "m.ckpt", m, cfg, {{"labels", {"a", "b", "c", "d"}}});
  const Checkpoint c = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(c.model.input_dim(), 12u);
  EXPECT_EQ(c.model.num_classes(), 4u);
  EXPECT_EQ(c.model.mix_layers(), 3u);
  EXPECT_EQ(c.header["seed"], 99);
  EXPECT_EQ(c.header["hyperparameters"]["lr"], 1e-4);
  EXPECT_EQ(c.header["metadata"]["labels"][3], "d");
  for (std::size_t i = 0; i < m.parameter_count(); ++i) {
    EXPECT_EQ(c.model.parameters()[i], static_cast<double>(static_cast<float>(m.parameters()[i])));
  }
}

TEST(Checkpoint, RejectsDamagedFiles) {
  const nn::MlpModel m(3, 2);
  const std::string bytes = encode_checkpoint(m, {}, nlohmann::json::object());
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad), FormatError);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 1)), LengthError);
  EXPECT_THROW(decode_checkpoint(bytes + "abcd"), LengthError);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, 10)), LengthError);
}

}  // namespace
}  // namespace uralprobe
