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

#ifndef URALPROBE_CHECKPOINT_HPP_
#define URALPROBE_CHECKPOINT_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "uralprobe/nn.hpp"

// Model checkpoint: "ULMLP01\n", u32 little-endian header length, header JSON
// (dimensions, hyperparameters, seed, caller metadata), then every trainable
// tensor as little-endian float32 in MlpModel::parameters() order.
namespace uralprobe {

inline constexpr std::string_view kCheckpointMagic{"ULMLP01\n", 8};

struct Checkpoint {
  nn::MlpModel model;
  nlohmann::json header;
};

std::string encode_checkpoint(const nn::MlpModel& model,
                              const nn::TrainConfig& cfg,
                              const nlohmann::json& metadata);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path,
                     const nn::MlpModel& model, const nn::TrainConfig& cfg,
                     const nlohmann::json& metadata);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json to_json(const nn::TrainConfig& cfg);

}  // namespace uralprobe

#endif  // URALPROBE_CHECKPOINT_HPP_
