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

#include "uralprobe/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <optional>

#include "uralprobe/corpus.hpp"
#include "uralprobe/error.hpp"

namespace uralprobe {
namespace {

using nlohmann::json;

void append_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xffu));
  }
}

std::uint32_t read_u32(std::string_view b, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) {
    v = (v << 8) | static_cast<std::uint8_t>(b[pos + static_cast<std::size_t>(i)]);
  }
  return v;
}

}  // namespace

json to_json(const nn::TrainConfig& cfg) {
  return json{{"batch_size", cfg.batch_size},
              {"dropout", cfg.dropout},
              {"patience", cfg.patience},
              {"max_epochs", cfg.max_epochs},
              {"seed", cfg.seed},
              {"lr", cfg.optimizer.lr},
              {"beta1", cfg.optimizer.beta1},
              {"beta2", cfg.optimizer.beta2},
              {"eps", cfg.optimizer.eps},
              {"weight_decay", cfg.optimizer.weight_decay}};
}

std::string encode_checkpoint(const nn::MlpModel& model,
                              const nn::TrainConfig& cfg,
                              const json& metadata) {
  const json header{{"input_dim", model.input_dim()},
                    {"hidden_units", model.hidden_units()},
                    {"num_classes", model.num_classes()},
                    {"mix_layers", model.mix_layers()},
                    {"parameter_count", model.parameter_count()},
                    {"hyperparameters", to_json(cfg)},
                    {"seed", cfg.seed},
                    {"metadata", metadata}};
  const std::string text = header.dump();
  std::string out(kCheckpointMagic);
  append_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (double p : model.parameters()) {
    append_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p)));
  }
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  if (bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw FormatError("not a model checkpoint (bad magic)");
  }
  std::size_t pos = kCheckpointMagic.size();
  if (bytes.size() < pos + 4) throw LengthError("truncated checkpoint header");
  const std::uint32_t len = read_u32(bytes, pos);
  pos += 4;
  if (bytes.size() - pos < len) throw LengthError("truncated checkpoint header");
  json header;
  try {
    header = json::parse(bytes.substr(pos, len));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint header is not JSON: ") + e.what());
  }
  pos += len;

  std::optional<nn::MlpModel> built;
  try {
    built.emplace(header.at("input_dim").get<std::size_t>(),
                  header.at("num_classes").get<std::size_t>(),
                  header.at("mix_layers").get<std::size_t>(),
                  header.at("hidden_units").get<std::size_t>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint header: ") + e.what());
  }
  nn::MlpModel& model = *built;
  auto params = model.parameters();
  if ((bytes.size() - pos) != params.size() * 4) {
    throw LengthError("checkpoint holds " + std::to_string(bytes.size() - pos) +
                      " tensor bytes, expected " +
                      std::to_string(params.size() * 4));
  }
  for (double& p : params) {
    p = static_cast<double>(std::bit_cast<float>(read_u32(bytes, pos)));
    pos += 4;
  }
  return Checkpoint{std::move(model), std::move(header)};
}

void save_checkpoint(const std::filesystem::path& path,
                     const nn::MlpModel& model, const nn::TrainConfig& cfg,
                     const json& metadata) {
  const std::string bytes = encode_checkpoint(model, cfg, metadata);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace uralprobe
