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

#ifndef URALPROBE_NN_HPP_
#define URALPROBE_NN_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "uralprobe/random.hpp"

namespace uralprobe::nn {

inline constexpr std::size_t kHiddenUnits = 50;

// Dense row-major feature matrix with one label per row.
//
// Without layer mixing a row is one H-vector. With mixing a row holds the L
// layer vectors of the pooled subword, layer-major (L*H values).
struct LabeledData {
  std::size_t feature_size = 0;
  std::vector<float> features;
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(features).subspan(i * feature_size,
                                                    feature_size);
  }
  void add(std::span<const float> row, std::size_t label);
};

// One-hidden-layer classifier: logits = W2 * relu(W1 * x + b1) + b2, where x
// is either the input vector or a softmax-weighted mix of L layer vectors.
//
// All trainable values live in one contiguous buffer, in the order
// W1 (hidden x input, row-major), b1, W2 (classes x hidden, row-major), b2,
// mixing weights (L, absent without mixing).
class MlpModel {
 public:
  MlpModel(std::size_t input_dim, std::size_t num_classes,
           std::size_t mix_layers = 0, std::size_t hidden_units = kHiddenUnits);

  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases and mixing
  // weights zero.
  static MlpModel initialized(std::size_t input_dim, std::size_t num_classes,
                              std::size_t mix_layers, Rng& rng,
                              std::size_t hidden_units = kHiddenUnits);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_units() const { return hidden_units_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t mix_layers() const { return mix_layers_; }
  bool mixes() const { return mix_layers_ > 0; }
  std::size_t feature_size() const {
    return mixes() ? mix_layers_ * input_dim_ : input_dim_;
  }

  // input*hidden + hidden + hidden*classes + classes (+ layers when mixing)
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  std::span<const double> w1() const { return slice(0, hidden_units_ * input_dim_); }
  std::span<const double> b1() const { return slice(b1_offset(), hidden_units_); }
  std::span<const double> w2() const { return slice(w2_offset(), num_classes_ * hidden_units_); }
  std::span<const double> b2() const { return slice(b2_offset(), num_classes_); }
  std::span<const double> mix_weights() const { return slice(mix_offset(), mix_layers_); }

  std::span<double> w1() { return slice(0, hidden_units_ * input_dim_); }
  std::span<double> b1() { return slice(b1_offset(), hidden_units_); }
  std::span<double> w2() { return slice(w2_offset(), num_classes_ * hidden_units_); }
  std::span<double> b2() { return slice(b2_offset(), num_classes_); }
  std::span<double> mix_weights() { return slice(mix_offset(), mix_layers_); }

  std::size_t b1_offset() const { return hidden_units_ * input_dim_; }
  std::size_t w2_offset() const { return b1_offset() + hidden_units_; }
  std::size_t b2_offset() const { return w2_offset() + num_classes_ * hidden_units_; }
  std::size_t mix_offset() const { return b2_offset() + num_classes_; }

  bool all_finite() const;

 private:
  std::span<const double> slice(std::size_t offset, std::size_t n) const {
    return std::span<const double>(params_).subspan(offset, n);
  }
  std::span<double> slice(std::size_t offset, std::size_t n) {
    return std::span<double>(params_).subspan(offset, n);
  }

  std::size_t input_dim_;
  std::size_t hidden_units_;
  std::size_t num_classes_;
  std::size_t mix_layers_;
  std::vector<double> params_;
};

// Logits for one example. In train mode inverted dropout (zero with
// probability `dropout`, scale survivors by 1/(1-dropout)) is applied to the
// hidden activations using `rng`; eval mode is deterministic. Throws
// InvalidArgument on a non-finite or wrongly sized input.
std::vector<double> mlp_forward(const MlpModel& model,
                                std::span<const float> features,
                                bool train_mode = false, Rng* rng = nullptr,
                                double dropout = 0.0);

struct LossAndGrads {
  double loss = 0.0;
  std::vector<double> grads;  // same layout as MlpModel::parameters()
};

// Mean softmax cross-entropy over the rows `batch` of `data` and its gradient
// for every trainable value. Throws InvalidArgument on an empty batch or a
// label >= num_classes.
LossAndGrads loss_and_grads(const MlpModel& model, const LabeledData& data,
                            std::span<const std::size_t> batch,
                            bool train_mode = false, Rng* rng = nullptr,
                            double dropout = 0.0);

struct AdamWConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct AdamWState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  explicit AdamWState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// p <- p - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * p, with bias-corrected
// moments and decay applied to the pre-step value.
void adamw_step(std::span<double> params, std::span<const double> grads,
                AdamWState& state, const AdamWConfig& cfg = {});

struct TrainConfig {
  std::size_t batch_size = 128;
  double dropout = 0.2;
  std::size_t patience = 5;
  std::size_t max_epochs = 200;
  std::uint64_t seed = 0;
  AdamWConfig optimizer;

  void validate() const;
};

// Patience rule over a score that should increase.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  // Records one evaluation; returns true when it is a new best.
  bool observe(double score);
  bool should_stop() const { return since_best_ >= patience_; }
  std::size_t evaluations() const { return evaluations_; }
  double best() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t since_best_ = 0;
  std::size_t evaluations_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_accuracy = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_dev_accuracy = 0.0;

  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

struct TrainResult {
  MlpModel model;  // best-dev snapshot
  TrainHistory history;
};

// Minibatch AdamW with a seeded per-epoch shuffle; dev accuracy after every
// epoch; stops after `patience` epochs without improvement or at max_epochs.
// Throws InvalidArgument on an empty train or dev set and Error when the
// parameters stop being finite.
TrainResult train(MlpModel model, const LabeledData& train_set,
                  const LabeledData& dev_set, const TrainConfig& cfg);

// Eval-mode argmax per row.
std::vector<std::size_t> predict(const MlpModel& model, const LabeledData& data);

}  // namespace uralprobe::nn

#endif  // URALPROBE_NN_HPP_
