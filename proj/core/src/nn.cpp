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

#include "uralprobe/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uralprobe/embstore.hpp"
#include "uralprobe/error.hpp"
#include "uralprobe/metrics.hpp"

namespace uralprobe::nn {
namespace {

struct Activations {
  std::vector<double> x;       // classifier input (mixed when mixing)
  std::vector<double> pre;     // W1 x + b1
  std::vector<double> mask;    // dropout scale per hidden unit
  std::vector<double> hidden;  // relu(pre) * mask
  std::vector<double> logits;
};

void check_features(const MlpModel& model, std::span<const float> features) {
  if (features.size() != model.feature_size()) {
    throw InvalidArgument("expected " + std::to_string(model.feature_size()) +
                          " input values, got " +
                          std::to_string(features.size()));
  }
  for (float v : features) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite input value");
  }
}

void forward(const MlpModel& model, std::span<const float> features,
             bool train_mode, Rng* rng, double dropout, Activations& a) {
  const std::size_t in = model.input_dim();
  const std::size_t hid = model.hidden_units();
  const std::size_t out = model.num_classes();

  if (model.mixes()) {
    a.x = mix_layers(features, model.mix_weights(), in);
  } else {
    a.x.assign(features.begin(), features.end());
  }

  const auto w1 = model.w1();
  const auto b1 = model.b1();
  a.pre.resize(hid);
  a.mask.assign(hid, 1.0);
  a.hidden.resize(hid);
  const bool drop = train_mode && dropout > 0.0;
  if (drop && rng == nullptr) {
    throw InvalidArgument("train-mode dropout needs a random generator");
  }
  const double keep_scale = drop ? 1.0 / (1.0 - dropout) : 1.0;
  for (std::size_t j = 0; j < hid; ++j) {
    const double* row = w1.data() + j * in;
    double s = b1[j];
    for (std::size_t i = 0; i < in; ++i) s += row[i] * a.x[i];
    a.pre[j] = s;
    if (drop) a.mask[j] = rng->uniform01() < dropout ? 0.0 : keep_scale;
    a.hidden[j] = (s > 0.0 ? s : 0.0) * a.mask[j];
  }

  const auto w2 = model.w2();
  const auto b2 = model.b2();
  a.logits.resize(out);
  for (std::size_t k = 0; k < out; ++k) {
    const double* row = w2.data() + k * hid;
    double s = b2[k];
    for (std::size_t j = 0; j < hid; ++j) s += row[j] * a.hidden[j];
    a.logits[k] = s;
  }
}

}  // namespace

void LabeledData::add(std::span<const float> row, std::size_t label) {
  if (feature_size == 0) feature_size = row.size();
  if (row.size() != feature_size) {
    throw InvalidArgument("row has " + std::to_string(row.size()) +
                          " values, expected " + std::to_string(feature_size));
  }
  features.insert(features.end(), row.begin(), row.end());
  labels.push_back(label);
}

MlpModel::MlpModel(std::size_t input_dim, std::size_t num_classes,
                   std::size_t mix_layers, std::size_t hidden_units)
    : input_dim_(input_dim),
      hidden_units_(hidden_units),
      num_classes_(num_classes),
      mix_layers_(mix_layers) {
  if (input_dim == 0 || num_classes == 0 || hidden_units == 0) {
    throw InvalidArgument("MLP dimensions must be positive");
  }
  params_.assign(input_dim * hidden_units + hidden_units +
                     hidden_units * num_classes + num_classes + mix_layers,
                 0.0);
}

MlpModel MlpModel::initialized(std::size_t input_dim, std::size_t num_classes,
                               std::size_t mix_layers, Rng& rng,
                               std::size_t hidden_units) {
  MlpModel m(input_dim, num_classes, mix_layers, hidden_units);
  const double limit1 =
      std::sqrt(6.0 / static_cast<double>(input_dim + hidden_units));
  for (double& w : m.w1()) w = rng.uniform(-limit1, limit1);
  const double limit2 =
      std::sqrt(6.0 / static_cast<double>(hidden_units + num_classes));
  for (double& w : m.w2()) w = rng.uniform(-limit2, limit2);
  return m;
}

bool MlpModel::all_finite() const {
  return std::all_of(params_.begin(), params_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::vector<double> mlp_forward(const MlpModel& model,
                                std::span<const float> features,
                                bool train_mode, Rng* rng, double dropout) {
  check_features(model, features);
  Activations a;
  forward(model, features, train_mode, rng, dropout, a);
  return a.logits;
}

LossAndGrads loss_and_grads(const MlpModel& model, const LabeledData& data,
                            std::span<const std::size_t> batch,
                            bool train_mode, Rng* rng, double dropout) {
  if (batch.empty()) throw InvalidArgument("empty batch");
  const std::size_t in = model.input_dim();
  const std::size_t hid = model.hidden_units();
  const std::size_t out = model.num_classes();

  LossAndGrads result;
  result.grads.assign(model.parameter_count(), 0.0);
  std::span<double> g(result.grads);
  double* g_w1 = g.data();
  double* g_b1 = g.data() + model.b1_offset();
  double* g_w2 = g.data() + model.w2_offset();
  double* g_b2 = g.data() + model.b2_offset();
  double* g_mix = g.data() + model.mix_offset();
  const auto w1 = model.w1();
  const auto w2 = model.w2();
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  Activations a;
  std::vector<double> d_logits(out);
  std::vector<double> d_pre(hid);
  std::vector<double> d_x(in);
  for (std::size_t idx : batch) {
    if (idx >= data.size()) throw InvalidArgument("batch index out of range");
    const std::size_t label = data.labels[idx];
    if (label >= out) {
      throw InvalidArgument("label " + std::to_string(label) + " >= K=" +
                            std::to_string(out));
    }
    const auto features = data.row(idx);
    check_features(model, features);
    forward(model, features, train_mode, rng, dropout, a);

    const double max = *std::max_element(a.logits.begin(), a.logits.end());
    double z = 0.0;
    for (std::size_t k = 0; k < out; ++k) z += std::exp(a.logits[k] - max);
    const double log_z = max + std::log(z);
    result.loss += (log_z - a.logits[label]) * inv_batch;

    for (std::size_t k = 0; k < out; ++k) {
      d_logits[k] = (std::exp(a.logits[k] - log_z) - (k == label ? 1.0 : 0.0)) *
                    inv_batch;
      g_b2[k] += d_logits[k];
      double* row = g_w2 + k * hid;
      for (std::size_t j = 0; j < hid; ++j) row[j] += d_logits[k] * a.hidden[j];
    }
    for (std::size_t j = 0; j < hid; ++j) {
      double d_hidden = 0.0;
      for (std::size_t k = 0; k < out; ++k) d_hidden += w2[k * hid + j] * d_logits[k];
      d_pre[j] = a.pre[j] > 0.0 ? d_hidden * a.mask[j] : 0.0;
    }
    for (std::size_t j = 0; j < hid; ++j) {
      if (d_pre[j] == 0.0) continue;
      g_b1[j] += d_pre[j];
      double* row = g_w1 + j * in;
      for (std::size_t i = 0; i < in; ++i) row[i] += d_pre[j] * a.x[i];
    }
    if (model.mixes()) {
      std::fill(d_x.begin(), d_x.end(), 0.0);
      for (std::size_t j = 0; j < hid; ++j) {
        if (d_pre[j] == 0.0) continue;
        const double* row = w1.data() + j * in;
        for (std::size_t i = 0; i < in; ++i) d_x[i] += row[i] * d_pre[j];
      }
      const auto d_mix =
          mix_layers_backward(features, model.mix_weights(),
                              std::span<const double>(d_x));
      for (std::size_t l = 0; l < d_mix.size(); ++l) g_mix[l] += d_mix[l];
    }
  }
  return result;
}

void adamw_step(std::span<double> params, std::span<const double> grads,
                AdamWState& state, const AdamWConfig& cfg) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw InvalidArgument("AdamW: parameter, gradient and state sizes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    const double p = params[i];
    params[i] = p - cfg.lr * (m_hat / (std::sqrt(v_hat) + cfg.eps)) -
                cfg.lr * cfg.weight_decay * p;
  }
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw InvalidArgument("dropout must be in [0, 1)");
  }
  if (max_epochs == 0) throw InvalidArgument("max_epochs must be >= 1");
  if (patience == 0) throw InvalidArgument("patience must be >= 1");
}

bool EarlyStopper::observe(double score) {
  ++evaluations_;
  if (score > best_) {
    best_ = score;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

std::vector<std::size_t> predict(const MlpModel& model, const LabeledData& data) {
  std::vector<std::size_t> out;
  out.reserve(data.size());
  Activations a;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto features = data.row(i);
    check_features(model, features);
    forward(model, features, false, nullptr, 0.0, a);
    out.push_back(static_cast<std::size_t>(
        std::max_element(a.logits.begin(), a.logits.end()) - a.logits.begin()));
  }
  return out;
}

TrainResult train(MlpModel model, const LabeledData& train_set,
                  const LabeledData& dev_set, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.size() == 0) throw InvalidArgument("empty training set");
  if (dev_set.size() == 0) throw InvalidArgument("empty development set");

  Rng rng(cfg.seed);
  AdamWState state(model.parameter_count());
  EarlyStopper stopper(cfg.patience);
  TrainResult result{model, {}};

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      LossAndGrads lg =
          loss_and_grads(model, train_set, batch, true, &rng, cfg.dropout);
      adamw_step(model.parameters(), lg.grads, state, cfg.optimizer);
      loss_sum += lg.loss * static_cast<double>(batch.size());
    }
    if (!model.all_finite()) {
      throw Error("training diverged: non-finite parameters after epoch " +
                  std::to_string(epoch));
    }
    const double dev_acc = accuracy(predict(model, dev_set), dev_set.labels);
    result.history.epochs.push_back(
        {epoch, loss_sum / static_cast<double>(order.size()), dev_acc});
    if (stopper.observe(dev_acc)) {
      result.model = model;
      result.history.best_epoch = epoch;
      result.history.best_dev_accuracy = dev_acc;
    }
    if (stopper.should_stop()) break;
  }
  return result;
}

}  // namespace uralprobe::nn
