// Copyright 2026 The NOC Authors.
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

#include "noc/training.h"

#include <cmath>
#include <numeric>

#include "noc/errors.h"

namespace noc {

void TrainConfig::Validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(vision_lr_scale >= 0.0)) throw ConfigError("vision_lr_scale must be >= 0");
  if (batch_paired == 0 || batch_image == 0 || batch_text == 0) {
    throw ConfigError("batch sizes must be positive");
  }
}

std::vector<double> EpochMeans(std::span<const double> step_loss,
                               std::size_t steps_per_epoch) {
  std::vector<double> out;
  if (steps_per_epoch == 0) steps_per_epoch = 1;
  for (std::size_t start = 0; start < step_loss.size(); start += steps_per_epoch) {
    const std::size_t end = std::min(step_loss.size(), start + steps_per_epoch);
    double s = 0.0;
    for (std::size_t i = start; i < end; ++i) s += step_loss[i];
    out.push_back(s / static_cast<double>(end - start));
  }
  return out;
}

double ClipGlobalNorm(std::span<const ParameterPtr> params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params) {
    if (!p->trainable) continue;
    for (double g : p->grad.values()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (const auto& p : params) {
      if (!p->trainable) continue;
      for (double& g : p->grad.values()) g *= scale;
    }
  }
  return norm;
}

Adam::Adam(std::vector<ParameterPtr> params, double learning_rate, double beta1,
           double beta2, double epsilon)
    : params_(std::move(params)),
      lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon) {
  for (const auto& p : params_) {
    m_.push_back(Tensor::ZerosLike(p->value));
    v_.push_back(Tensor::ZerosLike(p->value));
    scale_.push_back(1.0);
    if (p->grad.shape() != p->value.shape()) p->ZeroGrad();
  }
}

void Adam::ZeroGrad() {
  for (const auto& p : params_) p->grad.Fill(0.0);
}

void Adam::Step() {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    if (!p.trainable) continue;
    double* w = p.value.raw();
    const double* g = p.grad.raw();
    double* m = m_[k].raw();
    double* v = v_[k].raw();
    const double lr = lr_ * scale_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
  ZeroGrad();
}

SourceSampler::SourceSampler(std::size_t n, std::uint64_t seed)
    : n_(n), rng_(seed), cursor_(0) {
  if (n_ > 0) Reshuffle();
}

void SourceSampler::Reshuffle() {
  order_.resize(n_);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  Shuffle(order_, rng_);
  cursor_ = 0;
}

std::vector<std::size_t> SourceSampler::Next(std::size_t batch) {
  std::vector<std::size_t> out;
  if (n_ == 0) return out;
  out.reserve(batch);
  while (out.size() < batch) {
    if (cursor_ == n_) Reshuffle();
    out.push_back(order_[cursor_++]);
  }
  return out;
}

SourceSampler::State SourceSampler::state() const {
  return State{SerializeRng(rng_), order_, cursor_};
}

void SourceSampler::Restore(const State& state) {
  if (state.order.size() != n_ || state.cursor > n_) {
    throw FormatError("sampler state does not match source size");
  }
  rng_ = DeserializeRng(state.rng);
  order_ = state.order;
  cursor_ = state.cursor;
}

}  // namespace noc
