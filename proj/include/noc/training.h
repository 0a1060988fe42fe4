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

#ifndef NOC_TRAINING_H_
#define NOC_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noc/autodiff.h"
#include "noc/random.h"

namespace noc {

struct TrainConfig {
  double alpha = 1.0;  // weight of the image-only loss
  double beta = 1.0;   // weight of the text-only loss
  double learning_rate = 5e-3;
  std::size_t batch_paired = 8;
  std::size_t batch_image = 8;
  std::size_t batch_text = 8;
  std::size_t steps = 1000;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;
  // Learning-rate multiplier for the visual head during joint training.
  double vision_lr_scale = 0.1;

  void Validate() const;
};

struct TrainingLog {
  std::vector<double> step_loss;
  // Mean of step_loss over each pass through the data (last pass may be
  // partial).
  std::vector<double> epoch_loss;
};

// Splits step losses into epochs of `steps_per_epoch`.
std::vector<double> EpochMeans(std::span<const double> step_loss,
                               std::size_t steps_per_epoch);

// Scales all trainable gradients so their joint L2 norm is at most
// `max_norm`. Returns the norm before clipping. max_norm <= 0 disables.
double ClipGlobalNorm(std::span<const ParameterPtr> params, double max_norm);

// Adam with bias correction. Only parameters flagged trainable at Step()
// time are updated; every gradient is zeroed afterwards.
class Adam {
 public:
  Adam(std::vector<ParameterPtr> params, double learning_rate,
       double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void ZeroGrad();
  void Step();

  const std::vector<ParameterPtr>& params() const { return params_; }
  std::uint64_t step_count() const { return t_; }
  std::vector<Tensor>& first_moments() { return m_; }
  std::vector<Tensor>& second_moments() { return v_; }
  void set_step_count(std::uint64_t t) { t_ = t; }
  // Multiplies the learning rate of parameter `index` (default 1).
  void set_lr_scale(std::size_t index, double scale) { scale_.at(index) = scale; }

 private:
  std::vector<ParameterPtr> params_;
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::vector<double> scale_;
};

// Cycles through indices [0, n) in a freshly shuffled order per pass, using a
// private stream so sources advance independently.
class SourceSampler {
 public:
  SourceSampler() = default;
  SourceSampler(std::size_t n, std::uint64_t seed);

  // Next `batch` indices; empty when n == 0.
  std::vector<std::size_t> Next(std::size_t batch);

  std::size_t size() const { return n_; }

  struct State {
    std::string rng;
    std::vector<std::size_t> order;
    std::size_t cursor = 0;
  };
  State state() const;
  void Restore(const State& state);

 private:
  void Reshuffle();

  std::size_t n_ = 0;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

}  // namespace noc

#endif  // NOC_TRAINING_H_
