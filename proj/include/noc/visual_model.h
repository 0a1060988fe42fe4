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

#ifndef NOC_VISUAL_MODEL_H_
#define NOC_VISUAL_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "noc/autodiff.h"
#include "noc/training.h"
#include "noc/vocab.h"

namespace noc {

// Positive labels over the vocabulary; z_l = 1 exactly for l in `ids`.
class LabelVector {
 public:
  LabelVector() = default;
  // Sorts and deduplicates.
  explicit LabelVector(std::vector<TokenId> ids);

  const std::vector<TokenId>& ids() const { return ids_; }
  bool Contains(TokenId id) const;
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  // Binary vector z of length vocab_size; IndexError on an out-of-range id.
  Tensor Dense(std::size_t vocab_size) const;

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<TokenId> ids_;
};

struct LabeledImage {
  std::string id;
  Tensor features;
  LabelVector labels;
};

// Distinct caption words that are neither stopwords nor control tokens.
LabelVector ExtractLabels(std::span<const TokenId> caption,
                          const std::unordered_set<TokenId>& stopwords);

// The bundled stopword list (one lowercase word per entry).
const std::vector<std::string>& DefaultStopwords();
std::unordered_set<TokenId> StopwordIds(const Vocabulary& vocab,
                                        std::span<const std::string> words);

// Image-only loss from raw activations f_IM over the vocabulary:
//   -sum_l [ z_l log S_l(f) + (1 - z_l) log(1 - S_l(f)) ]
// where S is a softmax across the whole vocabulary (not per-label sigmoids).
Var ImageLossFromActivations(Graph& graph, Var activations,
                             const LabelVector& labels);

// Two-layer perceptron F -> H_v (ReLU) -> V producing f_IM.
class VisualModel {
 public:
  VisualModel() = default;
  VisualModel(std::size_t feature_dim, std::size_t hidden,
              std::size_t vocab_size, std::uint64_t seed);
  static VisualModel Zeros(std::size_t feature_dim, std::size_t hidden,
                           std::size_t vocab_size);

  std::size_t feature_dim() const { return w1_->value.dim(1); }
  std::size_t hidden_size() const { return w1_->value.dim(0); }
  std::size_t vocab_size() const { return w2_->value.dim(0); }

  std::vector<ParameterPtr> parameters() const { return {w1_, b1_, w2_, b2_}; }
  void set_trainable(bool trainable);

  Var Activations(Graph& graph, const Tensor& features) const;
  Tensor Activations(const Tensor& features) const;

  Var Loss(Graph& graph, const Tensor& features, const LabelVector& labels) const;
  double Loss(const Tensor& features, const LabelVector& labels) const;

 private:
  ParameterPtr w1_, b1_, w2_, b2_;
};

// Minibatch Adam on the mean image loss.
TrainingLog VisionPretrain(VisualModel& vision,
                           std::span<const LabeledImage> data,
                           const TrainConfig& config);

}  // namespace noc

#endif  // NOC_VISUAL_MODEL_H_
