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

#ifndef NOC_LANGUAGE_MODEL_H_
#define NOC_LANGUAGE_MODEL_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "noc/autodiff.h"
#include "noc/embedding.h"
#include "noc/training.h"
#include "noc/vocab.h"

namespace noc {

using Sentence = std::vector<TokenId>;

// Recurrent state, bound to one graph.
struct LmState {
  Var hidden;
  Var cell;
};

// Single-layer LSTM language model with tied input/output embeddings:
//
//   x_t   = E[w_{t-1}]
//   gates = W_x x_t + W_h h_{t-1} + b          (order: input, forget, output, cell)
//   h_t   = o * tanh(f * c_{t-1} + i * g)
//   u_t   = W_out h_t + b_out                  (H -> d, linear)
//   f_LM  = E u_t                              (d -> V, no bias)
class LanguageModel {
 public:
  static constexpr double kInitScale = 0.08;
  static constexpr double kForgetBias = 1.0;

  LanguageModel() = default;
  // Weights uniform in [-kInitScale, kInitScale], forget-gate bias kForgetBias,
  // other biases zero.
  LanguageModel(EmbeddingTable embeddings, std::size_t hidden,
                std::uint64_t seed);
  // Every parameter zero (the embeddings are left as given).
  static LanguageModel Zeros(EmbeddingTable embeddings, std::size_t hidden);

  std::size_t hidden_size() const { return hidden_; }
  std::size_t embed_dim() const { return embeddings_.dim(); }
  std::size_t vocab_size() const { return embeddings_.vocab_size(); }
  const EmbeddingTable& embeddings() const { return embeddings_; }

  // The LSTM and W_out arrays; the embedding table is not included.
  std::vector<ParameterPtr> parameters() const;
  const ParameterPtr& input_weights() const { return w_x_; }
  const ParameterPtr& recurrent_weights() const { return w_h_; }
  const ParameterPtr& gate_bias() const { return b_; }
  const ParameterPtr& output_weights() const { return w_out_; }
  const ParameterPtr& output_bias() const { return b_out_; }

  LmState InitialState(Graph& graph) const;
  // Consumes `token`; returns the next state and the logits f_LM over V.
  std::pair<LmState, Var> Step(Graph& graph, const LmState& state,
                               TokenId token) const;

  // -sum_t log softmax(f_LM)[w_t], teacher-forced, with BOS as the first
  // input and EOS as the final target.
  Var Loss(Graph& graph, std::span<const TokenId> sentence) const;
  double Loss(std::span<const TokenId> sentence) const;

 private:
  EmbeddingTable embeddings_;
  std::size_t hidden_ = 0;
  ParameterPtr w_x_, w_h_, b_, w_out_, b_out_;
};

// Minibatch Adam on the mean sentence loss.
TrainingLog LmPretrain(LanguageModel& lm, std::span<const Sentence> corpus,
                       const TrainConfig& config);

}  // namespace noc

#endif  // NOC_LANGUAGE_MODEL_H_
