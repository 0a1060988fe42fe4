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

#ifndef NOC_CAPTION_MODEL_H_
#define NOC_CAPTION_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "noc/autodiff.h"
#include "noc/embedding.h"
#include "noc/language_model.h"
#include "noc/training.h"
#include "noc/visual_model.h"
#include "noc/vocab.h"

namespace noc {

struct PairedExample {
  std::string id;
  Tensor features;
  Sentence caption;
};

struct LossBreakdown {
  double l_cm = 0.0;
  double l_im = 0.0;
  double l_lm = 0.0;
  double total = 0.0;
};

// The caption model: an LSTM language model (theta_L) and a visual head
// (theta_I) whose vocabulary activations are summed before the softmax,
//
//   P(w_t | w_<t, I) = softmax(f_LM(w_<t) + f_IM(I))[w_t].
//
// The caption path holds the very same parameter objects as the standalone
// models; there is no copy to keep in sync.
class NocModel {
 public:
  NocModel(Vocabulary vocab, LanguageModel lm, VisualModel vision);

  const Vocabulary& vocab() const { return vocab_; }
  const EmbeddingTable& embeddings() const { return lm_.embeddings(); }
  const LanguageModel& lm() const { return lm_; }
  const VisualModel& vision() const { return vision_; }
  VisualModel& vision() { return vision_; }
  LanguageModel& lm() { return lm_; }

  // theta_L, theta_I, then the embedding table.
  std::vector<ParameterPtr> parameters() const;

  // One fused step: consumes `prev` and adds the per-image activations.
  // Returns the new state and f_CM = f_LM + f_IM (logits).
  std::pair<LmState, Var> FusedLogits(Graph& graph, const LmState& state,
                                      TokenId prev, Var image_activations) const;
  // As FusedLogits, followed by the softmax.
  std::pair<LmState, Var> FusedDistribution(Graph& graph, const LmState& state,
                                            TokenId prev,
                                            Var image_activations) const;

  // -sum_t log P(w_t | w_<t, I), teacher-forced; BOS in, EOS out.
  Var CaptionLoss(Graph& graph, const Tensor& features,
                  std::span<const TokenId> sentence) const;
  double CaptionLoss(const Tensor& features,
                     std::span<const TokenId> sentence) const;

 private:
  Vocabulary vocab_;
  LanguageModel lm_;
  VisualModel vision_;
};

// The joint objective on one graph:
//   total = mean L_CM(paired) + alpha * mean L_IM(images) + beta * mean L_LM(text)
// Empty batches contribute zero; all three empty is an ArgumentError.
struct JointLoss {
  Var l_cm;
  Var l_im;
  Var l_lm;
  Var total;
};
JointLoss BuildJointLoss(Graph& graph, const NocModel& model,
                         std::span<const PairedExample* const> paired,
                         std::span<const LabeledImage* const> images,
                         std::span<const Sentence* const> text,
                         const TrainConfig& config);

// One optimizer update on BuildJointLoss(...).total. The optimizer must
// cover model.parameters().
LossBreakdown JointStep(NocModel& model, Adam& optimizer,
                        std::span<const PairedExample* const> paired,
                        std::span<const LabeledImage* const> images,
                        std::span<const Sentence* const> text,
                        const TrainConfig& config);

struct TrainingSources {
  std::span<const PairedExample> paired;
  std::span<const LabeledImage> images;
  std::span<const Sentence> text;
};

// Joint training loop with resumable state. Each source is cycled
// independently in seeded-shuffled order.
class NocTrainer {
 public:
  NocTrainer(NocModel& model, TrainingSources sources, TrainConfig config);

  // Runs `steps` joint steps and appends them to log().
  void Run(std::size_t steps);

  const std::vector<LossBreakdown>& log() const { return log_; }
  std::uint64_t step() const { return step_; }
  Adam& optimizer() { return adam_; }
  SourceSampler& sampler(std::size_t source) { return samplers_.at(source); }
  void set_step(std::uint64_t step) { step_ = step; }
  const TrainConfig& config() const { return config_; }

 private:
  NocModel& model_;
  TrainingSources sources_;
  TrainConfig config_;
  Adam adam_;
  std::vector<SourceSampler> samplers_;
  std::uint64_t step_ = 0;
  std::vector<LossBreakdown> log_;
};

// Runs config.steps joint steps from a fresh trainer and returns the log.
std::vector<LossBreakdown> TrainNoc(NocModel& model, TrainingSources sources,
                                    const TrainConfig& config);

}  // namespace noc

#endif  // NOC_CAPTION_MODEL_H_
