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

#include "noc/caption_model.h"

#include <algorithm>

#include "noc/errors.h"

namespace noc {

NocModel::NocModel(Vocabulary vocab, LanguageModel lm, VisualModel vision)
    : vocab_(std::move(vocab)), lm_(std::move(lm)), vision_(std::move(vision)) {
  if (lm_.vocab_size() != vocab_.size()) {
    throw DimensionError("embedding table has " + std::to_string(lm_.vocab_size()) +
                         " rows for a vocabulary of " + std::to_string(vocab_.size()));
  }
  if (vision_.vocab_size() != vocab_.size()) {
    throw DimensionError("visual head emits " + std::to_string(vision_.vocab_size()) +
                         " activations for a vocabulary of " +
                         std::to_string(vocab_.size()));
  }
}

std::vector<ParameterPtr> NocModel::parameters() const {
  std::vector<ParameterPtr> out = lm_.parameters();
  for (const auto& p : vision_.parameters()) out.push_back(p);
  out.push_back(embeddings().parameter());
  return out;
}

std::pair<LmState, Var> NocModel::FusedLogits(Graph& graph, const LmState& state,
                                              TokenId prev,
                                              Var image_activations) const {
  auto [next, lm_logits] = lm_.Step(graph, state, prev);
  if (image_activations.value().shape() != lm_logits.value().shape()) {
    throw DimensionError("fusion: image activations " +
                         ShapeString(image_activations.value().shape()) +
                         " vs language activations " +
                         ShapeString(lm_logits.value().shape()));
  }
  return {next, lm_logits + image_activations};
}

std::pair<LmState, Var> NocModel::FusedDistribution(Graph& graph,
                                                    const LmState& state,
                                                    TokenId prev,
                                                    Var image_activations) const {
  auto [next, logits] = FusedLogits(graph, state, prev, image_activations);
  return {next, Softmax(logits)};
}

Var NocModel::CaptionLoss(Graph& graph, const Tensor& features,
                          std::span<const TokenId> sentence) const {
  if (sentence.empty()) throw ArgumentError("caption_loss: empty sentence");
  Var image = vision_.Activations(graph, features);
  LmState state = lm_.InitialState(graph);
  std::vector<Var> terms;
  terms.reserve(sentence.size() + 1);
  TokenId prev = kBos;
  for (std::size_t t = 0; t <= sentence.size(); ++t) {
    const TokenId target = t < sentence.size() ? sentence[t] : kEos;
    auto [next, logits] = FusedLogits(graph, state, prev, image);
    terms.push_back(NegLogSoftmax(logits, target));
    state = next;
    prev = target;
  }
  return AddN(terms);
}

double NocModel::CaptionLoss(const Tensor& features,
                             std::span<const TokenId> sentence) const {
  Graph graph;
  return CaptionLoss(graph, features, sentence).value().item();
}

namespace {

// Mean of `terms`, or a constant zero when there are none.
Var MeanOrZero(Graph& graph, std::vector<Var>& terms) {
  if (terms.empty()) return graph.Constant(Tensor::Scalar(0.0));
  return Scale(AddN(terms), 1.0 / static_cast<double>(terms.size()));
}

}  // namespace

JointLoss BuildJointLoss(Graph& graph, const NocModel& model,
                         std::span<const PairedExample* const> paired,
                         std::span<const LabeledImage* const> images,
                         std::span<const Sentence* const> text,
                         const TrainConfig& config) {
  if (paired.empty() && images.empty() && text.empty()) {
    throw ArgumentError("joint_step: all three batches are empty");
  }
  std::vector<Var> cm, im, lm;
  for (const auto* ex : paired) {
    cm.push_back(model.CaptionLoss(graph, ex->features, ex->caption));
  }
  for (const auto* ex : images) {
    im.push_back(model.vision().Loss(graph, ex->features, ex->labels));
  }
  for (const auto* s : text) lm.push_back(model.lm().Loss(graph, *s));

  JointLoss out;
  out.l_cm = MeanOrZero(graph, cm);
  out.l_im = MeanOrZero(graph, im);
  out.l_lm = MeanOrZero(graph, lm);
  const Var weighted[] = {out.l_cm, Scale(out.l_im, config.alpha),
                          Scale(out.l_lm, config.beta)};
  out.total = AddN(weighted);
  return out;
}

LossBreakdown JointStep(NocModel& model, Adam& optimizer,
                        std::span<const PairedExample* const> paired,
                        std::span<const LabeledImage* const> images,
                        std::span<const Sentence* const> text,
                        const TrainConfig& config) {
  Graph graph;
  const JointLoss loss = BuildJointLoss(graph, model, paired, images, text, config);
  graph.AccumulateGradients(loss.total);
  ClipGlobalNorm(optimizer.params(), config.clip_norm);
  optimizer.Step();
  return LossBreakdown{loss.l_cm.value().item(), loss.l_im.value().item(),
                       loss.l_lm.value().item(), loss.total.value().item()};
}

NocTrainer::NocTrainer(NocModel& model, TrainingSources sources,
                       TrainConfig config)
    : model_(model),
      sources_(sources),
      config_(config),
      adam_(model.parameters(), config.learning_rate) {
  config_.Validate();
  if (sources_.paired.empty()) throw ArgumentError("train_noc: no paired data");
  const auto vision = model.vision().parameters();
  for (std::size_t k = 0; k < adam_.params().size(); ++k) {
    if (std::find(vision.begin(), vision.end(), adam_.params()[k]) != vision.end()) {
      adam_.set_lr_scale(k, config_.vision_lr_scale);
    }
  }
  samplers_.emplace_back(sources_.paired.size(), DeriveSeed(config_.seed, 1));
  samplers_.emplace_back(sources_.images.size(), DeriveSeed(config_.seed, 2));
  samplers_.emplace_back(sources_.text.size(), DeriveSeed(config_.seed, 3));
}

void NocTrainer::Run(std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) {
    std::vector<const PairedExample*> paired;
    std::vector<const LabeledImage*> images;
    std::vector<const Sentence*> text;
    for (std::size_t i : samplers_[0].Next(config_.batch_paired)) {
      paired.push_back(&sources_.paired[i]);
    }
    for (std::size_t i : samplers_[1].Next(config_.batch_image)) {
      images.push_back(&sources_.images[i]);
    }
    for (std::size_t i : samplers_[2].Next(config_.batch_text)) {
      text.push_back(&sources_.text[i]);
    }
    log_.push_back(JointStep(model_, adam_, paired, images, text, config_));
    ++step_;
  }
}

std::vector<LossBreakdown> TrainNoc(NocModel& model, TrainingSources sources,
                                    const TrainConfig& config) {
  NocTrainer trainer(model, sources, config);
  trainer.Run(config.steps);
  return trainer.log();
}

}  // namespace noc
