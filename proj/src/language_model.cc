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

#include "noc/language_model.h"

#include "noc/errors.h"
#include "noc/random.h"

namespace noc {

namespace {

Tensor UniformTensor(Shape shape, Rng& rng, double scale) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = Uniform(rng, -scale, scale);
  return t;
}

}  // namespace

LanguageModel::LanguageModel(EmbeddingTable embeddings, std::size_t hidden,
                             std::uint64_t seed)
    : embeddings_(std::move(embeddings)), hidden_(hidden) {
  if (hidden == 0) throw ArgumentError("LSTM hidden size must be positive");
  const std::size_t d = embeddings_.dim();
  Rng rng(seed);
  w_x_ = MakeParameter("lm.w_x", UniformTensor({4 * hidden, d}, rng, kInitScale));
  w_h_ = MakeParameter("lm.w_h", UniformTensor({4 * hidden, hidden}, rng, kInitScale));
  Tensor bias({4 * hidden});
  for (std::size_t i = hidden; i < 2 * hidden; ++i) bias[i] = kForgetBias;
  b_ = MakeParameter("lm.b", std::move(bias));
  w_out_ = MakeParameter("lm.w_out", UniformTensor({d, hidden}, rng, kInitScale));
  b_out_ = MakeParameter("lm.b_out", Tensor({d}));
}

LanguageModel LanguageModel::Zeros(EmbeddingTable embeddings,
                                   std::size_t hidden) {
  LanguageModel lm(std::move(embeddings), hidden, 0);
  for (const auto& p : lm.parameters()) p->value.Fill(0.0);
  return lm;
}

std::vector<ParameterPtr> LanguageModel::parameters() const {
  return {w_x_, w_h_, b_, w_out_, b_out_};
}

LmState LanguageModel::InitialState(Graph& graph) const {
  return LmState{graph.Constant(Tensor({hidden_})),
                 graph.Constant(Tensor({hidden_}))};
}

std::pair<LmState, Var> LanguageModel::Step(Graph& graph, const LmState& state,
                                            TokenId token) const {
  const std::size_t h = hidden_;
  Var x = embeddings_.Embed(graph, token);
  Var z = MatVec(graph.Param(w_x_), x) +
          MatVec(graph.Param(w_h_), state.hidden) + graph.Param(b_);
  Var in_gate = Sigmoid(Slice(z, 0, h));
  Var forget_gate = Sigmoid(Slice(z, h, h));
  Var out_gate = Sigmoid(Slice(z, 2 * h, h));
  Var candidate = Tanh(Slice(z, 3 * h, h));
  Var cell = forget_gate * state.cell + in_gate * candidate;
  Var hidden = out_gate * Tanh(cell);
  Var u = MatVec(graph.Param(w_out_), hidden) + graph.Param(b_out_);
  return {LmState{hidden, cell}, embeddings_.ProjectToVocab(graph, u)};
}

Var LanguageModel::Loss(Graph& graph, std::span<const TokenId> sentence) const {
  if (sentence.empty()) throw ArgumentError("lm_loss: empty sentence");
  LmState state = InitialState(graph);
  std::vector<Var> terms;
  terms.reserve(sentence.size() + 1);
  TokenId prev = kBos;
  for (std::size_t t = 0; t <= sentence.size(); ++t) {
    const TokenId target = t < sentence.size() ? sentence[t] : kEos;
    auto [next, logits] = Step(graph, state, prev);
    terms.push_back(NegLogSoftmax(logits, target));
    state = next;
    prev = target;
  }
  return AddN(terms);
}

double LanguageModel::Loss(std::span<const TokenId> sentence) const {
  Graph graph;
  return Loss(graph, sentence).value().item();
}

TrainingLog LmPretrain(LanguageModel& lm, std::span<const Sentence> corpus,
                       const TrainConfig& config) {
  if (corpus.empty()) throw ArgumentError("lm_pretrain: empty corpus");
  config.Validate();
  std::vector<ParameterPtr> params = lm.parameters();
  params.push_back(lm.embeddings().parameter());
  Adam adam(params, config.learning_rate);
  SourceSampler sampler(corpus.size(), DeriveSeed(config.seed, 101));
  TrainingLog log;
  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto batch = sampler.Next(config.batch_text);
    Graph graph;
    std::vector<Var> losses;
    for (std::size_t i : batch) losses.push_back(lm.Loss(graph, corpus[i]));
    Var mean = Scale(AddN(losses), 1.0 / static_cast<double>(losses.size()));
    graph.AccumulateGradients(mean);
    ClipGlobalNorm(params, config.clip_norm);
    adam.Step();
    log.step_loss.push_back(mean.value().item());
  }
  const std::size_t per_epoch =
      (corpus.size() + config.batch_text - 1) / config.batch_text;
  log.epoch_loss = EpochMeans(log.step_loss, per_epoch);
  return log;
}

}  // namespace noc
