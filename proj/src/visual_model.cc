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

#include "noc/visual_model.h"

#include <algorithm>
#include <cmath>

#include "noc/errors.h"
#include "noc/random.h"
#include "stopwords_data.h"

namespace noc {

LabelVector::LabelVector(std::vector<TokenId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool LabelVector::Contains(TokenId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

Tensor LabelVector::Dense(std::size_t vocab_size) const {
  Tensor z({vocab_size});
  for (TokenId id : ids_) {
    if (id >= vocab_size) {
      throw IndexError("label id " + std::to_string(id) +
                       " outside vocabulary of size " + std::to_string(vocab_size));
    }
    z[id] = 1.0;
  }
  return z;
}

LabelVector ExtractLabels(std::span<const TokenId> caption,
                          const std::unordered_set<TokenId>& stopwords) {
  std::vector<TokenId> ids;
  for (TokenId id : caption) {
    if (Vocabulary::IsControl(id) || stopwords.contains(id)) continue;
    ids.push_back(id);
  }
  return LabelVector(std::move(ids));
}

const std::vector<std::string>& DefaultStopwords() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> out;
    std::string_view text = kStopwordsText;
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.front() != '#') out.emplace_back(line);
      start = end + 1;
    }
    return out;
  }();
  return words;
}

std::unordered_set<TokenId> StopwordIds(const Vocabulary& vocab,
                                        std::span<const std::string> words) {
  std::unordered_set<TokenId> ids;
  for (const auto& w : words) {
    if (auto id = vocab.Find(w)) ids.insert(*id);
  }
  return ids;
}

Var ImageLossFromActivations(Graph& graph, Var activations,
                             const LabelVector& labels) {
  const std::size_t v = activations.value().size();
  Tensor z = labels.Dense(v);
  Tensor not_z = Tensor::ZerosLike(z);
  for (std::size_t i = 0; i < v; ++i) not_z[i] = 1.0 - z[i];
  Var probs = Softmax(activations);
  Var positive = Dot(graph.Constant(std::move(z)), Log(probs));
  Var negative = Dot(graph.Constant(std::move(not_z)), Log(Affine(probs, -1.0, 1.0)));
  return Scale(positive + negative, -1.0);
}

namespace {

Tensor GlorotUniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t({rows, cols});
  for (double& w : t.values()) w = Uniform(rng, -limit, limit);
  return t;
}

}  // namespace

VisualModel::VisualModel(std::size_t feature_dim, std::size_t hidden,
                         std::size_t vocab_size, std::uint64_t seed) {
  if (feature_dim == 0 || hidden == 0 || vocab_size == 0) {
    throw ArgumentError("visual model dimensions must be positive");
  }
  Rng rng(seed);
  w1_ = MakeParameter("vision.w1", GlorotUniform(hidden, feature_dim, rng));
  b1_ = MakeParameter("vision.b1", Tensor({hidden}));
  w2_ = MakeParameter("vision.w2", GlorotUniform(vocab_size, hidden, rng));
  b2_ = MakeParameter("vision.b2", Tensor({vocab_size}));
}

VisualModel VisualModel::Zeros(std::size_t feature_dim, std::size_t hidden,
                               std::size_t vocab_size) {
  VisualModel m(feature_dim, hidden, vocab_size, 0);
  for (const auto& p : m.parameters()) p->value.Fill(0.0);
  return m;
}

void VisualModel::set_trainable(bool trainable) {
  for (const auto& p : parameters()) p->trainable = trainable;
}

Var VisualModel::Activations(Graph& graph, const Tensor& features) const {
  if (features.rank() != 1 || features.size() != feature_dim()) {
    throw DimensionError("image features: expected [" +
                         std::to_string(feature_dim()) + "], got " +
                         ShapeString(features.shape()));
  }
  Var x = graph.Constant(features);
  Var hidden = Relu(MatVec(graph.Param(w1_), x) + graph.Param(b1_));
  return MatVec(graph.Param(w2_), hidden) + graph.Param(b2_);
}

Tensor VisualModel::Activations(const Tensor& features) const {
  Graph graph;
  return Activations(graph, features).value();
}

Var VisualModel::Loss(Graph& graph, const Tensor& features,
                      const LabelVector& labels) const {
  return ImageLossFromActivations(graph, Activations(graph, features), labels);
}

double VisualModel::Loss(const Tensor& features, const LabelVector& labels) const {
  Graph graph;
  return Loss(graph, features, labels).value().item();
}

TrainingLog VisionPretrain(VisualModel& vision,
                           std::span<const LabeledImage> data,
                           const TrainConfig& config) {
  if (data.empty()) throw ArgumentError("vision_pretrain: no labeled images");
  config.Validate();
  const auto params = vision.parameters();
  Adam adam(params, config.learning_rate);
  SourceSampler sampler(data.size(), DeriveSeed(config.seed, 202));
  TrainingLog log;
  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto batch = sampler.Next(config.batch_image);
    Graph graph;
    std::vector<Var> losses;
    for (std::size_t i : batch) {
      losses.push_back(vision.Loss(graph, data[i].features, data[i].labels));
    }
    Var mean = Scale(AddN(losses), 1.0 / static_cast<double>(losses.size()));
    graph.AccumulateGradients(mean);
    ClipGlobalNorm(params, config.clip_norm);
    adam.Step();
    log.step_loss.push_back(mean.value().item());
  }
  const std::size_t per_epoch =
      (data.size() + config.batch_image - 1) / config.batch_image;
  log.epoch_loss = EpochMeans(log.step_loss, per_epoch);
  return log;
}

}  // namespace noc
