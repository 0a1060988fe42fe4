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

#ifndef NOC_CONFIG_H_
#define NOC_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noc/training.h"

namespace noc {

enum class VisualMode { kTuned, kFixed };

// Everything a training run needs beyond the data. Serialized as flat
// key=value text; unknown keys are errors.
struct RunConfig {
  TrainConfig train;
  std::size_t hidden = 32;
  std::size_t visual_hidden = 32;
  // Distributional embeddings from the dataset, or seeded random vectors.
  bool use_glove = true;
  // Keeps the distributional vectors fixed. Seeded-random vectors carry no
  // neighborhood structure worth preserving and are always trained.
  bool freeze_embeddings = true;
  bool lm_pretrain = true;
  std::size_t lm_pretrain_steps = 1500;
  bool vision_pretrain = true;
  std::size_t vision_pretrain_steps = 1000;
  // kFixed freezes the visual head after vision pretraining.
  VisualMode visual_mode = VisualMode::kTuned;
  // When false joint training sees only paired data; the image-only and
  // text-only terms get zero weight.
  bool aux_objectives = true;
  std::size_t max_len = 20;

  // Whether the embedding table is held fixed in every training phase.
  bool EmbeddingsFrozen() const { return use_glove && freeze_embeddings; }

  // alpha/beta as applied during joint training.
  TrainConfig EffectiveTrain() const;

  static const std::vector<std::string>& Keys();
  // Applies one key=value assignment; ConfigError listing valid keys when the
  // key is unknown.
  void Set(std::string_view key, std::string_view value);
  // ConfigError on invalid sizes or training hyperparameters.
  void Validate() const;
  static RunConfig Parse(std::string_view text);
  static RunConfig Load(const std::filesystem::path& path);
  // Canonical key=value text, one line per key, in Keys() order.
  std::string ToText() const;
};

// Non-empty, non-comment `key=value` lines with surrounding blanks trimmed.
std::vector<std::pair<std::string, std::string>> ParseKeyValueLines(std::string_view text);

// Typed values for config files; ConfigError naming the key on bad input.
std::size_t ParseCount(std::string_view key, std::string_view value);
double ParseReal(std::string_view key, std::string_view value);
bool ParseBool(std::string_view key, std::string_view value);

}  // namespace noc

#endif  // NOC_CONFIG_H_
