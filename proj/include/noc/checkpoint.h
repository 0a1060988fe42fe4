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

#ifndef NOC_CHECKPOINT_H_
#define NOC_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "noc/caption_model.h"
#include "noc/config.h"

namespace noc {

inline constexpr int kCheckpointFormatVersion = 1;

struct NamedArray {
  std::string name;
  Tensor value;
};

// Optimizer and sampler state needed to continue joint training exactly.
struct TrainerState {
  std::uint64_t adam_step = 0;
  std::vector<Tensor> first_moments;
  std::vector<Tensor> second_moments;
  std::vector<SourceSampler::State> samplers;
};

// A JSON manifest at `path` (names, shapes, offsets, vocabulary, config,
// RNG state) plus `path.bin` holding every array as little-endian float64,
// concatenated in manifest order.
struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  Vocabulary vocab;
  RunConfig config;
  std::uint64_t step = 0;
  std::vector<NamedArray> parameters;
  std::optional<TrainerState> trainer;
};

std::filesystem::path SidecarPath(const std::filesystem::path& path);

// Snapshot of a model, optionally with the trainer that is training it.
Checkpoint CaptureCheckpoint(const NocModel& model, const RunConfig& config,
                             const NocTrainer* trainer = nullptr);

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// FormatError when the recorded vocabulary hash does not match the stored
// vocabulary, or when arrays are malformed.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// FormatError unless `vocab` hashes the same as the checkpoint vocabulary.
void RequireVocabulary(const Checkpoint& checkpoint, const Vocabulary& vocab);

// Rebuilds the model with the stored parameter values and the config's
// trainable flags for joint training.
NocModel RestoreModel(const Checkpoint& checkpoint);

// Restores optimizer moments, step counters and sampler streams.
void RestoreTrainer(NocTrainer& trainer, const Checkpoint& checkpoint);

}  // namespace noc

#endif  // NOC_CHECKPOINT_H_
