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

#ifndef NOC_EXPERIMENT_H_
#define NOC_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noc/caption_model.h"
#include "noc/config.h"
#include "noc/data_synth.h"
#include "noc/decoding.h"
#include "noc/evaluation.h"

namespace noc {

// A generated dataset loaded and encoded against its vocabulary.
struct LoadedData {
  DatasetManifest manifest;
  Vocabulary vocab;
  Tensor glove;  // distributional vectors, V x d
  std::vector<PairedExample> train_paired;
  std::vector<PairedExample> test_paired;
  // Test images with their depicted objects as labels.
  std::vector<LabeledImage> test_objects;
  std::vector<LabeledImage> image_only;
  std::vector<Sentence> text_only;
  TruthMap truth;

  std::size_t feature_dim() const;
};

LoadedData LoadData(const std::filesystem::path& manifest_json);

// Random embeddings whose rows have the same mean norm as `reference`.
Tensor MatchedRandomEmbeddings(const Tensor& reference, std::uint64_t seed);

// Fresh model initialized from the config seed.
NocModel BuildModel(const LoadedData& data, const RunConfig& config);

struct TrainOutcome {
  TrainingLog lm_pretrain;
  TrainingLog vision_pretrain;
  std::vector<LossBreakdown> joint;
};

// Optional LM and vision pretraining followed by joint training. With
// aux_objectives off only the paired source is fed to the joint phase.
TrainOutcome TrainModel(NocModel& model, const LoadedData& data,
                        const RunConfig& config);
void RunPretraining(NocModel& model, const LoadedData& data,
                    const RunConfig& config, TrainOutcome& outcome);
TrainingSources JointSources(const LoadedData& data, const RunConfig& config);
// Sets trainable flags for the joint phase (frozen embeddings, fixed vision).
void ApplyJointFreezing(NocModel& model, const RunConfig& config);

// "greedy", "beam:<width>" or "sample:<n>".
struct DecodeSpec {
  DecodeMethod method = DecodeMethod::kGreedy;
  std::size_t width = 1;
  std::size_t samples = 25;
  std::uint64_t seed = 1;
  std::size_t max_len = 20;

  // ArgumentError on an unknown method.
  static DecodeSpec Parse(std::string_view text);
};

DecodeResult Decode(const NocModel& model, const Tensor& features,
                    const DecodeSpec& spec, std::uint64_t image_seed);

std::vector<CaptionRecord> CaptionImages(const NocModel& model,
                                         std::span<const PairedExample> images,
                                         const DecodeSpec& spec);

// Per-token perplexity of the reference captions under the caption model.
double CaptionPerplexity(const NocModel& model, std::span<const PairedExample> data);

struct AblationRow {
  std::string name;
  bool use_glove = true;
  bool lm_pretrain = true;
  VisualMode visual_mode = VisualMode::kTuned;
  bool aux_objectives = true;
};

// Tuned Vision, LM & Embedding, LM & Pre-trained Vision, Auxiliary
// Objective, All.
std::vector<AblationRow> StandardAblationGrid();
RunConfig ApplyRow(RunConfig base, const AblationRow& row);

struct AblationResult {
  AblationRow row;
  MentionReport heldout;
  double perplexity = 0.0;
};

// Trains, captions the test split greedily and scores held-out mentions.
AblationResult RunAblationRow(const LoadedData& data, const RunConfig& base,
                              const AblationRow& row);
std::string AblationTable(std::span<const AblationResult> results);

}  // namespace noc

#endif  // NOC_EXPERIMENT_H_
