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

#ifndef NOC_COMMANDS_H_
#define NOC_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noc/config.h"
#include "noc/data_synth.h"
#include "noc/experiment.h"

namespace noc {

// World description for `generate`: the spec plus the held-out split.
struct GenerateConfig {
  WorldSpec spec = WorldSpec::Default();
  Words heldout = DefaultHeldout();
  std::size_t test_stride = 10;
  // Multiplies the text weight of every held-out object: novel objects are
  // rare words in the text-only corpus.
  double heldout_text_weight = 0.01;

  // key=value lines: num_paired, num_image_only, num_text_only,
  // feature_dim, embedding_dim, noise_sigma, context_scale,
  // two_object_prob, objects (token:category[:text_weight],...),
  // contexts (a,b,...), templates (t1|t2|...), text_templates (t1|t2|...),
  // heldout (a,b,...), heldout_text_weight, test_stride.
  static GenerateConfig Parse(std::string_view text);
};

DatasetManifest CmdGenerate(const GenerateConfig& config, std::uint64_t seed,
                            const std::filesystem::path& out_dir);

struct TrainRequest {
  RunConfig config;
  std::filesystem::path manifest;
  std::filesystem::path out;  // checkpoint; the loss log goes to out + ".loss.csv"
  std::optional<std::filesystem::path> resume;
};

std::filesystem::path LossLogPath(const std::filesystem::path& checkpoint);
std::string LossLogCsv(std::span<const LossBreakdown> log, std::uint64_t first_step);

// Fresh run: pretraining phases then joint training for config.train.steps.
// Resumed run: restores the checkpoint (including its trainer state) and
// continues joint training until config.train.steps total steps.
std::vector<LossBreakdown> CmdTrain(const TrainRequest& request);

// Images are read from any three-column file whose third column holds the
// features (paired captions or labeled images); the first is the id.
std::vector<CaptionRecord> CmdCaption(const std::filesystem::path& checkpoint,
                                      const std::filesystem::path& images,
                                      const DecodeSpec& spec,
                                      const std::filesystem::path& out);

// Scores held-out mentions against the manifest's test labels and writes
// out_prefix.json and out_prefix.txt.
MentionReport CmdEval(const std::filesystem::path& captions,
                      const std::filesystem::path& manifest,
                      const std::filesystem::path& out_prefix);

// Base RunConfig lines plus optional `seeds=1,2,3`, `standard_rows=false`
// and custom rows:
//   row=<name>;use_glove=1;lm_pretrain=0;visual_mode=tuned;aux_objectives=1
struct AblationGrid {
  RunConfig base;
  std::vector<std::uint64_t> seeds = {1};
  std::vector<AblationRow> rows;

  static AblationGrid Parse(std::string_view text);
};

struct AblationRun {
  std::uint64_t seed = 0;
  std::vector<AblationResult> results;
};

// Writes out_prefix.txt (one table per seed) and out_prefix.json.
std::vector<AblationRun> CmdAblate(const AblationGrid& grid,
                                   const std::filesystem::path& manifest,
                                   const std::filesystem::path& out_prefix);

// Full command-line front end. Returns the process exit code: 0 on success,
// 1 on domain errors, 2 on usage errors.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace noc

#endif  // NOC_COMMANDS_H_
