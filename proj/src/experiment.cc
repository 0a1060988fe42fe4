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

#include "noc/experiment.h"

#include <cmath>
#include <cstdio>

#include "noc/errors.h"
#include "noc/random.h"
#include "noc/text.h"

namespace noc {

std::size_t LoadedData::feature_dim() const {
  if (!train_paired.empty()) return train_paired.front().features.size();
  if (!image_only.empty()) return image_only.front().features.size();
  throw ArgumentError("dataset has no images");
}

LoadedData LoadData(const std::filesystem::path& manifest_json) {
  LoadedData d;
  d.manifest = LoadManifest(manifest_json);
  const auto& m = d.manifest;
  d.vocab = Vocabulary::Load(m.Path(m.vocab));
  d.glove = LoadEmbeddings(m.Path(m.embeddings), d.vocab, m.seed).matrix();
  auto train = ReadPairedCaptions(m.Path(m.train_paired));
  auto test = ReadPairedCaptions(m.Path(m.test_paired));
  auto truth = ReadLabeledImages(m.Path(m.test_labels));
  auto images = ReadLabeledImages(m.Path(m.image_only));
  auto text = ReadCorpus(m.Path(m.text_only));
  d.train_paired = EncodePaired(d.vocab, train);
  d.test_paired = EncodePaired(d.vocab, test);
  d.test_objects = EncodeLabeled(d.vocab, truth);
  d.image_only = EncodeLabeled(d.vocab, images);
  d.text_only = EncodeCorpus(d.vocab, text);
  d.truth = ToTruthMap(truth);
  return d;
}

Tensor MatchedRandomEmbeddings(const Tensor& reference, std::uint64_t seed) {
  const std::size_t rows = reference.dim(0), d = reference.dim(1);
  double mean_norm = 0.0;
  for (std::size_t r = kNumReserved; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += reference.at(r, j) * reference.at(r, j);
    mean_norm += std::sqrt(s);
  }
  mean_norm /= static_cast<double>(std::max<std::size_t>(1, rows - kNumReserved));
  Rng rng(seed);
  Tensor out({rows, d});
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      out.at(r, j) = StandardNormal(rng);
      s += out.at(r, j) * out.at(r, j);
    }
    const double scale = mean_norm / std::sqrt(s);
    for (std::size_t j = 0; j < d; ++j) out.at(r, j) *= scale;
  }
  return out;
}

NocModel BuildModel(const LoadedData& data, const RunConfig& config) {
  const std::uint64_t seed = config.train.seed;
  Tensor matrix = config.use_glove
                      ? data.glove
                      : MatchedRandomEmbeddings(data.glove, DeriveSeed(seed, 31));
  EmbeddingTable table(std::move(matrix), config.EmbeddingsFrozen());
  LanguageModel lm(table, config.hidden, DeriveSeed(seed, 32));
  VisualModel vision(data.feature_dim(), config.visual_hidden, data.vocab.size(),
                     DeriveSeed(seed, 33));
  return NocModel(data.vocab, std::move(lm), std::move(vision));
}

void RunPretraining(NocModel& model, const LoadedData& data, const RunConfig& config,
                    TrainOutcome& outcome) {
  if (config.lm_pretrain && config.lm_pretrain_steps > 0 && !data.text_only.empty()) {
    TrainConfig t = config.train;
    t.steps = config.lm_pretrain_steps;
    outcome.lm_pretrain = LmPretrain(model.lm(), data.text_only, t);
  }
  if (config.vision_pretrain && config.vision_pretrain_steps > 0 &&
      !data.image_only.empty()) {
    TrainConfig t = config.train;
    t.steps = config.vision_pretrain_steps;
    outcome.vision_pretrain = VisionPretrain(model.vision(), data.image_only, t);
  }
}

TrainingSources JointSources(const LoadedData& data, const RunConfig& config) {
  TrainingSources s;
  s.paired = data.train_paired;
  if (config.aux_objectives) {
    s.images = data.image_only;
    s.text = data.text_only;
  }
  return s;
}

void ApplyJointFreezing(NocModel& model, const RunConfig& config) {
  EmbeddingTable table = model.embeddings();  // handle onto the shared storage
  table.set_frozen(config.EmbeddingsFrozen());
  model.vision().set_trainable(config.visual_mode == VisualMode::kTuned);
}

TrainOutcome TrainModel(NocModel& model, const LoadedData& data,
                        const RunConfig& config) {
  TrainOutcome outcome;
  RunPretraining(model, data, config, outcome);
  ApplyJointFreezing(model, config);
  outcome.joint = TrainNoc(model, JointSources(data, config), config.EffectiveTrain());
  return outcome;
}

DecodeSpec DecodeSpec::Parse(std::string_view text) {
  DecodeSpec spec;
  auto count = [&](std::string_view digits) -> std::size_t {
    std::size_t n = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') n = 0, digits = {};
      else n = n * 10 + static_cast<std::size_t>(c - '0');
    }
    if (n == 0) throw ArgumentError("bad decode method '" + std::string(text) + "'");
    return n;
  };
  if (text == "greedy") {
    spec.method = DecodeMethod::kGreedy;
  } else if (text.starts_with("beam:")) {
    spec.method = DecodeMethod::kBeam;
    spec.width = count(text.substr(5));
  } else if (text.starts_with("sample:")) {
    spec.method = DecodeMethod::kSampleRank;
    spec.samples = count(text.substr(7));
  } else {
    throw ArgumentError("unknown decode method '" + std::string(text) +
                        "' (expected greedy, beam:<k> or sample:<n>)");
  }
  return spec;
}

DecodeResult Decode(const NocModel& model, const Tensor& features,
                    const DecodeSpec& spec, std::uint64_t image_seed) {
  switch (spec.method) {
    case DecodeMethod::kGreedy:
      return GreedyDecode(model, features, spec.max_len);
    case DecodeMethod::kBeam:
      return BeamDecode(model, features, BeamOptions{spec.width, spec.max_len, false});
    case DecodeMethod::kSampleRank:
      return SampleRankDecode(model, features, spec.samples, spec.max_len, image_seed);
  }
  throw ArgumentError("unknown decode method");
}

std::vector<CaptionRecord> CaptionImages(const NocModel& model,
                                         std::span<const PairedExample> images,
                                         const DecodeSpec& spec) {
  std::vector<CaptionRecord> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const DecodeResult r =
        Decode(model, images[i].features, spec, DeriveSeed(spec.seed, i));
    const auto words = r.words();
    out.push_back(CaptionRecord{images[i].id, model.vocab().Decode(words), r.log_prob});
  }
  return out;
}

double CaptionPerplexity(const NocModel& model, std::span<const PairedExample> data) {
  double nll = 0.0;
  std::size_t tokens = 0;
  for (const auto& ex : data) {
    nll += model.CaptionLoss(ex.features, ex.caption);
    tokens += ex.caption.size() + 1;
  }
  return tokens ? std::exp(nll / static_cast<double>(tokens)) : 0.0;
}

std::vector<AblationRow> StandardAblationGrid() {
  return {
      {"Tuned Vision", false, false, VisualMode::kTuned, true},
      {"LM & Embedding", true, true, VisualMode::kTuned, false},
      {"LM & Pre-trained Vision", true, true, VisualMode::kFixed, false},
      {"Auxiliary Objective", true, false, VisualMode::kTuned, true},
      {"All", true, true, VisualMode::kTuned, true},
  };
}

RunConfig ApplyRow(RunConfig base, const AblationRow& row) {
  base.use_glove = row.use_glove;
  base.lm_pretrain = row.lm_pretrain;
  base.visual_mode = row.visual_mode;
  base.aux_objectives = row.aux_objectives;
  return base;
}

AblationResult RunAblationRow(const LoadedData& data, const RunConfig& base,
                              const AblationRow& row) {
  const RunConfig config = ApplyRow(base, row);
  NocModel model = BuildModel(data, config);
  TrainModel(model, data, config);
  DecodeSpec spec;
  spec.max_len = config.max_len;
  const auto captions = CaptionImages(model, data.test_paired, spec);
  AblationResult result;
  result.row = row;
  result.heldout = BuildReport(ToCaptionMap(captions), data.truth, data.manifest.heldout);
  result.perplexity = CaptionPerplexity(model, data.test_paired);
  return result;
}

std::string AblationTable(std::span<const AblationResult> results) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-26s %5s %8s %7s %5s %8s %8s %8s\n", "row", "glove",
                "lm_pre", "vision", "aux", "F1(%)", "desc(%)", "ppl");
  out += buf;
  for (const auto& r : results) {
    std::snprintf(buf, sizeof(buf), "%-26s %5s %8s %7s %5s %8.2f %8.2f %8.3f\n",
                  r.row.name.c_str(), r.row.use_glove ? "y" : "-",
                  r.row.lm_pretrain ? "y" : "-",
                  r.row.visual_mode == VisualMode::kTuned ? "tuned" : "fixed",
                  r.row.aux_objectives ? "y" : "-", 100.0 * r.heldout.average_f1,
                  100.0 * r.heldout.percent_described, r.perplexity);
    out += buf;
  }
  return out;
}

}  // namespace noc
