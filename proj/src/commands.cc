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

#include "noc/commands.h"

#include <algorithm>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "noc/checkpoint.h"
#include "noc/errors.h"
#include "noc/text.h"

namespace noc {

namespace {

std::vector<std::string> CommaList(std::string_view value) {
  std::vector<std::string> out;
  for (const auto& part : Split(value, ',')) {
    const auto words = SplitWhitespace(part);
    if (words.size() == 1) out.push_back(words[0]);
    else if (!words.empty()) throw ConfigError("list item '" + part + "' has spaces");
  }
  return out;
}


std::vector<PairedExample> ReadImages(const std::filesystem::path& path) {
  std::vector<PairedExample> out;
  std::size_t ln = 0;
  for (const auto& line : ReadLines(path)) {
    ++ln;
    if (line.empty()) continue;
    const auto fields = Split(line, '\t');
    const std::string where = path.string() + ":" + std::to_string(ln);
    if (fields.size() != 3) {
      throw FormatError(where + ": expected 3 tab-separated fields, got " +
                        std::to_string(fields.size()));
    }
    out.push_back(PairedExample{fields[0], Tensor::Vector(ParseDoubles(fields[2], where)), {}});
  }
  return out;
}

}  // namespace

GenerateConfig GenerateConfig::Parse(std::string_view text) {
  GenerateConfig g;
  WorldSpec& s = g.spec;
  for (const auto& [key, value] : ParseKeyValueLines(text)) {
    if (key == "num_paired") s.num_paired = ParseCount(key, value);
    else if (key == "num_image_only") s.num_image_only = ParseCount(key, value);
    else if (key == "num_text_only") s.num_text_only = ParseCount(key, value);
    else if (key == "feature_dim") s.feature_dim = ParseCount(key, value);
    else if (key == "embedding_dim") s.embedding_dim = ParseCount(key, value);
    else if (key == "noise_sigma") s.noise_sigma = ParseReal(key, value);
    else if (key == "context_scale") s.context_scale = ParseReal(key, value);
    else if (key == "two_object_prob") s.two_object_prob = ParseReal(key, value);
    else if (key == "test_stride") g.test_stride = ParseCount(key, value);
    else if (key == "heldout_text_weight") g.heldout_text_weight = ParseReal(key, value);
    else if (key == "heldout") g.heldout = CommaList(value);
    else if (key == "contexts") s.contexts = CommaList(value);
    else if (key == "templates") {
      s.templates.clear();
      for (const auto& t : Split(value, '|')) s.templates.push_back(Join(SplitWhitespace(t), " "));
    } else if (key == "text_templates") {
      s.text_templates.clear();
      for (const auto& t : Split(value, '|')) {
        s.text_templates.push_back(Join(SplitWhitespace(t), " "));
      }
    } else if (key == "objects") {
      s.objects.clear();
      for (const auto& item : CommaList(value)) {
        const auto parts = Split(item, ':');
        if (parts.size() != 2 && parts.size() != 3) {
          throw ConfigError("objects: expected token:category[:text_weight], got '" + item +
                            "'");
        }
        ObjectSpec object{parts[0], parts[1]};
        if (parts.size() == 3) object.text_weight = ParseReal("objects", parts[2]);
        s.objects.push_back(object);
      }
    } else {
      throw ConfigError(
          "unknown generate key '" + key +
          "'; valid keys: num_paired, num_image_only, num_text_only, feature_dim, "
          "embedding_dim, noise_sigma, context_scale, two_object_prob, objects, "
          "contexts, templates, text_templates, heldout, heldout_text_weight, test_stride");
    }
  }
  return g;
}

DatasetManifest CmdGenerate(const GenerateConfig& config, std::uint64_t seed,
                            const std::filesystem::path& out_dir) {
  WorldSpec spec = config.spec;
  spec.seed = seed;
  for (auto& object : spec.objects) {
    if (std::find(config.heldout.begin(), config.heldout.end(), object.token) !=
        config.heldout.end()) {
      object.text_weight *= config.heldout_text_weight;
    }
  }
  spec.Validate();
  if (config.test_stride == 0) throw ArgumentError("test_stride must be >= 1");
  const World world = GenerateWorld(spec);
  const HeldoutSplit split = MakeHeldoutSplit(world, config.heldout, config.test_stride);
  return WriteDataset(out_dir, spec, world, split);
}

std::filesystem::path LossLogPath(const std::filesystem::path& checkpoint) {
  return std::filesystem::path(checkpoint.string() + ".loss.csv");
}

std::string LossLogCsv(std::span<const LossBreakdown> log, std::uint64_t first_step) {
  std::string out = "step,l_cm,l_im,l_lm,total\n";
  for (std::size_t i = 0; i < log.size(); ++i) {
    out += std::to_string(first_step + i + 1) + "," + FormatDouble(log[i].l_cm) + "," +
           FormatDouble(log[i].l_im) + "," + FormatDouble(log[i].l_lm) + "," +
           FormatDouble(log[i].total) + "\n";
  }
  return out;
}

std::vector<LossBreakdown> CmdTrain(const TrainRequest& request) {
  const LoadedData data = LoadData(request.manifest);
  if (!request.resume) {
    const RunConfig& config = request.config;
    config.Validate();
    NocModel model = BuildModel(data, config);
    TrainOutcome outcome;
    RunPretraining(model, data, config, outcome);
    ApplyJointFreezing(model, config);
    NocTrainer trainer(model, JointSources(data, config), config.EffectiveTrain());
    trainer.Run(config.train.steps);
    SaveCheckpoint(request.out, CaptureCheckpoint(model, config, &trainer));
    WriteFile(LossLogPath(request.out), LossLogCsv(trainer.log(), 0));
    return trainer.log();
  }
  const Checkpoint checkpoint = LoadCheckpoint(*request.resume);
  RequireVocabulary(checkpoint, data.vocab);
  RunConfig config = checkpoint.config;
  config.train.steps = request.config.train.steps;
  NocModel model = RestoreModel(checkpoint);
  NocTrainer trainer(model, JointSources(data, config), config.EffectiveTrain());
  RestoreTrainer(trainer, checkpoint);
  if (config.train.steps > checkpoint.step) trainer.Run(config.train.steps - checkpoint.step);
  SaveCheckpoint(request.out, CaptureCheckpoint(model, config, &trainer));
  WriteFile(LossLogPath(request.out), LossLogCsv(trainer.log(), checkpoint.step));
  return trainer.log();
}

std::vector<CaptionRecord> CmdCaption(const std::filesystem::path& checkpoint_path,
                                      const std::filesystem::path& images,
                                      const DecodeSpec& spec,
                                      const std::filesystem::path& out) {
  const Checkpoint checkpoint = LoadCheckpoint(checkpoint_path);
  const NocModel model = RestoreModel(checkpoint);
  DecodeSpec effective = spec;
  if (effective.max_len == 0) effective.max_len = checkpoint.config.max_len;
  const auto examples = ReadImages(images);
  auto captions = CaptionImages(model, examples, effective);
  WriteCaptions(out, captions);
  return captions;
}

MentionReport CmdEval(const std::filesystem::path& captions,
                      const std::filesystem::path& manifest_path,
                      const std::filesystem::path& out_prefix) {
  const DatasetManifest manifest = LoadManifest(manifest_path);
  const auto truth = ReadLabeledImages(manifest.Path(manifest.test_labels));
  const auto records = ReadCaptions(captions);
  MentionReport report =
      BuildReport(ToCaptionMap(records), ToTruthMap(truth), manifest.heldout);
  EmitReport(report, out_prefix);
  return report;
}

AblationGrid AblationGrid::Parse(std::string_view text) {
  AblationGrid grid;
  bool standard = true;
  std::vector<AblationRow> custom;
  for (const auto& [key, value] : ParseKeyValueLines(text)) {
    if (key == "seeds") {
      grid.seeds.clear();
      for (const auto& s : CommaList(value)) grid.seeds.push_back(ParseCount(key, s));
      if (grid.seeds.empty()) throw ConfigError("seeds: expected at least one seed");
    } else if (key == "standard_rows") {
      standard = ParseBool(key, value);
    } else if (key == "row") {
      const auto parts = Split(value, ';');
      AblationRow row;
      row.name = parts[0];
      if (row.name.empty()) throw ConfigError("row: missing name");
      for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto kv = Split(parts[i], '=');
        if (kv.size() != 2) throw ConfigError("row: expected flag=value, got '" + parts[i] + "'");
        const std::string flag = Join(SplitWhitespace(kv[0]), "");
        const std::string v = Join(SplitWhitespace(kv[1]), "");
        if (flag == "use_glove") row.use_glove = ParseBool(flag, v);
        else if (flag == "lm_pretrain") row.lm_pretrain = ParseBool(flag, v);
        else if (flag == "aux_objectives") row.aux_objectives = ParseBool(flag, v);
        else if (flag == "visual_mode") {
          if (v == "tuned") row.visual_mode = VisualMode::kTuned;
          else if (v == "fixed") row.visual_mode = VisualMode::kFixed;
          else throw ConfigError("visual_mode: expected 'tuned' or 'fixed', got '" + v + "'");
        } else {
          throw ConfigError("unknown row flag '" + flag +
                            "'; valid flags: use_glove, lm_pretrain, visual_mode, "
                            "aux_objectives");
        }
      }
      custom.push_back(row);
    } else {
      grid.base.Set(key, value);
    }
  }
  grid.base.Validate();
  if (standard) grid.rows = StandardAblationGrid();
  grid.rows.insert(grid.rows.end(), custom.begin(), custom.end());
  if (grid.rows.empty()) throw ConfigError("ablation grid has no rows");
  return grid;
}

std::vector<AblationRun> CmdAblate(const AblationGrid& grid,
                                   const std::filesystem::path& manifest,
                                   const std::filesystem::path& out_prefix) {
  const LoadedData data = LoadData(manifest);
  std::vector<AblationRun> runs;
  std::string table;
  nlohmann::ordered_json json = nlohmann::ordered_json::array();
  for (std::uint64_t seed : grid.seeds) {
    RunConfig base = grid.base;
    base.train.seed = seed;
    AblationRun run{seed, {}};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : grid.rows) {
      run.results.push_back(RunAblationRow(data, base, row));
      const auto& r = run.results.back();
      rows.push_back({{"name", row.name},
                      {"use_glove", row.use_glove},
                      {"lm_pretrain", row.lm_pretrain},
                      {"visual_mode", row.visual_mode == VisualMode::kTuned ? "tuned" : "fixed"},
                      {"aux_objectives", row.aux_objectives},
                      {"average_f1", r.heldout.average_f1},
                      {"percent_described", r.heldout.percent_described},
                      {"perplexity", r.perplexity}});
    }
    table += "seed=" + std::to_string(seed) + "\n" + AblationTable(run.results) + "\n";
    json.push_back({{"seed", seed}, {"rows", rows}});
    runs.push_back(std::move(run));
  }
  WriteFile(out_prefix.string() + ".txt", table);
  WriteFile(out_prefix.string() + ".json", json.dump(2) + "\n");
  return runs;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Novel object captioning: data generation, training, decoding, evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed;
  std::string config_path, out_path;
  app.add_option("--seed", seed, "Seed for generation, training or sampling");
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_option("--out", out_path, "Output path (directory, file or prefix)");

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset and manifest");

  auto* train = app.add_subcommand("train", "Train a captioner and write a checkpoint");
  std::string manifest, resume;
  std::vector<std::string> overrides;
  train->add_option("--manifest", manifest, "Dataset manifest.json")->required();
  train->add_option("--resume", resume, "Continue joint training from a checkpoint");
  train->add_option("--set", overrides, "Config override key=value (repeatable)");

  auto* caption = app.add_subcommand("caption", "Caption images with a checkpoint");
  std::string checkpoint, images, method = "greedy";
  std::size_t max_len = 0;
  caption->add_option("--checkpoint", checkpoint, "Checkpoint manifest")->required();
  caption->add_option("--images", images, "Paired or labeled image file")->required();
  caption->add_option("--method", method, "greedy | beam:<k> | sample:<n>");
  caption->add_option("--max-len", max_len, "Maximum emitted tokens (default: config)");

  auto* eval = app.add_subcommand("eval", "Score captions on the held-out objects");
  std::string captions;
  eval->add_option("--captions", captions, "Caption file")->required();
  eval->add_option("--manifest", manifest, "Dataset manifest.json")->required();

  auto* ablate = app.add_subcommand("ablate", "Run the ablation grid");
  ablate->add_option("--manifest", manifest, "Dataset manifest.json")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  auto require_out = [&]() {
    if (out_path.empty()) throw UsageError("--out is required");
    return std::filesystem::path(out_path);
  };
  try {
    if (generate->parsed()) {
      const auto cfg = config_path.empty() ? GenerateConfig{}
                                           : GenerateConfig::Parse(ReadFile(config_path));
      const auto m = CmdGenerate(cfg, seed.value_or(cfg.spec.seed), require_out());
      out << "wrote dataset to " << m.dir.string() << "\n";
    } else if (train->parsed()) {
      const auto target = require_out();
      RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::Load(config_path);
      for (const auto& o : overrides) {
        const auto kv = ParseKeyValueLines(o);
        if (kv.size() != 1) throw UsageError("--set expects key=value, got '" + o + "'");
        cfg.Set(kv[0].first, kv[0].second);
      }
      if (seed) cfg.train.seed = *seed;
      cfg.Validate();
      TrainRequest request{cfg, manifest, target, std::nullopt};
      if (!resume.empty()) request.resume = resume;
      const auto log = CmdTrain(request);
      out << "trained " << log.size() << " joint steps";
      if (!log.empty()) out << ", final loss " << FormatDouble(log.back().total);
      out << "; checkpoint " << target.string() << "\n";
    } else if (caption->parsed()) {
      DecodeSpec spec;
      try {
        spec = DecodeSpec::Parse(method);
      } catch (const ArgumentError& e) {
        throw UsageError(e.what());
      }
      spec.max_len = max_len;
      if (seed) spec.seed = *seed;
      const auto records = CmdCaption(checkpoint, images, spec, require_out());
      out << "wrote " << records.size() << " captions to " << out_path << "\n";
    } else if (eval->parsed()) {
      const auto report = CmdEval(captions, manifest, require_out());
      out << ReportTable(report);
    } else if (ablate->parsed()) {
      AblationGrid grid = config_path.empty() ? AblationGrid::Parse("")
                                              : AblationGrid::Parse(ReadFile(config_path));
      if (seed) grid.seeds = {*seed};
      const auto runs = CmdAblate(grid, manifest, require_out());
      for (const auto& run : runs) {
        out << "seed=" << run.seed << "\n" << AblationTable(run.results);
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace noc
