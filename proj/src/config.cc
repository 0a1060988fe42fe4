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

#include "noc/config.h"

#include <charconv>

#include "noc/errors.h"
#include "noc/text.h"

namespace noc {

namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string Bool(bool b) { return b ? "true" : "false"; }

}  // namespace

std::vector<std::pair<std::string, std::string>> ParseKeyValueLines(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t ln = 0;
  for (const auto& raw : Split(text, '\n')) {
    ++ln;
    const std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(ln) + ": expected key=value");
    }
    out.emplace_back(Trim(std::string_view(line).substr(0, eq)),
                     Trim(std::string_view(line).substr(eq + 1)));
  }
  return out;
}

std::size_t ParseCount(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" +
                      std::string(v) + "'");
  }
  return out;
}

double ParseReal(std::string_view key, std::string_view v) {
  try {
    return ParseDouble(v, key);
  } catch (const FormatError&) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  }
}

bool ParseBool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(std::string(key) + ": expected a boolean, got '" + std::string(v) + "'");
}

TrainConfig RunConfig::EffectiveTrain() const {
  TrainConfig t = train;
  if (!aux_objectives) {
    t.alpha = 0.0;
    t.beta = 0.0;
  }
  return t;
}

const std::vector<std::string>& RunConfig::Keys() {
  static const std::vector<std::string> keys = {
      "alpha", "beta", "learning_rate", "batch_paired", "batch_image",
      "batch_text", "steps", "seed", "clip_norm", "vision_lr_scale", "hidden", "visual_hidden",
      "use_glove", "freeze_embeddings", "lm_pretrain", "lm_pretrain_steps",
      "vision_pretrain", "vision_pretrain_steps", "visual_mode",
      "aux_objectives", "max_len"};
  return keys;
}

void RunConfig::Set(std::string_view key, std::string_view value) {
  if (key == "alpha") train.alpha = ParseReal(key, value);
  else if (key == "beta") train.beta = ParseReal(key, value);
  else if (key == "learning_rate") train.learning_rate = ParseReal(key, value);
  else if (key == "batch_paired") train.batch_paired = ParseCount(key, value);
  else if (key == "batch_image") train.batch_image = ParseCount(key, value);
  else if (key == "batch_text") train.batch_text = ParseCount(key, value);
  else if (key == "steps") train.steps = ParseCount(key, value);
  else if (key == "seed") train.seed = ParseCount(key, value);
  else if (key == "clip_norm") train.clip_norm = ParseReal(key, value);
  else if (key == "vision_lr_scale") train.vision_lr_scale = ParseReal(key, value);
  else if (key == "hidden") hidden = ParseCount(key, value);
  else if (key == "visual_hidden") visual_hidden = ParseCount(key, value);
  else if (key == "use_glove") use_glove = ParseBool(key, value);
  else if (key == "freeze_embeddings") freeze_embeddings = ParseBool(key, value);
  else if (key == "lm_pretrain") lm_pretrain = ParseBool(key, value);
  else if (key == "lm_pretrain_steps") lm_pretrain_steps = ParseCount(key, value);
  else if (key == "vision_pretrain") vision_pretrain = ParseBool(key, value);
  else if (key == "vision_pretrain_steps") vision_pretrain_steps = ParseCount(key, value);
  else if (key == "visual_mode") {
    if (value == "tuned") visual_mode = VisualMode::kTuned;
    else if (value == "fixed") visual_mode = VisualMode::kFixed;
    else throw ConfigError("visual_mode: expected 'tuned' or 'fixed', got '" +
                           std::string(value) + "'");
  } else if (key == "aux_objectives") aux_objectives = ParseBool(key, value);
  else if (key == "max_len") max_len = ParseCount(key, value);
  else {
    throw ConfigError("unknown config key '" + std::string(key) + "'; valid keys: " +
                      Join(Keys(), ", "));
  }
}

RunConfig RunConfig::Parse(std::string_view text) {
  RunConfig cfg;
  for (const auto& [key, value] : ParseKeyValueLines(text)) cfg.Set(key, value);
  cfg.Validate();
  return cfg;
}

void RunConfig::Validate() const {
  train.Validate();
  if (hidden == 0 || visual_hidden == 0) {
    throw ConfigError("hidden sizes must be positive");
  }
  if (max_len == 0) throw ConfigError("max_len must be positive");
}

RunConfig RunConfig::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

std::string RunConfig::ToText() const {
  std::string out;
  auto put = [&out](const char* k, const std::string& v) { out += std::string(k) + "=" + v + "\n"; };
  put("alpha", FormatDouble(train.alpha));
  put("beta", FormatDouble(train.beta));
  put("learning_rate", FormatDouble(train.learning_rate));
  put("batch_paired", std::to_string(train.batch_paired));
  put("batch_image", std::to_string(train.batch_image));
  put("batch_text", std::to_string(train.batch_text));
  put("steps", std::to_string(train.steps));
  put("seed", std::to_string(train.seed));
  put("clip_norm", FormatDouble(train.clip_norm));
  put("vision_lr_scale", FormatDouble(train.vision_lr_scale));
  put("hidden", std::to_string(hidden));
  put("visual_hidden", std::to_string(visual_hidden));
  put("use_glove", Bool(use_glove));
  put("freeze_embeddings", Bool(freeze_embeddings));
  put("lm_pretrain", Bool(lm_pretrain));
  put("lm_pretrain_steps", std::to_string(lm_pretrain_steps));
  put("vision_pretrain", Bool(vision_pretrain));
  put("vision_pretrain_steps", std::to_string(vision_pretrain_steps));
  put("visual_mode", visual_mode == VisualMode::kTuned ? "tuned" : "fixed");
  put("aux_objectives", Bool(aux_objectives));
  put("max_len", std::to_string(max_len));
  return out;
}

}  // namespace noc
