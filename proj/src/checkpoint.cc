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

#include "noc/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "noc/errors.h"
#include "noc/experiment.h"
#include "noc/text.h"

namespace noc {

using json = nlohmann::ordered_json;

namespace {

static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559);

std::string HexHash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void AppendLittleEndian(std::string& out, const Tensor& t) {
  for (double x : t.values()) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
}

Tensor ReadLittleEndian(const std::string& bytes, std::size_t offset, Shape shape) {
  Tensor t(std::move(shape));
  if ((offset + t.size()) * 8 > bytes.size()) {
    throw FormatError("checkpoint sidecar is truncated");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>(bytes[(offset + i) * 8 + b]))
              << (8 * b);
    }
    t[i] = std::bit_cast<double>(bits);
  }
  return t;
}

// Collects arrays into the manifest list and the binary blob.
class ArrayWriter {
 public:
  json Add(const std::string& name, const Tensor& t) {
    json entry = {{"name", name}, {"shape", t.shape()}, {"offset", offset_},
                  {"count", t.size()}};
    AppendLittleEndian(blob_, t);
    offset_ += t.size();
    return entry;
  }
  const std::string& blob() const { return blob_; }

 private:
  std::string blob_;
  std::size_t offset_ = 0;
};

Tensor ReadArray(const json& entry, const std::string& blob) {
  const Shape shape = entry.at("shape").get<Shape>();
  Tensor t = ReadLittleEndian(blob, entry.at("offset").get<std::size_t>(), shape);
  if (t.size() != entry.at("count").get<std::size_t>()) {
    throw FormatError("checkpoint array '" + entry.value("name", std::string()) +
                      "' count does not match its shape");
  }
  return t;
}

}  // namespace

std::filesystem::path SidecarPath(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".bin");
}

Checkpoint CaptureCheckpoint(const NocModel& model, const RunConfig& config,
                             const NocTrainer* trainer) {
  Checkpoint c;
  c.vocab = model.vocab();
  c.config = config;
  for (const auto& p : model.parameters()) c.parameters.push_back({p->name, p->value});
  if (trainer != nullptr) {
    auto& t = const_cast<NocTrainer&>(*trainer);
    c.step = t.step();
    TrainerState s;
    s.adam_step = t.optimizer().step_count();
    s.first_moments = t.optimizer().first_moments();
    s.second_moments = t.optimizer().second_moments();
    for (std::size_t i = 0; i < 3; ++i) s.samplers.push_back(t.sampler(i).state());
    c.trainer = std::move(s);
  }
  return c;
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& c) {
  ArrayWriter arrays;
  json manifest;
  manifest["format_version"] = c.format_version;
  manifest["vocab_hash"] = HexHash(c.vocab.Hash());
  manifest["vocab"] = c.vocab.tokens();
  manifest["config"] = c.config.ToText();
  manifest["step"] = c.step;
  json params = json::array();
  for (const auto& p : c.parameters) params.push_back(arrays.Add(p.name, p.value));
  manifest["parameters"] = params;
  if (c.trainer) {
    const TrainerState& s = *c.trainer;
    json m = json::array(), v = json::array(), samplers = json::array();
    for (std::size_t i = 0; i < s.first_moments.size(); ++i) {
      m.push_back(arrays.Add("adam.m." + std::to_string(i), s.first_moments[i]));
    }
    for (std::size_t i = 0; i < s.second_moments.size(); ++i) {
      v.push_back(arrays.Add("adam.v." + std::to_string(i), s.second_moments[i]));
    }
    for (const auto& st : s.samplers) {
      samplers.push_back({{"rng", st.rng}, {"order", st.order}, {"cursor", st.cursor}});
    }
    manifest["trainer"] = {{"adam_step", s.adam_step},
                           {"adam_m", m},
                           {"adam_v", v},
                           {"samplers", samplers}};
  }
  manifest["sidecar"] = SidecarPath(path).filename().string();
  WriteFile(path, manifest.dump(2) + "\n");
  WriteFile(SidecarPath(path), arrays.blob());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  json manifest;
  try {
    manifest = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": not a checkpoint manifest: " + e.what());
  }
  const std::string blob = ReadFile(SidecarPath(path));
  try {
    Checkpoint c;
    c.format_version = manifest.at("format_version").get<int>();
    if (c.format_version != kCheckpointFormatVersion) {
      throw FormatError("unsupported checkpoint format version " +
                        std::to_string(c.format_version));
    }
    const auto tokens = manifest.at("vocab").get<std::vector<std::string>>();
    std::vector<std::string> words(tokens.begin() + std::min(tokens.size(), kNumReserved),
                                   tokens.end());
    c.vocab = Vocabulary(words);
    if (c.vocab.tokens() != tokens) {
      throw FormatError("checkpoint vocabulary must start with the reserved tokens");
    }
    if (manifest.at("vocab_hash").get<std::string>() != HexHash(c.vocab.Hash())) {
      throw FormatError("checkpoint vocabulary hash mismatch");
    }
    c.config = RunConfig::Parse(manifest.at("config").get<std::string>());
    c.step = manifest.at("step").get<std::uint64_t>();
    for (const auto& e : manifest.at("parameters")) {
      c.parameters.push_back({e.at("name").get<std::string>(), ReadArray(e, blob)});
    }
    if (manifest.contains("trainer")) {
      const json& t = manifest.at("trainer");
      TrainerState s;
      s.adam_step = t.at("adam_step").get<std::uint64_t>();
      for (const auto& e : t.at("adam_m")) s.first_moments.push_back(ReadArray(e, blob));
      for (const auto& e : t.at("adam_v")) s.second_moments.push_back(ReadArray(e, blob));
      for (const auto& e : t.at("samplers")) {
        s.samplers.push_back({e.at("rng").get<std::string>(),
                              e.at("order").get<std::vector<std::size_t>>(),
                              e.at("cursor").get<std::size_t>()});
      }
      c.trainer = std::move(s);
    }
    return c;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": malformed checkpoint: " + e.what());
  }
}

void RequireVocabulary(const Checkpoint& checkpoint, const Vocabulary& vocab) {
  if (checkpoint.vocab.Hash() != vocab.Hash()) {
    throw FormatError("checkpoint vocabulary hash " + HexHash(checkpoint.vocab.Hash()) +
                      " does not match dataset vocabulary hash " +
                      HexHash(vocab.Hash()));
  }
}

NocModel RestoreModel(const Checkpoint& c) {
  std::map<std::string, const Tensor*> by_name;
  for (const auto& p : c.parameters) by_name[p.name] = &p.value;
  auto find = [&](const std::string& name) -> const Tensor& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("checkpoint lacks array '" + name + "'");
    return *it->second;
  };
  const Tensor& emb = find("embeddings");
  const Tensor& w1 = find("vision.w1");
  if (emb.rank() != 2 || emb.dim(0) != c.vocab.size() || w1.rank() != 2) {
    throw FormatError("checkpoint array shapes do not match its vocabulary");
  }
  EmbeddingTable table(emb, c.config.EmbeddingsFrozen());
  LanguageModel lm(table, c.config.hidden, 0);
  VisualModel vision(w1.dim(1), w1.dim(0), c.vocab.size(), 0);
  NocModel model(c.vocab, std::move(lm), std::move(vision));
  for (const auto& p : model.parameters()) {
    const Tensor& stored = find(p->name);
    if (stored.shape() != p->value.shape()) {
      throw FormatError("checkpoint array '" + p->name + "' has shape " +
                        ShapeString(stored.shape()) + ", expected " +
                        ShapeString(p->value.shape()));
    }
    p->value = stored;
  }
  ApplyJointFreezing(model, c.config);
  return model;
}

void RestoreTrainer(NocTrainer& trainer, const Checkpoint& c) {
  if (!c.trainer) throw FormatError("checkpoint has no trainer state to resume");
  const TrainerState& s = *c.trainer;
  Adam& adam = trainer.optimizer();
  if (s.first_moments.size() != adam.params().size() ||
      s.second_moments.size() != adam.params().size() || s.samplers.size() != 3) {
    throw FormatError("checkpoint trainer state does not match the model");
  }
  adam.set_step_count(s.adam_step);
  adam.first_moments() = s.first_moments;
  adam.second_moments() = s.second_moments;
  for (std::size_t i = 0; i < 3; ++i) trainer.sampler(i).Restore(s.samplers[i]);
  trainer.set_step(c.step);
}

}  // namespace noc
