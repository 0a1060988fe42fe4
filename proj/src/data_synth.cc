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

#include "noc/data_synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"

#include "noc/errors.h"
#include "noc/random.h"
#include "noc/text.h"
#include "noc/visual_model.h"

namespace noc {

using json = nlohmann::json;

WorldSpec WorldSpec::Default() {
  WorldSpec spec;
  const std::vector<std::pair<std::string, std::vector<std::string>>> categories = {
      {"animal", {"zebra", "horse", "giraffe"}},
      {"pet", {"dog", "cat", "bird"}},
      {"vehicle", {"bus", "truck", "train"}},
      {"furniture", {"couch", "chair", "bed"}},
      {"food", {"pizza", "sandwich", "cake"}},
      {"appliance", {"microwave", "oven", "toaster"}},
      {"sports", {"racket", "bat", "skateboard"}},
      {"tableware", {"bottle", "cup", "bowl"}},
      {"luggage", {"suitcase", "backpack", "umbrella"}},
      {"electronics", {"laptop", "phone", "television"}},
  };
  for (const auto& [category, tokens] : categories) {
    for (const auto& t : tokens) spec.objects.push_back({t, category});
  }
  spec.contexts = {"field", "street", "kitchen", "room"};
  spec.templates = {
      "a OBJECT in the CONTEXT",
      "a photo of a OBJECT in the CONTEXT",
      "there is a OBJECT near the CONTEXT",
      "a OBJECT sitting by the CONTEXT",
      "a close up picture of a OBJECT",
      "a OBJECT and a OBJECT2 in the CONTEXT",
  };
  spec.text_templates = {
      "i saw the OBJECT yesterday",
      "the OBJECT was next to the CONTEXT",
      "we talked about the OBJECT",
      "my OBJECT is old",
      "the OBJECT and the OBJECT2 were there",
  };
  return spec;
}

std::vector<std::string> DefaultHeldout() { return {"zebra", "bus", "couch", "pizza"}; }

namespace {

bool IsSlot(std::string_view w) {
  return w == kObjectSlot || w == kSecondObjectSlot || w == kContextSlot;
}

std::size_t ObjectSlots(const std::string& tmpl) {
  std::size_t n = 0;
  for (const auto& w : SplitWhitespace(tmpl)) {
    if (w == kObjectSlot || w == kSecondObjectSlot) ++n;
  }
  return n;
}

void ValidateTemplates(std::span<const std::string> templates,
                       const std::set<std::string>& names, const std::string& kind);

}  // namespace

void WorldSpec::Validate() const {
  if (objects.size() < 12) {
    throw ArgumentError("world spec needs at least 12 objects, got " +
                        std::to_string(objects.size()));
  }
  if (contexts.size() < 2) {
    throw ArgumentError("world spec needs at least 2 contexts, got " +
                        std::to_string(contexts.size()));
  }
  if (templates.size() < 2) {
    throw ArgumentError("world spec needs at least 2 templates, got " +
                        std::to_string(templates.size()));
  }
  if (text_templates.size() == 1) {
    throw ArgumentError("world spec needs 0 or at least 2 text templates, got 1");
  }
  if (feature_dim < objects.size() + contexts.size()) {
    throw ArgumentError("feature_dim must be >= objects + contexts (" +
                        std::to_string(objects.size() + contexts.size()) + ")");
  }
  if (noise_sigma < 0.0) throw ArgumentError("noise_sigma must be >= 0");
  for (const auto& o : objects) {
    if (!(o.text_weight > 0.0) || !std::isfinite(o.text_weight)) {
      throw ArgumentError("text_weight of '" + o.token + "' must be positive and finite");
    }
  }
  if (two_object_prob < 0.0 || two_object_prob > 1.0) {
    throw ArgumentError("two_object_prob must lie in [0, 1]");
  }
  if (embedding_dim == 0) throw ArgumentError("embedding_dim must be positive");
  std::set<std::string> names;
  for (const auto& o : objects) {
    if (o.token.empty() || !names.insert(o.token).second) {
      throw ArgumentError("object tokens must be unique and non-empty");
    }
  }
  for (const auto& c : contexts) {
    if (c.empty() || !names.insert(c).second) {
      throw ArgumentError("context tokens must be unique and distinct from objects");
    }
  }
  ValidateTemplates(templates, names, "template");
  if (!text_templates.empty()) ValidateTemplates(text_templates, names, "text template");
}

namespace {

void ValidateTemplates(std::span<const std::string> templates,
                       const std::set<std::string>& names, const std::string& kind) {
  bool single = false;
  for (const auto& t : templates) {
    const auto words = SplitWhitespace(t);
    const std::size_t slots = ObjectSlots(t);
    if (slots == 0 || slots > 2) {
      throw ArgumentError(kind + " '" + t + "' must have one or two object slots");
    }
    if (slots == 2 && std::count(words.begin(), words.end(), std::string(kSecondObjectSlot)) != 1) {
      throw ArgumentError("two-object " + kind + " '" + t + "' must use OBJECT and OBJECT2");
    }
    if (slots == 1) single = true;
    for (const auto& w : words) {
      if (!IsSlot(w) && names.contains(w)) {
        throw ArgumentError(kind + " '" + t + "' hard-codes object/context '" + w + "'");
      }
    }
  }
  if (!single) throw ArgumentError("world spec needs a single-object " + kind);
}

}  // namespace

std::string WorldSpec::ToJson() const {
  json j;
  json objs = json::array();
  for (const auto& o : objects) {
    objs.push_back({{"token", o.token}, {"category", o.category}, {"text_weight", o.text_weight}});
  }
  j["objects"] = objs;
  j["contexts"] = contexts;
  j["templates"] = templates;
  j["text_templates"] = text_templates;
  j["feature_dim"] = feature_dim;
  j["noise_sigma"] = noise_sigma;
  j["context_scale"] = context_scale;
  j["two_object_prob"] = two_object_prob;
  j["num_paired"] = num_paired;
  j["num_image_only"] = num_image_only;
  j["num_text_only"] = num_text_only;
  j["embedding_dim"] = embedding_dim;
  j["seed"] = seed;
  return j.dump();
}

std::uint64_t WorldSpec::Hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : ToJson()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

struct Scene {
  std::vector<std::size_t> objects;
  std::size_t context = 0;
  std::size_t tmpl = 0;
};

class SceneSampler {
 public:
  // `weighted` draws objects in proportion to their text weights.
  SceneSampler(const WorldSpec& spec, const std::vector<std::string>& templates,
               bool weighted = false)
      : spec_(spec), templates_(templates) {
    for (std::size_t t = 0; t < templates.size(); ++t) {
      (ObjectSlots(templates[t]) == 1 ? single_ : pair_).push_back(t);
    }
    if (weighted &&
        std::any_of(spec.objects.begin(), spec.objects.end(),
                    [&](const ObjectSpec& o) { return o.text_weight != spec.objects[0].text_weight; })) {
      for (const auto& o : spec.objects) weights_.push_back(o.text_weight);
    }
  }

  Scene Draw(Rng& rng) const {
    Scene s;
    const bool two = !pair_.empty() && UniformUnit(rng) < spec_.two_object_prob;
    const std::size_t n = spec_.objects.size();
    if (weights_.empty()) {
      s.objects.push_back(UniformIndex(rng, n));
      if (two) {
        std::size_t second = UniformIndex(rng, n - 1);
        if (second >= s.objects[0]) ++second;
        s.objects.push_back(second);
      }
    } else {
      s.objects.push_back(WeightedIndex(rng, std::numeric_limits<std::size_t>::max()));
      if (two) s.objects.push_back(WeightedIndex(rng, s.objects[0]));
    }
    s.context = UniformIndex(rng, spec_.contexts.size());
    const auto& pool = two ? pair_ : single_;
    s.tmpl = pool[UniformIndex(rng, pool.size())];
    return s;
  }

  Words Realize(const Scene& s) const {
    Words out;
    for (const auto& w : SplitWhitespace(templates_[s.tmpl])) {
      if (w == kObjectSlot) {
        out.push_back(spec_.objects[s.objects[0]].token);
      } else if (w == kSecondObjectSlot) {
        out.push_back(spec_.objects[s.objects[1]].token);
      } else if (w == kContextSlot) {
        out.push_back(spec_.contexts[s.context]);
      } else {
        out.push_back(ToLower(w));
      }
    }
    return out;
  }

  Words ObjectTokens(const Scene& s) const {
    Words out;
    for (std::size_t o : s.objects) out.push_back(spec_.objects[o].token);
    return out;
  }

  // Object index drawn by text weight, never `exclude`.
  std::size_t WeightedIndex(Rng& rng, std::size_t exclude) const {
    double total = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (i != exclude) total += weights_[i];
    }
    double u = UniformUnit(rng) * total;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (i == exclude) continue;
      last = i;
      if (u < weights_[i]) return i;
      u -= weights_[i];
    }
    return last;
  }

  std::vector<double> Features(const Scene& s, Rng& rng) const {
    std::vector<double> f(spec_.feature_dim, 0.0);
    for (std::size_t o : s.objects) f[o] += 1.0;
    f[spec_.objects.size() + s.context] += spec_.context_scale;
    if (spec_.noise_sigma > 0.0) {
      for (double& v : f) v += spec_.noise_sigma * StandardNormal(rng);
    }
    return f;
  }

 private:
  const WorldSpec& spec_;
  const std::vector<std::string>& templates_;
  std::vector<std::size_t> single_;
  std::vector<std::size_t> pair_;
  std::vector<double> weights_;  // empty: uniform
};

std::string MakeId(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%06zu", prefix, i);
  return buf;
}

std::vector<double> UnitGaussian(std::size_t dim, Rng& rng) {
  std::vector<double> v(dim);
  double n = 0.0;
  for (double& x : v) {
    x = StandardNormal(rng);
    n += x * x;
  }
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

// Cluster structure: object = shared object direction + category direction +
// small individual part; contexts share a context direction; every other
// word gets its own random direction.
Tensor SynthEmbeddings(const WorldSpec& spec, const Vocabulary& vocab) {
  constexpr double kObjectWeight = 0.8;
  constexpr double kCategoryWeight = 0.9;
  constexpr double kIndividualWeight = 0.35;
  const std::size_t d = spec.embedding_dim;
  Rng rng(DeriveSeed(spec.seed, 14));
  const auto object_dir = UnitGaussian(d, rng);
  const auto context_dir = UnitGaussian(d, rng);
  std::map<std::string, std::vector<double>> category_dir;
  for (const auto& o : spec.objects) {
    if (!category_dir.contains(o.category)) category_dir[o.category] = UnitGaussian(d, rng);
  }
  std::map<std::string, const ObjectSpec*> object_of;
  for (const auto& o : spec.objects) object_of[o.token] = &o;
  std::set<std::string> contexts(spec.contexts.begin(), spec.contexts.end());

  Tensor m({vocab.size(), d});
  for (TokenId id = 0; id < vocab.size(); ++id) {
    const std::string& tok = vocab.token(id);
    const auto own = UnitGaussian(d, rng);
    for (std::size_t j = 0; j < d; ++j) {
      double v;
      if (auto it = object_of.find(tok); it != object_of.end()) {
        v = kObjectWeight * object_dir[j] +
            kCategoryWeight * category_dir[it->second->category][j] +
            kIndividualWeight * own[j];
      } else if (contexts.contains(tok)) {
        v = context_dir[j] + kIndividualWeight * own[j];
      } else {
        v = own[j];
      }
      m.at(id, j) = v;
    }
  }
  return m;
}

}  // namespace

World GenerateWorld(const WorldSpec& spec) {
  spec.Validate();
  World world;
  for (const auto* list : {&spec.templates, &spec.text_templates}) {
    for (const auto& t : *list) {
      for (const auto& w : SplitWhitespace(t)) {
        if (!IsSlot(w)) world.vocab.Add(ToLower(w));
      }
    }
  }
  for (const auto& o : spec.objects) world.vocab.Add(o.token);
  for (const auto& c : spec.contexts) world.vocab.Add(c);

  SceneSampler sampler(spec, spec.templates);
  SceneSampler text_sampler(
      spec, spec.text_templates.empty() ? spec.templates : spec.text_templates,
      /*weighted=*/true);
  {
    Rng rng(DeriveSeed(spec.seed, 11));
    for (std::size_t i = 0; i < spec.num_paired; ++i) {
      const Scene s = sampler.Draw(rng);
      world.paired.push_back(
          PairedRecord{MakeId('p', i), sampler.Realize(s), sampler.Features(s, rng)});
      world.paired_objects.push_back(sampler.ObjectTokens(s));
    }
  }
  {
    Rng rng(DeriveSeed(spec.seed, 12));
    for (std::size_t i = 0; i < spec.num_image_only; ++i) {
      const Scene s = sampler.Draw(rng);
      world.image_only.push_back(
          LabeledRecord{MakeId('i', i), sampler.ObjectTokens(s), sampler.Features(s, rng)});
    }
  }
  {
    Rng rng(DeriveSeed(spec.seed, 13));
    for (std::size_t i = 0; i < spec.num_text_only; ++i) {
      world.text_only.push_back(text_sampler.Realize(text_sampler.Draw(rng)));
    }
  }
  world.embeddings = SynthEmbeddings(spec, world.vocab);
  return world;
}

HeldoutSplit MakeHeldoutSplit(const World& world, std::span<const std::string> heldout,
                              std::size_t test_stride) {
  if (test_stride == 0) throw ArgumentError("test_stride must be positive");
  std::set<std::string> objects;
  for (const auto& objs : world.paired_objects) objects.insert(objs.begin(), objs.end());
  for (const auto& r : world.image_only) objects.insert(r.labels.begin(), r.labels.end());
  const std::set<std::string> held(heldout.begin(), heldout.end());
  for (const auto& h : held) {
    if (!objects.contains(h)) throw ArgumentError("held-out token '" + h + "' is not an object");
  }

  HeldoutSplit split;
  split.heldout.assign(held.begin(), held.end());
  split.image_only = world.image_only;
  split.text_only = world.text_only;
  std::map<std::string, std::size_t> test_count;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < world.paired.size(); ++i) {
    const auto& rec = world.paired[i];
    const auto& objs = world.paired_objects[i];
    bool involves = false;
    for (const auto& o : objs) involves |= held.contains(o);
    for (const auto& w : rec.caption) involves |= held.contains(w);
    if (involves) {
      for (const auto& o : objs) {
        if (held.contains(o)) ++test_count[o];
      }
    }
    // Seen-object test images only accompany a non-empty held-out set.
    const bool sampled = !held.empty() && kept++ % test_stride == test_stride - 1;
    if (involves || sampled) {
      split.test_paired.push_back(rec);
      split.test_objects.push_back(objs);
    } else {
      split.train_paired.push_back(rec);
    }
  }
  for (const auto& h : held) {
    if (test_count[h] < kMinHeldoutTestImages) {
      throw InsufficiencyError("held-out object '" + h + "' has only " +
                               std::to_string(test_count[h]) + " test images (need " +
                               std::to_string(kMinHeldoutTestImages) + ")");
    }
  }
  if (split.train_paired.empty()) {
    throw InsufficiencyError("held-out split leaves no paired training data");
  }
  return split;
}

namespace {

std::string HexHash(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

DatasetManifest WriteDataset(const std::filesystem::path& dir, const WorldSpec& spec,
                             const World& world, const HeldoutSplit& split) {
  DatasetManifest m;
  m.dir = dir;
  m.seed = spec.seed;
  m.spec_hash = HexHash(spec.Hash());
  m.heldout = split.heldout;
  for (const auto& o : spec.objects) m.objects.push_back(o.token);

  std::filesystem::create_directories(dir);
  world.vocab.Save(m.Path(m.vocab));
  SaveEmbeddings(m.Path(m.embeddings), EmbeddingTable(world.embeddings), world.vocab);
  std::string stop;
  for (const auto& w : DefaultStopwords()) stop += w + "\n";
  WriteFile(m.Path(m.stopwords), stop);
  WritePairedCaptions(m.Path(m.train_paired), split.train_paired);
  WritePairedCaptions(m.Path(m.test_paired), split.test_paired);
  std::vector<LabeledRecord> truth;
  for (std::size_t i = 0; i < split.test_paired.size(); ++i) {
    truth.push_back(LabeledRecord{split.test_paired[i].id, split.test_objects[i],
                                  split.test_paired[i].features});
  }
  WriteLabeledImages(m.Path(m.test_labels), truth);
  WriteLabeledImages(m.Path(m.image_only), split.image_only);
  WriteCorpus(m.Path(m.text_only), split.text_only);

  json j;
  j["version"] = 1;
  j["seed"] = m.seed;
  j["spec_hash"] = m.spec_hash;
  j["spec"] = json::parse(spec.ToJson());
  j["heldout"] = m.heldout;
  j["objects"] = m.objects;
  j["files"] = {{"vocab", m.vocab},
                {"embeddings", m.embeddings},
                {"stopwords", m.stopwords},
                {"train_paired", m.train_paired},
                {"test_paired", m.test_paired},
                {"test_labels", m.test_labels},
                {"image_only", m.image_only},
                {"text_only", m.text_only}};
  WriteFile(dir / "manifest.json", j.dump(2) + "\n");
  return m;
}

DatasetManifest LoadManifest(const std::filesystem::path& manifest_json) {
  json j;
  try {
    j = json::parse(ReadFile(manifest_json));
  } catch (const json::exception& e) {
    throw FormatError(manifest_json.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.dir = manifest_json.parent_path();
  try {
    if (j.at("version").get<int>() != 1) throw FormatError("unsupported manifest version");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.spec_hash = j.at("spec_hash").get<std::string>();
    m.heldout = j.at("heldout").get<Words>();
    m.objects = j.at("objects").get<Words>();
    const auto& f = j.at("files");
    m.vocab = f.at("vocab").get<std::string>();
    m.embeddings = f.at("embeddings").get<std::string>();
    m.stopwords = f.at("stopwords").get<std::string>();
    m.train_paired = f.at("train_paired").get<std::string>();
    m.test_paired = f.at("test_paired").get<std::string>();
    m.test_labels = f.at("test_labels").get<std::string>();
    m.image_only = f.at("image_only").get<std::string>();
    m.text_only = f.at("text_only").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(manifest_json.string() + ": " + e.what());
  }
  for (const auto& file : {m.vocab, m.embeddings, m.train_paired, m.test_paired,
                           m.test_labels, m.image_only, m.text_only}) {
    if (!std::filesystem::exists(m.Path(file))) {
      throw IoError(manifest_json.string() + ": missing file " + m.Path(file).string());
    }
  }
  return m;
}

}  // namespace noc
