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

#ifndef NOC_DATA_SYNTH_H_
#define NOC_DATA_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "noc/dataset.h"
#include "noc/embedding.h"
#include "noc/vocab.h"

namespace noc {

// Template placeholders.
inline constexpr std::string_view kObjectSlot = "OBJECT";
inline constexpr std::string_view kSecondObjectSlot = "OBJECT2";
inline constexpr std::string_view kContextSlot = "CONTEXT";

struct ObjectSpec {
  std::string token;
  std::string category;
  // Relative frequency of the object in the text-only corpus. Captions and
  // labeled images draw objects uniformly.
  double text_weight = 1.0;
};

// Description of a synthetic world. Object i has feature signature e_i (a
// unit basis vector); context j adds context_scale * e_{num_objects + j}.
struct WorldSpec {
  std::vector<ObjectSpec> objects;
  std::vector<std::string> contexts;
  // Space-separated tokens with OBJECT / OBJECT2 / CONTEXT slots.
  std::vector<std::string> templates;
  // Templates for the text-only corpus; empty means the caption templates.
  std::vector<std::string> text_templates;
  std::size_t feature_dim = 40;
  double noise_sigma = 0.25;
  double context_scale = 0.5;
  // Chance that an image holds two objects (needs an OBJECT2 template).
  double two_object_prob = 0.2;
  std::size_t num_paired = 3000;
  std::size_t num_image_only = 3000;
  std::size_t num_text_only = 3000;
  std::size_t embedding_dim = 12;
  std::uint64_t seed = 1;

  // 30 objects in 10 categories of 3, 4 contexts, 6 templates.
  static WorldSpec Default();

  // ArgumentError naming the violated precondition.
  void Validate() const;
  std::string ToJson() const;
  std::uint64_t Hash() const;
};

// Held-out objects used by the default benchmark, one per category that
// keeps two seen neighbors.
std::vector<std::string> DefaultHeldout();

struct World {
  Vocabulary vocab;
  std::vector<PairedRecord> paired;
  // Objects depicted in paired[i], in caption order.
  std::vector<Words> paired_objects;
  std::vector<LabeledRecord> image_only;
  std::vector<Words> text_only;
  // Distributional word vectors for the whole vocabulary: objects sit near
  // their category mates, contexts near each other.
  Tensor embeddings;
};

// Pure function of the spec (including its seed).
World GenerateWorld(const WorldSpec& spec);

struct HeldoutSplit {
  Words heldout;
  std::vector<PairedRecord> train_paired;
  std::vector<PairedRecord> test_paired;
  std::vector<Words> test_objects;  // parallel to test_paired
  std::vector<LabeledRecord> image_only;
  std::vector<Words> text_only;
};

inline constexpr std::size_t kMinHeldoutTestImages = 20;

// Moves every paired example whose image or caption involves a held-out
// object into the test set, plus every `test_stride`-th remaining example
// (none when `heldout` is empty, so training keeps the full paired set).
// Image-only and text-only sources are kept whole.
HeldoutSplit MakeHeldoutSplit(const World& world, std::span<const std::string> heldout,
                              std::size_t test_stride = 10);

// Files produced by `generate`, relative to the manifest directory.
struct DatasetManifest {
  std::filesystem::path dir;
  std::uint64_t seed = 0;
  std::string spec_hash;
  Words heldout;
  Words objects;
  std::string vocab = "vocab.txt";
  std::string embeddings = "embeddings.txt";
  std::string stopwords = "stopwords.txt";
  std::string train_paired = "train_paired.tsv";
  std::string test_paired = "test_paired.tsv";
  std::string test_labels = "test_labels.tsv";
  std::string image_only = "image_only.tsv";
  std::string text_only = "text_only.txt";

  std::filesystem::path Path(const std::string& file) const { return dir / file; }
};

// Writes all dataset files and manifest.json into `dir`.
DatasetManifest WriteDataset(const std::filesystem::path& dir, const WorldSpec& spec,
                             const World& world, const HeldoutSplit& split);
DatasetManifest LoadManifest(const std::filesystem::path& manifest_json);

}  // namespace noc

#endif  // NOC_DATA_SYNTH_H_
