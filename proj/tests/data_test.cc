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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "noc/data_synth.h"
#include "noc/dataset.h"
#include "noc/errors.h"
#include "noc/experiment.h"
#include "noc/text.h"
#include "test_util.h"

namespace noc {
namespace {

using testing::MakeVocab;
using testing::ScratchDir;

WorldSpec SmallSpec(std::uint64_t seed) {
  WorldSpec spec = WorldSpec::Default();
  spec.num_paired = 1500;
  spec.num_image_only = 200;
  spec.num_text_only = 200;
  spec.seed = seed;
  return spec;
}

TEST_CASE("record files round trip") {
  const auto dir = ScratchDir("dataset_io");
  const std::vector<Words> corpus = {{"a", "cat"}, {"the", "dog", "runs"}};
  WriteCorpus(dir / "c.txt", corpus);
  CHECK(ReadCorpus(dir / "c.txt") == corpus);

  const std::vector<LabeledRecord> labeled = {{"i1", {"cat", "dog"}, {0.5, -1.25}},
                                              {"i2", {}, {1e-3, 2.0}}};
  WriteLabeledImages(dir / "l.tsv", labeled);
  const auto l = ReadLabeledImages(dir / "l.tsv");
  REQUIRE(l.size() == 2);
  CHECK(l[0].labels == labeled[0].labels);
  CHECK(l[1].labels.empty());
  CHECK(l[1].features == labeled[1].features);

  const std::vector<PairedRecord> paired = {{"p1", {"a", "cat"}, {0.1, 0.2}}};
  WritePairedCaptions(dir / "p.tsv", paired);
  const auto p = ReadPairedCaptions(dir / "p.tsv");
  CHECK(p[0].caption == paired[0].caption);
  CHECK(p[0].features == paired[0].features);

  const std::vector<CaptionRecord> caps = {{"p1", {"a", "cat"}, -1.5}, {"p2", {}, -0.25}};
  WriteCaptions(dir / "cap.tsv", caps);
  const auto c = ReadCaptions(dir / "cap.tsv");
  CHECK(c[0].caption == caps[0].caption);
  CHECK(c[1].caption.empty());
  CHECK(c[1].log_prob == -0.25);
}

TEST_CASE("malformed record files") {
  const auto dir = ScratchDir("dataset_errors");
  WriteFile(dir / "two_fields.tsv", "p1\ta cat\n");
  CHECK_THROWS_AS(ReadPairedCaptions(dir / "two_fields.tsv"), FormatError);
  WriteFile(dir / "ragged.tsv", "p1\ta\t1 2\np2\tb\t1\n");
  CHECK_THROWS_AS(ReadPairedCaptions(dir / "ragged.tsv"), FormatError);
  WriteFile(dir / "nan.tsv", "p1\ta\t1 x\n");
  CHECK_THROWS_AS(ReadPairedCaptions(dir / "nan.tsv"), FormatError);
  CHECK_THROWS_AS(ReadCorpus(dir / "missing.txt"), IoError);
}

TEST_CASE("encoding against a vocabulary") {
  const Vocabulary v = MakeVocab({"a", "cat"});
  const std::vector<PairedRecord> paired = {{"p", {"a", "dog"}, {1.0}}};
  const auto enc = EncodePaired(v, paired);
  CHECK(enc[0].caption == Sentence{3, kUnk});
  CHECK(enc[0].features == Tensor::Vector({1.0}));
  const std::vector<LabeledRecord> ok = {{"i", {"cat"}, {1.0}}};
  CHECK(EncodeLabeled(v, ok)[0].labels == LabelVector({4}));
  const std::vector<LabeledRecord> bad = {{"i", {"dog"}, {1.0}}};
  CHECK_THROWS_AS(EncodeLabeled(v, bad), LookupError);
}

TEST_CASE("noiseless images are exactly signature plus context offset") {
  WorldSpec spec = SmallSpec(3);
  spec.noise_sigma = 0.0;
  spec.two_object_prob = 0.0;
  const World w = GenerateWorld(spec);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < spec.objects.size(); ++i) index[spec.objects[i].token] = i;
  for (std::size_t i = 0; i < w.paired.size(); ++i) {
    const auto& f = w.paired[i].features;
    REQUIRE(w.paired_objects[i].size() == 1);
    const std::size_t o = index.at(w.paired_objects[i][0]);
    std::size_t ones = 0, offsets = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (k == o) {
        CHECK(f[k] == 1.0);
        ++ones;
      } else if (k >= spec.objects.size() && k < spec.objects.size() + spec.contexts.size() &&
                 f[k] != 0.0) {
        CHECK(f[k] == spec.context_scale);
        ++offsets;
      } else {
        CHECK(f[k] == 0.0);
      }
    }
    CHECK(ones == 1);
    CHECK(offsets == 1);
    // The caption names the object.
    const auto& cap = w.paired[i].caption;
    CHECK(std::find(cap.begin(), cap.end(), w.paired_objects[i][0]) != cap.end());
  }
}

TEST_CASE("generation is a pure function of the spec") {
  const World a = GenerateWorld(SmallSpec(5));
  const World b = GenerateWorld(SmallSpec(5));
  const World c = GenerateWorld(SmallSpec(6));
  CHECK(a.vocab == b.vocab);
  CHECK(a.embeddings == b.embeddings);
  REQUIRE(a.paired.size() == b.paired.size());
  for (std::size_t i = 0; i < a.paired.size(); ++i) {
    CHECK(a.paired[i].caption == b.paired[i].caption);
    CHECK(a.paired[i].features == b.paired[i].features);
  }
  CHECK(a.text_only == b.text_only);
  CHECK_FALSE(a.paired[0].features == c.paired[0].features);
  CHECK(SmallSpec(5).Hash() == SmallSpec(5).Hash());
  CHECK(SmallSpec(5).Hash() != SmallSpec(6).Hash());
}

TEST_CASE("image-only labels are the generating objects") {
  WorldSpec spec = SmallSpec(7);
  spec.noise_sigma = 0.0;
  const World w = GenerateWorld(spec);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < spec.objects.size(); ++i) index[spec.objects[i].token] = i;
  for (const auto& r : w.image_only) {
    std::set<std::size_t> from_features;
    for (std::size_t k = 0; k < spec.objects.size(); ++k) {
      if (r.features[k] >= 1.0) from_features.insert(k);
    }
    std::set<std::size_t> from_labels;
    for (const auto& l : r.labels) from_labels.insert(index.at(l));
    CHECK(from_features == from_labels);
  }
}

TEST_CASE("text weights set object frequencies in the text-only corpus") {
  WorldSpec spec = SmallSpec(12);
  spec.num_text_only = 4000;
  spec.two_object_prob = 0.0;
  for (auto& o : spec.objects) {
    if (o.token == "zebra") o.text_weight = 0.1;
  }
  const World w = GenerateWorld(spec);
  std::map<std::string, double> count;
  for (const auto& sent : w.text_only) {
    for (const auto& word : sent) ++count[word];
  }
  // Expected share: 0.1 / 29.1 of sentences for zebra, 1 / 29.1 for the rest.
  const double n = 4000.0;
  CHECK(std::abs(count["zebra"] - n * 0.1 / 29.1) < 4.0 * std::sqrt(n * 0.1 / 29.1));
  CHECK(std::abs(count["horse"] - n / 29.1) < 4.0 * std::sqrt(n / 29.1));
  // Captions and labeled images still draw objects uniformly.
  WorldSpec plain = spec;
  for (auto& o : plain.objects) o.text_weight = 1.0;
  const World uniform = GenerateWorld(plain);
  CHECK(w.paired[5].caption == uniform.paired[5].caption);
  CHECK(w.image_only[5].labels == uniform.image_only[5].labels);

  spec.objects[0].text_weight = 0.0;
  CHECK_THROWS_AS(spec.Validate(), ArgumentError);
}

TEST_CASE("distributional vectors cluster by category") {
  const World w = GenerateWorld(SmallSpec(8));
  const EmbeddingTable t(w.embeddings);
  const auto nn = t.NearestNeighbors(w.vocab, "zebra", 2);
  std::set<std::string> got = {nn[0].first, nn[1].first};
  CHECK(got == std::set<std::string>{"horse", "giraffe"});
}

TEST_CASE("held-out split removes every trace from paired training data") {
  const World w = GenerateWorld(SmallSpec(9));
  const auto heldout = DefaultHeldout();
  const HeldoutSplit s = MakeHeldoutSplit(w, heldout);
  const std::set<std::string> held(heldout.begin(), heldout.end());
  std::set<std::string> train_ids;
  for (const auto& r : s.train_paired) {
    train_ids.insert(r.id);
    for (const auto& word : r.caption) CHECK(held.count(word) == 0);
  }
  for (std::size_t i = 0; i < w.paired.size(); ++i) {
    if (!train_ids.count(w.paired[i].id)) continue;
    for (const auto& o : w.paired_objects[i]) CHECK(held.count(o) == 0);
  }
  CHECK(s.train_paired.size() + s.test_paired.size() == w.paired.size());
  CHECK(s.test_objects.size() == s.test_paired.size());
  CHECK(s.image_only.size() == w.image_only.size());
  CHECK(s.text_only == w.text_only);
  // Novel words remain in the unpaired sources.
  bool in_text = false, in_images = false;
  for (const auto& sent : s.text_only) in_text |= std::find(sent.begin(), sent.end(), "zebra") != sent.end();
  for (const auto& r : s.image_only) in_images |= std::find(r.labels.begin(), r.labels.end(), "zebra") != r.labels.end();
  CHECK(in_text);
  CHECK(in_images);
}

TEST_CASE("split edge cases") {
  const World w = GenerateWorld(SmallSpec(10));
  const HeldoutSplit none = MakeHeldoutSplit(w, {});
  CHECK(none.train_paired.size() == w.paired.size());
  CHECK(none.test_paired.empty());
  std::vector<std::string> all;
  for (const auto& o : SmallSpec(10).objects) all.push_back(o.token);
  CHECK_THROWS_AS(MakeHeldoutSplit(w, all), InsufficiencyError);
  WorldSpec tiny = SmallSpec(10);
  tiny.num_paired = 100;
  const std::vector<std::string> one = {"zebra"};
  CHECK_THROWS_AS(MakeHeldoutSplit(GenerateWorld(tiny), one), InsufficiencyError);
  const std::vector<std::string> unknown = {"unicorn"};
  CHECK_THROWS_AS(MakeHeldoutSplit(w, unknown), ArgumentError);
}

TEST_CASE("spec validation names the violated precondition") {
  WorldSpec spec = WorldSpec::Default();
  spec.objects.resize(1);
  try {
    spec.Validate();
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("objects") != std::string::npos);
  }
  spec = WorldSpec::Default();
  spec.feature_dim = 10;
  CHECK_THROWS_AS(spec.Validate(), ArgumentError);
  spec = WorldSpec::Default();
  spec.templates = {"a OBJECT", "no slot here"};
  CHECK_THROWS_AS(spec.Validate(), ArgumentError);
  spec = WorldSpec::Default();
  spec.text_templates = {"only OBJECT"};
  CHECK_THROWS_AS(spec.Validate(), ArgumentError);
  CHECK_NOTHROW(WorldSpec::Default().Validate());
}

TEST_CASE("dataset directory round trip") {
  const auto dir = ScratchDir("dataset_dir");
  const WorldSpec spec = SmallSpec(11);
  const World w = GenerateWorld(spec);
  const HeldoutSplit s = MakeHeldoutSplit(w, DefaultHeldout());
  const DatasetManifest m = WriteDataset(dir, spec, w, s);
  const DatasetManifest back = LoadManifest(dir / "manifest.json");
  CHECK(back.seed == 11);
  CHECK(back.heldout == m.heldout);
  CHECK(back.spec_hash == m.spec_hash);
  CHECK(back.objects.size() == 30);
  const LoadedData data = LoadData(dir / "manifest.json");
  CHECK(data.vocab == w.vocab);
  // Word rows survive the text format bit for bit; control rows are
  // re-drawn from the dataset seed.
  REQUIRE(data.glove.shape() == w.embeddings.shape());
  for (std::size_t r = kNumReserved; r < w.vocab.size(); ++r) {
    for (std::size_t c = 0; c < w.embeddings.shape()[1]; ++c) {
      CHECK(data.glove.at(r, c) == w.embeddings.at(r, c));
    }
  }
  CHECK(data.train_paired.size() == s.train_paired.size());
  CHECK(data.test_paired.size() == s.test_paired.size());
  CHECK(data.truth.size() == s.test_paired.size());
  CHECK(data.image_only.size() == w.image_only.size());
  CHECK(data.feature_dim() == spec.feature_dim);
  CHECK(ReadLabeledImages(dir / "test_labels.tsv").size() == s.test_paired.size());
}

}  // namespace
}  // namespace noc
