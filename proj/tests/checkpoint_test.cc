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

#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "noc/checkpoint.h"
#include "noc/errors.h"
#include "noc/experiment.h"
#include "noc/text.h"
#include "test_util.h"

namespace noc {
namespace {

using testing::RandomTensor;
using testing::ScratchDir;
using testing::SmallModel;

constexpr std::size_t kWords = 6, kDim = 4, kHidden = 5, kFeat = 3, kVisHidden = 4;

RunConfig SmallConfig() {
  RunConfig c;
  c.hidden = kHidden;
  c.visual_hidden = kVisHidden;
  c.use_glove = false;  // trainable embeddings, as in SmallModel
  c.train.learning_rate = 0.01;
  c.train.batch_paired = 2;
  c.train.batch_image = 2;
  c.train.batch_text = 2;
  return c;
}

struct Fixture {
  std::vector<PairedExample> paired;
  std::vector<LabeledImage> images;
  std::vector<Sentence> text;
  TrainingSources sources() const { return {paired, images, text}; }
};

Fixture MakeFixture() {
  Fixture f;
  for (std::size_t i = 0; i < 5; ++i) {
    f.paired.push_back({"p" + std::to_string(i), RandomTensor({kFeat}, 100 + i),
                        {static_cast<TokenId>(3 + i % kWords), static_cast<TokenId>(4 + i % 3)}});
    f.images.push_back({"i" + std::to_string(i), RandomTensor({kFeat}, 200 + i),
                        LabelVector({static_cast<TokenId>(3 + (i + 2) % kWords)})});
    f.text.push_back({static_cast<TokenId>(3 + (i + 1) % kWords), 5, 6});
  }
  return f;
}

bool SameBits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

void CheckSameParameters(const NocModel& a, const NocModel& b) {
  const auto pa = a.parameters();
  const auto pb = b.parameters();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->name == pb[i]->name);
    CHECK(pa[i]->trainable == pb[i]->trainable);
    REQUIRE(pa[i]->value.shape() == pb[i]->value.shape());
    CHECK(pa[i]->value == pb[i]->value);
  }
}

TEST_CASE("save, load and re-save are byte identical") {
  const auto dir = ScratchDir("ckpt_bytes");
  const NocModel model = SmallModel(kWords, kDim, kHidden, kFeat, kVisHidden, 1);
  const RunConfig config = SmallConfig();
  SaveCheckpoint(dir / "a.json", CaptureCheckpoint(model, config));
  const Checkpoint loaded = LoadCheckpoint(dir / "a.json");
  std::filesystem::create_directories(dir / "again");
  SaveCheckpoint(dir / "again" / "a.json", loaded);
  CHECK(ReadFile(dir / "a.json") == ReadFile(dir / "again" / "a.json"));
  CHECK(ReadFile(SidecarPath(dir / "a.json")) ==
        ReadFile(SidecarPath(dir / "again" / "a.json")));
  CHECK(loaded.config.ToText() == config.ToText());
  CHECK(loaded.vocab == model.vocab());
  CHECK_FALSE(loaded.trainer.has_value());
  CheckSameParameters(model, RestoreModel(loaded));
}

TEST_CASE("restored model captions identically") {
  const auto dir = ScratchDir("ckpt_decode");
  const NocModel model = SmallModel(kWords, kDim, kHidden, kFeat, kVisHidden, 2);
  SaveCheckpoint(dir / "m.json", CaptureCheckpoint(model, SmallConfig()));
  const NocModel back = RestoreModel(LoadCheckpoint(dir / "m.json"));
  const Tensor x = RandomTensor({kFeat}, 9);
  DecodeSpec spec;
  spec.method = DecodeMethod::kBeam;
  spec.width = 3;
  spec.max_len = 6;
  const auto a = Decode(model, x, spec, 1);
  const auto b = Decode(back, x, spec, 1);
  CHECK(a.tokens == b.tokens);
  CHECK(SameBits(a.log_prob, b.log_prob));
}

TEST_CASE("vocabulary mismatch is reported with both hashes") {
  const NocModel model = SmallModel(kWords, kDim, kHidden, kFeat, kVisHidden, 3);
  const Checkpoint c = CaptureCheckpoint(model, SmallConfig());
  CHECK_NOTHROW(RequireVocabulary(c, model.vocab()));
  const Vocabulary other = testing::MakeVocab({"w0", "w1", "w2", "w3", "w4", "x"});
  try {
    RequireVocabulary(c, other);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("vocabulary hash") != std::string::npos);
  }
}

TEST_CASE("corrupt or missing checkpoints") {
  const auto dir = ScratchDir("ckpt_corrupt");
  CHECK_THROWS_AS(LoadCheckpoint(dir / "missing.json"), IoError);
  WriteFile(dir / "bad.json", "{not json");
  CHECK_THROWS_AS(LoadCheckpoint(dir / "bad.json"), FormatError);

  const NocModel model = SmallModel(kWords, kDim, kHidden, kFeat, kVisHidden, 4);
  SaveCheckpoint(dir / "ok.json", CaptureCheckpoint(model, SmallConfig()));
  std::string bin = ReadFile(SidecarPath(dir / "ok.json"));
  bin.resize(bin.size() / 2);
  WriteFile(SidecarPath(dir / "ok.json"), bin);
  CHECK_THROWS_AS(LoadCheckpoint(dir / "ok.json"), FormatError);

  Checkpoint c = CaptureCheckpoint(model, SmallConfig());
  c.parameters.erase(c.parameters.begin());
  CHECK_THROWS_AS(RestoreModel(c), FormatError);
}

TEST_CASE("resuming continues the uninterrupted run bit for bit") {
  const auto dir = ScratchDir("ckpt_resume");
  const Fixture data = MakeFixture();
  const RunConfig config = SmallConfig();

  NocModel straight = SmallModel(kWords, kDim, kHidden, kFeat, kVisHidden, 5);
  NocTrainer full(straight, data.sources(), config.train);
  full.Run(12);

  NocModel first = SmallModel(kWords, kDim, kHidden, kFeat, kVisHidden, 5);
  NocTrainer part(first, data.sources(), config.train);
  part.Run(7);
  SaveCheckpoint(dir / "mid.json", CaptureCheckpoint(first, config, &part));

  const Checkpoint mid = LoadCheckpoint(dir / "mid.json");
  CHECK(mid.step == 7);
  REQUIRE(mid.trainer.has_value());
  NocModel resumed = RestoreModel(mid);
  NocTrainer cont(resumed, data.sources(), config.train);
  RestoreTrainer(cont, mid);
  cont.Run(5);

  REQUIRE(cont.log().size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(SameBits(cont.log()[i].total, full.log()[7 + i].total));
    CHECK(SameBits(cont.log()[i].l_cm, full.log()[7 + i].l_cm));
  }
  CHECK(cont.step() == 12);
  CheckSameParameters(straight, resumed);
}

TEST_CASE("resume requires trainer state") {
  const NocModel model = SmallModel(kWords, kDim, kHidden, kFeat, kVisHidden, 6);
  const Checkpoint c = CaptureCheckpoint(model, SmallConfig());
  const Fixture data = MakeFixture();
  NocModel m = RestoreModel(c);
  NocTrainer t(m, data.sources(), SmallConfig().train);
  CHECK_THROWS_AS(RestoreTrainer(t, c), FormatError);
}

}  // namespace
}  // namespace noc
