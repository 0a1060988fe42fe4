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

#include <string>

#include "doctest.h"
#include "noc/config.h"
#include "noc/errors.h"

namespace noc {
namespace {

TEST_CASE("defaults are valid and round trip through text") {
  const RunConfig def;
  CHECK_NOTHROW(def.Validate());
  const RunConfig back = RunConfig::Parse(def.ToText());
  CHECK(back.ToText() == def.ToText());
}

TEST_CASE("every key is settable and survives a round trip") {
  RunConfig c = RunConfig::Parse(
      "# comment\n"
      "alpha = 0.25\nbeta=0.5\nlearning_rate=0.01\nbatch_paired=3\n"
      "batch_image=4\nbatch_text=5\nsteps=77\nseed=9\nclip_norm=2.5\n"
      "vision_lr_scale=0.3\nhidden=16\nvisual_hidden=12\nuse_glove=false\n"
      "freeze_embeddings=false\nlm_pretrain=no\nlm_pretrain_steps=11\n"
      "vision_pretrain=0\nvision_pretrain_steps=13\nvisual_mode=fixed\n"
      "aux_objectives=false\nmax_len=7\n");
  CHECK(c.train.alpha == 0.25);
  CHECK(c.train.beta == 0.5);
  CHECK(c.train.learning_rate == 0.01);
  CHECK(c.train.batch_paired == 3);
  CHECK(c.train.batch_image == 4);
  CHECK(c.train.batch_text == 5);
  CHECK(c.train.steps == 77);
  CHECK(c.train.seed == 9);
  CHECK(c.train.clip_norm == 2.5);
  CHECK(c.train.vision_lr_scale == 0.3);
  CHECK(c.hidden == 16);
  CHECK(c.visual_hidden == 12);
  CHECK_FALSE(c.use_glove);
  CHECK_FALSE(c.freeze_embeddings);
  CHECK_FALSE(c.lm_pretrain);
  CHECK(c.lm_pretrain_steps == 11);
  CHECK_FALSE(c.vision_pretrain);
  CHECK(c.vision_pretrain_steps == 13);
  CHECK(c.visual_mode == VisualMode::kFixed);
  CHECK_FALSE(c.aux_objectives);
  CHECK(c.max_len == 7);
  CHECK(RunConfig::Parse(c.ToText()).ToText() == c.ToText());
  CHECK(RunConfig::Keys().size() == 21);
}

TEST_CASE("unknown keys list the valid ones") {
  RunConfig c;
  try {
    c.Set("alhpa", "1");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("alhpa") != std::string::npos);
    for (const auto& k : RunConfig::Keys()) CHECK(msg.find(k) != std::string::npos);
  }
}

TEST_CASE("bad values") {
  CHECK_THROWS_AS(RunConfig::Parse("steps=-1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse("alpha=abc\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse("use_glove=maybe\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse("visual_mode=frozen\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse("hidden=0\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse("max_len=0\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse("learning_rate=0\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::Parse("batch_paired=0\n"), ConfigError);
}

TEST_CASE("aux objectives switch zeroes both auxiliary weights") {
  RunConfig c;
  c.train.alpha = 0.7;
  c.train.beta = 0.3;
  CHECK(c.EffectiveTrain().alpha == 0.7);
  CHECK(c.EffectiveTrain().beta == 0.3);
  c.aux_objectives = false;
  CHECK(c.EffectiveTrain().alpha == 0.0);
  CHECK(c.EffectiveTrain().beta == 0.0);
  CHECK(c.train.alpha == 0.7);
}

TEST_CASE("only distributional vectors can be frozen") {
  RunConfig c;
  CHECK(c.EmbeddingsFrozen());
  c.freeze_embeddings = false;
  CHECK_FALSE(c.EmbeddingsFrozen());
  c.freeze_embeddings = true;
  c.use_glove = false;
  CHECK_FALSE(c.EmbeddingsFrozen());
}

}  // namespace
}  // namespace noc
