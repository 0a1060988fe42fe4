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

#include "noc/decoding.h"

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "noc/errors.h"
#include "test_util.h"

namespace noc {
namespace {

using testing::RandomTensor;
using testing::SmallModel;

// V = 5: BOS, EOS, UNK and two words. Scaled-up random weights so the
// distributions are far from uniform.
NocModel TinyModel(std::uint64_t seed) {
  NocModel model = SmallModel(2, 3, 4, 4, 3, seed);
  for (const auto& p : model.parameters()) {
    for (double& v : p->value.values()) v *= 4.0;
  }
  return model;
}

void SetVisualBias(NocModel& model, TokenId id, double bias) {
  for (const auto& p : model.vision().parameters()) p->value.Fill(0.0);
  model.vision().parameters()[3]->value[id] = bias;
}

// Every emittable sequence: EOS-terminated within max_len, or max_len
// tokens without EOS.
void Enumerate(std::size_t vocab, std::size_t max_len, std::vector<TokenId>& prefix,
               std::vector<std::vector<TokenId>>& out) {
  for (TokenId id = 0; id < vocab; ++id) {
    if (id == kBos || id == kUnk) continue;
    prefix.push_back(id);
    if (id == kEos || prefix.size() == max_len) {
      out.push_back(prefix);
    } else {
      Enumerate(vocab, max_len, prefix, out);
    }
    prefix.pop_back();
  }
}

TEST_CASE("exhaustive beam finds the brute-force optimum") {
  std::vector<std::vector<TokenId>> all;
  std::vector<TokenId> prefix;
  Enumerate(5, 3, prefix, all);
  REQUIRE(all.size() == 1 + 2 * (1 + 2 * 3));  // 15 sequences
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    const NocModel model = TinyModel(seed);
    const Tensor features = RandomTensor({4}, seed + 100, 1.0);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<TokenId> argmax;
    for (const auto& seq : all) {
      const double lp = ScoreTokens(model, features, seq);
      if (lp > best) {
        best = lp;
        argmax = seq;
      }
    }
    const DecodeResult beam = BeamDecode(model, features, {125, 3, false});
    CHECK(beam.tokens == argmax);
    CHECK(beam.log_prob == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("beam of width one is greedy") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NocModel model = SmallModel(6, 3, 4, 4, 3, seed);
    const Tensor features = RandomTensor({4}, seed + 7, 1.0);
    const DecodeResult g = GreedyDecode(model, features, 6);
    const DecodeResult b = BeamDecode(model, features, {1, 6, false});
    CHECK(g.tokens == b.tokens);
    CHECK(g.log_prob == b.log_prob);
  }
}

TEST_CASE("log-probabilities match teacher-forced rescoring") {
  const NocModel model = SmallModel(6, 3, 4, 4, 3, 3);
  const Tensor features = RandomTensor({4}, 4, 1.0);
  const DecodeResult g = GreedyDecode(model, features, 7);
  CHECK(g.log_prob == doctest::Approx(ScoreTokens(model, features, g.tokens)).epsilon(1e-12));
  const DecodeResult b = BeamDecode(model, features, {4, 7, false});
  CHECK(b.log_prob == doctest::Approx(ScoreTokens(model, features, b.tokens)).epsilon(1e-12));
  CHECK(b.log_prob >= g.log_prob - 1e-12);
  for (const auto& s : DrawSamples(model, features, 5, 7, 9)) {
    CHECK(s.log_prob == doctest::Approx(ScoreTokens(model, features, s.tokens)).epsilon(1e-12));
  }
}

TEST_CASE("a strong image activation decides the first word") {
  NocModel model = SmallModel(4, 3, 4, 4, 3, 5);
  for (const auto& p : model.lm().parameters()) p->value.Fill(0.0);
  const TokenId zebra = 5;
  SetVisualBias(model, zebra, 10.0);
  const DecodeResult r = GreedyDecode(model, RandomTensor({4}, 6), 4);
  CHECK(r.tokens.front() == zebra);
}

TEST_CASE("immediate end of sentence gives an empty caption") {
  NocModel model = SmallModel(4, 3, 4, 4, 3, 6);
  SetVisualBias(model, kEos, 50.0);
  const DecodeResult r = GreedyDecode(model, RandomTensor({4}, 7), 5);
  CHECK(r.tokens == std::vector<TokenId>{kEos});
  CHECK(r.words().empty());
}

TEST_CASE("control tokens other than end of sentence are never emitted") {
  NocModel model = SmallModel(4, 3, 4, 4, 3, 7);
  SetVisualBias(model, kUnk, 50.0);
  model.vision().parameters()[3]->value[kBos] = 50.0;
  const Tensor f = RandomTensor({4}, 8);
  auto check = [](const DecodeResult& r) {
    for (TokenId id : r.tokens) CHECK((id != kBos && id != kUnk));
  };
  check(GreedyDecode(model, f, 6));
  check(BeamDecode(model, f, {3, 6, false}));
  for (const auto& s : DrawSamples(model, f, 10, 6, 1)) check(s);
}

TEST_CASE("max_len bounds every decoder") {
  NocModel model = SmallModel(4, 3, 4, 4, 3, 8);
  SetVisualBias(model, 4, 50.0);  // never stops on its own
  const Tensor f = RandomTensor({4}, 9);
  const DecodeResult g = GreedyDecode(model, f, 3);
  CHECK(g.tokens == std::vector<TokenId>{4, 4, 4});
  CHECK(g.words() == g.tokens);
  CHECK(BeamDecode(model, f, {2, 3, false}).tokens.size() == 3);
  CHECK(SampleRankDecode(model, f, 2, 3, 1).tokens.size() == 3);
  CHECK_THROWS_AS(GreedyDecode(model, f, 0), ArgumentError);
  CHECK_THROWS_AS(BeamDecode(model, f, {0, 3, false}), ArgumentError);
  CHECK_THROWS_AS(SampleRankDecode(model, f, 0, 3, 1), ArgumentError);
}

TEST_CASE("sample and rank") {
  const NocModel model = SmallModel(6, 3, 4, 4, 3, 10);
  const Tensor f = RandomTensor({4}, 11, 1.0);
  const auto samples = DrawSamples(model, f, 25, 8, 42);
  CHECK(samples.size() == 25);
  // Reproducible under a fixed seed.
  const auto again = DrawSamples(model, f, 25, 8, 42);
  for (std::size_t i = 0; i < samples.size(); ++i) CHECK(samples[i].tokens == again[i].tokens);
  // The ranking keeps the extreme sample.
  double hi = -1e300, lo = 1e300;
  for (const auto& s : samples) {
    hi = std::max(hi, s.log_prob);
    lo = std::min(lo, s.log_prob);
  }
  CHECK(SampleRankDecode(model, f, 25, 8, 42).log_prob == hi);
  CHECK(SampleRankDecode(model, f, 25, 8, 42, SampleSelection::kLowestLogProb).log_prob == lo);
  // n = 1 returns the single draw as is.
  CHECK(SampleRankDecode(model, f, 1, 8, 42).tokens == samples[0].tokens);
  CHECK(SampleRankDecode(model, f, 1, 8, 42).method == DecodeMethod::kSampleRank);
}

TEST_CASE("sampling a near-deterministic model collapses to greedy") {
  NocModel model = SmallModel(4, 3, 4, 4, 3, 12);
  for (const auto& p : model.lm().parameters()) p->value.Fill(0.0);
  SetVisualBias(model, kEos, 60.0);
  const Tensor f = RandomTensor({4}, 13);
  CHECK(SampleRankDecode(model, f, 5, 6, 3).tokens == GreedyDecode(model, f, 6).tokens);
}

TEST_CASE("length normalization changes the ranking rule only") {
  const NocModel model = TinyModel(14);
  const Tensor f = RandomTensor({4}, 15, 1.0);
  const DecodeResult r = BeamDecode(model, f, {125, 3, true});
  std::vector<std::vector<TokenId>> all;
  std::vector<TokenId> prefix;
  Enumerate(5, 3, prefix, all);
  double best = -1e300;
  for (const auto& seq : all) {
    best = std::max(best, ScoreTokens(model, f, seq) / static_cast<double>(seq.size()));
  }
  CHECK(r.log_prob / static_cast<double>(r.tokens.size()) == doctest::Approx(best).epsilon(1e-12));
  CHECK(std::string(DecodeMethodName(DecodeMethod::kBeam)) == "beam");
}

}  // namespace
}  // namespace noc
