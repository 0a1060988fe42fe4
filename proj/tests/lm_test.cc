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

#include "noc/language_model.h"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "noc/errors.h"
#include "test_util.h"

namespace noc {
namespace {

using testing::RandomTensor;

// V = 4 (three reserved tokens plus one word), d = 1, H = 1.
LanguageModel HandLstm() {
  EmbeddingTable table(Tensor::Matrix({{0.5}, {-1.0}, {0.2}, {1.0}}));
  LanguageModel lm(table, 1, 0);
  lm.input_weights()->value = Tensor::Matrix({{0.1}, {0.2}, {-0.3}, {0.4}});
  lm.recurrent_weights()->value = Tensor::Matrix({{0.5}, {-0.6}, {0.7}, {0.8}});
  lm.gate_bias()->value = Tensor::Vector({0.05, 1.0, -0.1, 0.2});
  lm.output_weights()->value = Tensor::Matrix({{1.5}});
  lm.output_bias()->value = Tensor::Vector({0.25});
  return lm;
}

TEST_CASE("zero parameters give zero logits") {
  const EmbeddingTable table(RandomTensor({6, 3}, 1));
  const LanguageModel lm = LanguageModel::Zeros(table, 4);
  Graph g;
  auto [state, logits] = lm.Step(g, lm.InitialState(g), 4);
  CHECK(logits.value() == Tensor({6}));
  auto [state2, logits2] = lm.Step(g, state, 5);
  CHECK(logits2.value() == Tensor({6}));
}

TEST_CASE("zero-parameter loss is (len+1) log V") {
  const EmbeddingTable table(RandomTensor({7, 3}, 2));
  const LanguageModel lm = LanguageModel::Zeros(table, 4);
  for (const Sentence& s : {Sentence{3}, Sentence{3, 4, 5}, Sentence{6, 6, 6, 6, 6}}) {
    CHECK(std::abs(lm.Loss(s) - static_cast<double>(s.size() + 1) * std::log(7.0)) < 1e-9);
  }
  CHECK_THROWS_AS(lm.Loss(Sentence{}), ArgumentError);
}

TEST_CASE("hand-computed single-unit LSTM") {
  const LanguageModel lm = HandLstm();
  Graph g;
  auto [s1, l1] = lm.Step(g, lm.InitialState(g), kBos);
  CHECK(s1.hidden.value()[0] == doctest::Approx(0.086190544334730945638).epsilon(1e-14));
  CHECK(s1.cell.value()[0] == doctest::Approx(0.19946529748821439747).epsilon(1e-14));
  const std::vector<double> expect1 = {0.18964290825104820923, -0.37928581650209641846,
                                       0.075857163300419283691, 0.37928581650209641846};
  for (std::size_t v = 0; v < 4; ++v) {
    CHECK(l1.value()[v] == doctest::Approx(expect1[v]).epsilon(1e-14));
  }
  auto [s2, l2] = lm.Step(g, s1, 3);
  CHECK(s2.hidden.value()[0] == doctest::Approx(0.18281286597933092227).epsilon(1e-14));
  CHECK(s2.cell.value()[0] == doctest::Approx(0.47169738472390179527).epsilon(1e-14));
  const std::vector<double> expect2 = {0.2621096494844981917, -0.5242192989689963834,
                                       0.10484385979379927668, 0.5242192989689963834};
  for (std::size_t v = 0; v < 4; ++v) {
    CHECK(l2.value()[v] == doctest::Approx(expect2[v]).epsilon(1e-14));
  }
  // The loss of sentence [3] is the two teacher-forced terms.
  const double want = -LogSoftmaxValues(Tensor::Vector(expect1))[3] -
                      LogSoftmaxValues(Tensor::Vector(expect2))[kEos];
  CHECK(lm.Loss(Sentence{3}) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("steps are deterministic and reject bad ids") {
  const EmbeddingTable table(RandomTensor({6, 3}, 3));
  const LanguageModel lm(table, 4, 9);
  Graph g1, g2;
  auto a = lm.Step(g1, lm.InitialState(g1), 4);
  auto b = lm.Step(g2, lm.InitialState(g2), 4);
  CHECK(a.second.value() == b.second.value());
  CHECK(a.first.cell.value() == b.first.cell.value());
  CHECK_THROWS_AS(lm.Step(g1, lm.InitialState(g1), 6), IndexError);
}

TEST_CASE("initialization follows the documented scheme") {
  const LanguageModel lm(EmbeddingTable(RandomTensor({6, 3}, 4)), 5, 11);
  for (const auto& p : {lm.input_weights(), lm.recurrent_weights(), lm.output_weights()}) {
    for (double w : p->value.values()) CHECK(std::abs(w) <= LanguageModel::kInitScale);
  }
  const Tensor& b = lm.gate_bias()->value;
  for (std::size_t i = 0; i < 20; ++i) CHECK(b[i] == (i >= 5 && i < 10 ? 1.0 : 0.0));
}

TEST_CASE("tied embedding gradient combines lookup and projection") {
  EmbeddingTable table(RandomTensor({6, 2}, 5), /*frozen=*/false);
  const LanguageModel lm(table, 3, 12);
  std::vector<ParameterPtr> params = lm.parameters();
  params.push_back(table.parameter());
  const Sentence s = {3, 5, 4};
  CHECK(FiniteDiffCheck(params, [&](Graph& g) { return lm.Loss(g, s); }) < 1e-6);
}

std::vector<Sentence> SmallCorpus() {
  std::vector<Sentence> corpus;
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    // "w3 w4|w5 w6" patterns with a little variety.
    Sentence s = {3, static_cast<TokenId>(4 + UniformIndex(rng, 2)), 6};
    if (i % 3 == 0) s.push_back(7);
    corpus.push_back(s);
  }
  return corpus;
}

TEST_CASE("pretraining lowers the corpus loss and is seeded") {
  const auto corpus = SmallCorpus();
  TrainConfig cfg;
  cfg.steps = 200;
  cfg.batch_text = 4;
  cfg.learning_rate = 0.01;
  auto run = [&] {
    LanguageModel lm(EmbeddingTable::Random(8, 4, 1, 0.5), 8, 2);
    return LmPretrain(lm, corpus, cfg);
  };
  const TrainingLog a = run();
  const TrainingLog b = run();
  CHECK(a.step_loss == b.step_loss);
  REQUIRE(a.epoch_loss.size() == 40);
  CHECK(a.epoch_loss.back() < a.epoch_loss.front());
  CHECK(a.epoch_loss.back() < 0.5 * a.epoch_loss.front());
}

TEST_CASE("a single repeated sentence is memorized") {
  const std::vector<Sentence> corpus(5, Sentence{3, 4});
  TrainConfig cfg;
  cfg.steps = 400;
  cfg.batch_text = 2;
  cfg.learning_rate = 0.02;
  LanguageModel lm(EmbeddingTable::Random(5, 4, 3, 0.5), 8, 4);
  LmPretrain(lm, corpus, cfg);
  CHECK(lm.Loss(corpus[0]) / 3.0 < 0.05);
}

TEST_CASE("frozen embeddings stay put during pretraining") {
  EmbeddingTable table = EmbeddingTable::Random(8, 4, 1, 0.5);
  const Tensor before = table.matrix();
  LanguageModel lm(table, 4, 2);
  TrainConfig cfg;
  cfg.steps = 20;
  LmPretrain(lm, SmallCorpus(), cfg);
  CHECK(table.matrix() == before);
  table.set_frozen(false);
  LmPretrain(lm, SmallCorpus(), cfg);
  CHECK_FALSE(table.matrix() == before);
}

}  // namespace
}  // namespace noc
