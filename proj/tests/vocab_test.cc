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

#include "noc/vocab.h"

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "noc/embedding.h"
#include "noc/errors.h"
#include "noc/random.h"
#include "noc/text.h"
#include "test_util.h"

namespace noc {
namespace {

using testing::MakeVocab;
using testing::ScratchDir;

TEST_CASE("reserved tokens come first") {
  const Vocabulary v;
  REQUIRE(v.size() == kNumReserved);
  CHECK(v.token(kBos) == kBosToken);
  CHECK(v.token(kEos) == kEosToken);
  CHECK(v.token(kUnk) == kUnkToken);
  CHECK(Vocabulary::IsControl(kUnk));
  CHECK_FALSE(Vocabulary::IsControl(kNumReserved));
}

TEST_CASE("token and id round trip for every entry") {
  const Vocabulary v = MakeVocab({"cat", "dog", "zebra", "<s>"});
  CHECK(v.size() == 6);
  for (TokenId id = 0; id < v.size(); ++id) CHECK(v.id(v.token(id)) == id);
  CHECK(v.id("cat") == 3);
  CHECK(v.IdOrUnk("giraffe") == kUnk);
  CHECK_THROWS_AS(v.id("giraffe"), LookupError);
  CHECK_THROWS_AS(v.token(6), IndexError);
  const std::vector<std::string> words = {"dog", "mouse", "cat"};
  const auto ids = v.Encode(words);
  CHECK(ids == std::vector<TokenId>{4, kUnk, 3});
  CHECK(v.Decode(ids) == std::vector<std::string>{"dog", "<unk>", "cat"});
}

TEST_CASE("duplicates are rejected; Add is idempotent") {
  CHECK_THROWS_AS(MakeVocab({"a", "a"}), ArgumentError);
  Vocabulary v;
  const TokenId a = v.Add("a");
  CHECK(v.Add("a") == a);
  CHECK(v.size() == kNumReserved + 1);
  CHECK_THROWS_AS(v.Add(""), ArgumentError);
}

TEST_CASE("vocabulary save and load") {
  const auto dir = ScratchDir("vocab_io");
  const Vocabulary v = MakeVocab({"cat", "dog"});
  v.Save(dir / "vocab.txt");
  const Vocabulary back = Vocabulary::Load(dir / "vocab.txt");
  CHECK(back == v);
  CHECK(back.Hash() == v.Hash());
  CHECK(MakeVocab({"dog", "cat"}).Hash() != v.Hash());
  WriteFile(dir / "bad.txt", "cat\ndog\n");
  CHECK_THROWS_AS(Vocabulary::Load(dir / "bad.txt"), FormatError);
}

TEST_CASE("embedding file parse") {
  const auto dir = ScratchDir("embedding_io");
  WriteFile(dir / "e.txt", "cat 0.1 0.2\ndog 0.3 0.4\nignored 9 9\n");
  const Vocabulary v = MakeVocab({"cat", "dog"});
  const EmbeddingTable t = LoadEmbeddings(dir / "e.txt", v, 5);
  CHECK(t.vocab_size() == 5);
  CHECK(t.dim() == 2);
  CHECK(t.Embed(3) == Tensor::Vector({0.1, 0.2}));
  CHECK(t.Embed(4) == Tensor::Vector({0.3, 0.4}));
  CHECK(t.Embed(3) == t.Embed(3));
  CHECK_THROWS_AS(t.Embed(5), IndexError);
  // Reserved rows are seeded.
  CHECK(LoadEmbeddings(dir / "e.txt", v, 5).matrix() == t.matrix());
  for (TokenId r = 0; r < kNumReserved; ++r) {
    const Tensor row = t.Embed(r);
    for (double x : row.values()) CHECK(std::abs(x) <= 0.1);
  }
}

TEST_CASE("embedding file errors") {
  const auto dir = ScratchDir("embedding_errors");
  WriteFile(dir / "e.txt", "cat 0.1 0.2\ndog 0.3 0.4\n");
  try {
    LoadEmbeddings(dir / "e.txt", MakeVocab({"cat", "zebra"}));
    FAIL("expected MissingEmbeddingError");
  } catch (const MissingEmbeddingError& e) {
    CHECK(e.token() == "zebra");
  }
  WriteFile(dir / "ragged.txt", "cat 0.1 0.2\ndog 0.3\n");
  try {
    LoadEmbeddings(dir / "ragged.txt", MakeVocab({"cat", "dog"}));
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  const EmbeddingTable reserved_only = LoadEmbeddings(dir / "e.txt", Vocabulary(), 3);
  CHECK(reserved_only.matrix().shape() == Shape{3, 2});
}

TEST_CASE("embedding save and load round trip") {
  const auto dir = ScratchDir("embedding_roundtrip");
  const Vocabulary v = MakeVocab({"a", "b", "c"});
  const EmbeddingTable t = EmbeddingTable::Random(v.size(), 4, 9);
  SaveEmbeddings(dir / "e.txt", t, v);
  const EmbeddingTable back = LoadEmbeddings(dir / "e.txt", v, 1);
  for (TokenId id = kNumReserved; id < v.size(); ++id) CHECK(back.Embed(id) == t.Embed(id));
}

TEST_CASE("projection onto the vocabulary") {
  const EmbeddingTable t(Tensor::Matrix({{0, 0}, {0, 0}, {0, 0}, {0.1, 0.2}, {0.3, 0.4}}));
  const Tensor logits = t.ProjectToVocab(Tensor::Vector({1, 1}));
  CHECK(logits[3] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(logits[4] == doctest::Approx(0.7).epsilon(1e-15));
  const Tensor zero = t.ProjectToVocab(Tensor::Vector({0, 0}));
  const Tensor uniform = SoftmaxValues(zero);
  for (double p : uniform.values()) CHECK(p == doctest::Approx(0.2));
  CHECK_THROWS_AS(t.ProjectToVocab(Tensor::Vector({1, 1, 1})), DimensionError);

  // Orthonormal rows: h = row v gives argmax v.
  Tensor eye({4, 4});
  for (std::size_t i = 0; i < 4; ++i) eye.at(i, i) = 1.0;
  const EmbeddingTable ortho(eye);
  for (TokenId v = 0; v < 4; ++v) {
    const Tensor l = ortho.ProjectToVocab(ortho.Embed(v));
    for (TokenId u = 0; u < 4; ++u) {
      if (u != v) CHECK(l[v] > l[u]);
    }
  }
}

TEST_CASE("graph lookup and projection share one parameter") {
  EmbeddingTable t = EmbeddingTable::Random(5, 3, 1);
  EmbeddingTable alias = t;
  CHECK(alias.parameter().get() == t.parameter().get());
  t.set_frozen(false);
  CHECK_FALSE(alias.frozen());
  Graph g;
  const Var e = t.Embed(g, 3);
  const Var logits = t.ProjectToVocab(g, e);
  CHECK(g.Param(t.parameter()).id() == g.inputs(e.id()).at(0));
  CHECK(logits.value() == t.ProjectToVocab(t.Embed(3)));
}

TEST_CASE("nearest neighbors") {
  const Vocabulary v = MakeVocab({"a", "b", "c", "d"});
  // Rows: 3 reserved then a, b, c, d.
  const EmbeddingTable t(Tensor::Matrix({{1, 0, 0},
                                         {0, 1, 0},
                                         {0, 0, 1},
                                         {1, 1, 0},
                                         {1, 1, 0},
                                         {1, 0.5, 0},
                                         {-1, -1, 0}}));
  const auto nn = t.NearestNeighbors(v, "a", 3);
  REQUIRE(nn.size() == 3);
  CHECK(nn[0].first == "b");
  CHECK(nn[0].second == doctest::Approx(1.0));
  CHECK(nn[1].first == "c");
  CHECK(nn[1].second == doctest::Approx(1.5 / (std::sqrt(2.0) * std::sqrt(1.25))));
  // <s> and </s> tie at 1/sqrt(2); the lower id wins.
  CHECK(nn[2].first == "<s>");
  CHECK_THROWS_AS(t.NearestNeighbors(v, "zzz", 1), LookupError);

  // Brute-force cosine ordering on a random table.
  const EmbeddingTable r = EmbeddingTable::Random(v.size(), 5, 42);
  const auto ranked = r.NearestNeighbors(v, "c", v.size() - 1);
  for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].second >= ranked[i].second);
  const TokenId q = v.id("c");
  for (const auto& [tok, sim] : ranked) {
    const TokenId u = v.id(tok);
    double dot = 0, nq = 0, nu = 0;
    for (std::size_t j = 0; j < 5; ++j) {
      dot += r.matrix().at(q, j) * r.matrix().at(u, j);
      nq += r.matrix().at(q, j) * r.matrix().at(q, j);
      nu += r.matrix().at(u, j) * r.matrix().at(u, j);
    }
    CHECK(sim == doctest::Approx(dot / std::sqrt(nq * nu)).epsilon(1e-12));
  }
}

TEST_CASE("orthogonal neighbors tie at zero by ascending id") {
  const Vocabulary v = MakeVocab({"a"});
  Tensor eye({4, 4});
  for (std::size_t i = 0; i < 4; ++i) eye.at(i, i) = 1.0;
  const auto nn = EmbeddingTable(eye).NearestNeighbors(v, "a", 3);
  CHECK(nn[0].first == "<s>");
  CHECK(nn[1].first == "</s>");
  CHECK(nn[2].first == "<unk>");
  for (const auto& e : nn) CHECK(e.second == 0.0);
}

TEST_CASE("random streams") {
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) CHECK(UniformUnit(a) == UniformUnit(b));
  Rng c(5);
  const std::string saved = SerializeRng(c);
  const double first = StandardNormal(c);
  Rng d = DeserializeRng(saved);
  CHECK(StandardNormal(d) == first);
  CHECK(DeriveSeed(1, 2) != DeriveSeed(1, 3));
  CHECK(DeriveSeed(1, 2) == DeriveSeed(1, 2));
  CHECK_THROWS_AS(UniformIndex(a, 0), ArgumentError);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 3000; ++i) ++counts[UniformIndex(a, 3)];
  for (int n : counts) CHECK(n > 800);
}

TEST_CASE("text helpers") {
  CHECK(SplitWhitespace("  a\tb  c ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(Split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  CHECK(ToLower("ZeBra") == "zebra");
  CHECK(ParseDouble("-1.5e2", "t") == -150.0);
  CHECK_THROWS_AS(ParseDouble("1.5x", "t"), FormatError);
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) {
    CHECK(ParseDouble(FormatDouble(x), "t") == x);
  }
  CHECK_THROWS_AS(ReadFile("/nonexistent/file"), IoError);
}

}  // namespace
}  // namespace noc
