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

#include "noc/embedding.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_set>

#include "noc/errors.h"
#include "noc/random.h"
#include "noc/text.h"

namespace noc {

EmbeddingTable::EmbeddingTable(Tensor matrix, bool frozen) {
  if (matrix.rank() != 2) {
    throw DimensionError("embedding matrix must be rank 2, got " +
                         ShapeString(matrix.shape()));
  }
  storage_ = MakeParameter("embeddings", std::move(matrix), !frozen);
}

EmbeddingTable EmbeddingTable::Random(std::size_t vocab_size, std::size_t dim,
                                      std::uint64_t seed, double scale) {
  Rng rng(seed);
  Tensor m({vocab_size, dim});
  for (double& v : m.values()) v = Uniform(rng, -scale, scale);
  return EmbeddingTable(std::move(m));
}

void EmbeddingTable::CheckId(TokenId id) const {
  if (id >= vocab_size()) {
    throw IndexError("embedding id " + std::to_string(id) +
                     " out of range for " + std::to_string(vocab_size()) +
                     " rows");
  }
}

Tensor EmbeddingTable::Embed(TokenId id) const {
  CheckId(id);
  const double* row = matrix().raw() + id * dim();
  return Tensor::Vector(std::vector<double>(row, row + dim()));
}

Tensor EmbeddingTable::ProjectToVocab(const Tensor& h) const {
  if (h.rank() != 1 || h.size() != dim()) {
    throw DimensionError("project_to_vocab: expected [" + std::to_string(dim()) +
                         "], got " + ShapeString(h.shape()));
  }
  Tensor logits({vocab_size()});
  for (std::size_t v = 0; v < vocab_size(); ++v) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) s += matrix().at(v, j) * h[j];
    logits[v] = s;
  }
  return logits;
}

Var EmbeddingTable::Embed(Graph& graph, TokenId id) const {
  CheckId(id);
  return Row(graph.Param(storage_), id);
}

Var EmbeddingTable::ProjectToVocab(Graph& graph, Var h) const {
  return MatVec(graph.Param(storage_), h);
}

std::vector<std::pair<std::string, double>> EmbeddingTable::NearestNeighbors(
    const Vocabulary& vocab, std::string_view token, std::size_t k) const {
  const TokenId query = vocab.id(token);
  CheckId(query);
  if (k >= vocab_size()) {
    throw ArgumentError("nearest_neighbors: k must be below the vocabulary size");
  }
  auto norm = [&](TokenId v) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) s += matrix().at(v, j) * matrix().at(v, j);
    return std::sqrt(s);
  };
  const double qn = norm(query);
  std::vector<std::pair<double, TokenId>> scored;
  for (TokenId v = 0; v < vocab_size(); ++v) {
    if (v == query) continue;
    double dot = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) dot += matrix().at(v, j) * matrix().at(query, j);
    const double denom = qn * norm(v);
    scored.emplace_back(denom > 0.0 ? dot / denom : 0.0, v);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.emplace_back(vocab.token(scored[i].second), scored[i].first);
  }
  return out;
}

EmbeddingTable LoadEmbeddings(const std::filesystem::path& path,
                              const Vocabulary& vocab, std::uint64_t seed,
                              bool frozen) {
  const auto lines = ReadLines(path);
  std::optional<std::size_t> dim;
  std::vector<std::optional<std::vector<double>>> rows(vocab.size());
  std::unordered_set<std::string> seen;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(ln + 1);
    const auto space = lines[ln].find(' ');
    if (space == std::string::npos || space == 0) {
      throw FormatError(where + ": expected 'token v1 ... vd'");
    }
    std::string token = lines[ln].substr(0, space);
    auto values = ParseDoubles(std::string_view(lines[ln]).substr(space + 1), where);
    if (values.empty()) throw FormatError(where + ": no vector values");
    if (!dim) dim = values.size();
    if (values.size() != *dim) {
      throw FormatError(where + ": expected " + std::to_string(*dim) +
                        " values, got " + std::to_string(values.size()));
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw FormatError(where + ": non-finite value");
    }
    if (!seen.insert(token).second) {
      throw FormatError(where + ": duplicate token '" + token + "'");
    }
    if (auto id = vocab.Find(token)) rows[*id] = std::move(values);
  }
  if (!dim) throw FormatError(path.string() + ": no embedding records");

  Rng rng(seed);
  Tensor matrix({vocab.size(), *dim});
  for (TokenId id = 0; id < vocab.size(); ++id) {
    if (!rows[id]) {
      if (!Vocabulary::IsControl(id)) throw MissingEmbeddingError(vocab.token(id));
      rows[id] = std::vector<double>(*dim);
      for (double& v : *rows[id]) v = Uniform(rng, -0.1, 0.1);
    }
    std::copy(rows[id]->begin(), rows[id]->end(), matrix.raw() + id * *dim);
  }
  return EmbeddingTable(std::move(matrix), frozen);
}

void SaveEmbeddings(const std::filesystem::path& path,
                    const EmbeddingTable& table, const Vocabulary& vocab) {
  if (table.vocab_size() != vocab.size()) {
    throw DimensionError("embedding rows do not match vocabulary size");
  }
  std::string out;
  for (TokenId id = kNumReserved; id < vocab.size(); ++id) {
    out += vocab.token(id);
    for (std::size_t j = 0; j < table.dim(); ++j) {
      out += ' ';
      out += FormatDouble(table.matrix().at(id, j));
    }
    out += '\n';
  }
  WriteFile(path, out);
}

}  // namespace noc
