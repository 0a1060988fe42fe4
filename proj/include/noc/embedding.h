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

#ifndef NOC_EMBEDDING_H_
#define NOC_EMBEDDING_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noc/autodiff.h"
#include "noc/vocab.h"

namespace noc {

// V x d word-vector matrix used twice: row lookup on the input side and, as a
// transposed map, for the projection back onto the vocabulary. There is no
// output bias.
//
// The table is a handle: copies alias the same Parameter storage, which is
// what ties the input and output sides together.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(Tensor matrix, bool frozen = true);

  // Rows drawn uniformly from [-scale, scale].
  static EmbeddingTable Random(std::size_t vocab_size, std::size_t dim,
                               std::uint64_t seed, double scale = 0.1);

  std::size_t vocab_size() const { return storage_->value.dim(0); }
  std::size_t dim() const { return storage_->value.dim(1); }
  const Tensor& matrix() const { return storage_->value; }
  const ParameterPtr& parameter() const { return storage_; }

  // Frozen tables are graph constants as far as gradients go.
  bool frozen() const { return !storage_->trainable; }
  void set_frozen(bool frozen) { storage_->trainable = !frozen; }

  Tensor Embed(TokenId id) const;
  Tensor ProjectToVocab(const Tensor& h) const;

  Var Embed(Graph& graph, TokenId id) const;
  // logits[v] = <row v, h>.
  Var ProjectToVocab(Graph& graph, Var h) const;

  // k tokens by descending cosine similarity to `token`, excluding it; ties
  // go to the lower id.
  std::vector<std::pair<std::string, double>> NearestNeighbors(
      const Vocabulary& vocab, std::string_view token, std::size_t k) const;

 private:
  void CheckId(TokenId id) const;

  ParameterPtr storage_;
};

// Reads "token v1 ... vd" records. Tokens outside `vocab` are ignored;
// reserved tokens missing from the file get seeded uniform rows in
// [-0.1, 0.1]. Any other vocabulary token without a record is a
// MissingEmbeddingError.
EmbeddingTable LoadEmbeddings(const std::filesystem::path& path,
                              const Vocabulary& vocab, std::uint64_t seed = 0,
                              bool frozen = true);

// Writes every non-reserved row in vocabulary order.
void SaveEmbeddings(const std::filesystem::path& path,
                    const EmbeddingTable& table, const Vocabulary& vocab);

}  // namespace noc

#endif  // NOC_EMBEDDING_H_
