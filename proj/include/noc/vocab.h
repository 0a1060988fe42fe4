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

#ifndef NOC_VOCAB_H_
#define NOC_VOCAB_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace noc {

using TokenId = std::size_t;

inline constexpr TokenId kBos = 0;
inline constexpr TokenId kEos = 1;
inline constexpr TokenId kUnk = 2;
inline constexpr std::size_t kNumReserved = 3;

inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kUnkToken = "<unk>";

// Bijective token <-> id map. Ids 0, 1, 2 are always BOS, EOS and UNK.
class Vocabulary {
 public:
  Vocabulary();
  // Appends `tokens` after the reserved entries. Reserved spellings in the
  // input are skipped; any other duplicate is an ArgumentError.
  explicit Vocabulary(std::span<const std::string> tokens);

  // Returns the id of `token`, appending it when new.
  TokenId Add(std::string_view token);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  const std::string& token(TokenId id) const;
  TokenId id(std::string_view token) const;  // LookupError when absent
  std::optional<TokenId> Find(std::string_view token) const;
  bool Contains(std::string_view token) const { return Find(token).has_value(); }
  TokenId IdOrUnk(std::string_view token) const;

  std::vector<TokenId> Encode(std::span<const std::string> words) const;
  std::vector<std::string> Decode(std::span<const TokenId> ids) const;

  static bool IsControl(TokenId id) { return id < kNumReserved; }

  // FNV-1a over the ordered token list.
  std::uint64_t Hash() const;

  // One token per line, reserved tokens included.
  void Save(const std::filesystem::path& path) const;
  static Vocabulary Load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace noc

#endif  // NOC_VOCAB_H_
