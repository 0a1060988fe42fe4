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

#include "noc/errors.h"
#include "noc/text.h"

namespace noc {

Vocabulary::Vocabulary() {
  for (std::string_view t : {kBosToken, kEosToken, kUnkToken}) {
    index_.emplace(std::string(t), tokens_.size());
    tokens_.emplace_back(t);
  }
}

Vocabulary::Vocabulary(std::span<const std::string> tokens) : Vocabulary() {
  for (const auto& t : tokens) {
    if (auto found = Find(t)) {
      if (IsControl(*found)) continue;
      throw ArgumentError("duplicate vocabulary token '" + t + "'");
    }
    Add(t);
  }
}

TokenId Vocabulary::Add(std::string_view token) {
  if (token.empty()) throw ArgumentError("empty vocabulary token");
  if (auto found = Find(token)) return *found;
  const TokenId id = tokens_.size();
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size()) {
    throw IndexError("token id " + std::to_string(id) +
                     " out of range for vocabulary of size " +
                     std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

TokenId Vocabulary::id(std::string_view token) const {
  if (auto found = Find(token)) return *found;
  throw LookupError("unknown token '" + std::string(token) + "'");
}

std::optional<TokenId> Vocabulary::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::IdOrUnk(std::string_view token) const {
  return Find(token).value_or(kUnk);
}

std::vector<TokenId> Vocabulary::Encode(std::span<const std::string> words) const {
  std::vector<TokenId> ids;
  ids.reserve(words.size());
  for (const auto& w : words) ids.push_back(IdOrUnk(w));
  return ids;
}

std::vector<std::string> Vocabulary::Decode(std::span<const TokenId> ids) const {
  std::vector<std::string> words;
  words.reserve(ids.size());
  for (TokenId id : ids) words.push_back(token(id));
  return words;
}

std::uint64_t Vocabulary::Hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const auto& t : tokens_) {
    for (char c : t) mix(static_cast<unsigned char>(c));
    mix('\n');
  }
  return h;
}

void Vocabulary::Save(const std::filesystem::path& path) const {
  std::string out;
  for (const auto& t : tokens_) out += t + "\n";
  WriteFile(path, out);
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  const auto lines = ReadLines(path);
  if (lines.size() < kNumReserved || lines[0] != kBosToken ||
      lines[1] != kEosToken || lines[2] != kUnkToken) {
    throw FormatError(path.string() + ": vocabulary must start with " +
                      std::string(kBosToken) + ", " + std::string(kEosToken) +
                      ", " + std::string(kUnkToken));
  }
  Vocabulary v;
  for (std::size_t i = kNumReserved; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    if (v.Contains(lines[i])) {
      throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                        ": duplicate token '" + lines[i] + "'");
    }
    v.Add(lines[i]);
  }
  return v;
}

}  // namespace noc
