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

#ifndef NOC_DECODING_H_
#define NOC_DECODING_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noc/caption_model.h"

namespace noc {

enum class DecodeMethod { kGreedy, kBeam, kSampleRank };

const char* DecodeMethodName(DecodeMethod method);

struct DecodeResult {
  // EOS-terminated, or max_len tokens without EOS when truncated.
  std::vector<TokenId> tokens;
  // Sum of log P(token) under the fused (unmasked) distribution.
  double log_prob = 0.0;
  DecodeMethod method = DecodeMethod::kGreedy;

  // tokens without the trailing EOS.
  std::vector<TokenId> words() const;
};

struct BeamOptions {
  std::size_t width = 1;
  std::size_t max_len = 20;
  // Rank hypotheses by log_prob / length instead of log_prob.
  bool length_normalize = false;
};

// Which sample sample-and-rank keeps.
enum class SampleSelection { kHighestLogProb, kLowestLogProb };

// BOS and UNK are never emitted. max_len bounds the emitted tokens including
// the EOS.
DecodeResult GreedyDecode(const NocModel& model, const Tensor& features,
                          std::size_t max_len);
DecodeResult BeamDecode(const NocModel& model, const Tensor& features,
                        const BeamOptions& options);
DecodeResult SampleRankDecode(
    const NocModel& model, const Tensor& features, std::size_t num_samples,
    std::size_t max_len, std::uint64_t seed,
    SampleSelection selection = SampleSelection::kHighestLogProb);

// Every ancestral sample drawn by SampleRankDecode, in draw order.
std::vector<DecodeResult> DrawSamples(const NocModel& model,
                                      const Tensor& features,
                                      std::size_t num_samples,
                                      std::size_t max_len, std::uint64_t seed);

// Re-scores `tokens` by a teacher-forced pass: sum of log P(token).
double ScoreTokens(const NocModel& model, const Tensor& features,
                   std::span<const TokenId> tokens);

}  // namespace noc

#endif  // NOC_DECODING_H_
