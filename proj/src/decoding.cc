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

#include <algorithm>
#include <cmath>
#include <limits>

#include "noc/errors.h"
#include "noc/random.h"

namespace noc {

const char* DecodeMethodName(DecodeMethod method) {
  switch (method) {
    case DecodeMethod::kGreedy: return "greedy";
    case DecodeMethod::kBeam: return "beam";
    case DecodeMethod::kSampleRank: return "sample-rank";
  }
  return "unknown";
}

std::vector<TokenId> DecodeResult::words() const {
  std::vector<TokenId> out = tokens;
  if (!out.empty() && out.back() == kEos) out.pop_back();
  return out;
}

namespace {

bool Emittable(TokenId id) { return id != kBos && id != kUnk; }

// Incremental fused decoder over one graph. States are graph handles, so
// hypotheses can branch without copying.
class Decoder {
 public:
  Decoder(const NocModel& model, const Tensor& features)
      : model_(model),
        image_(model.vision().Activations(graph_, features)),
        initial_(model.lm().InitialState(graph_)) {}

  const LmState& initial() const { return initial_; }

  // Log-probabilities of the next token after consuming `prev`.
  std::pair<LmState, Tensor> Next(const LmState& state, TokenId prev) {
    auto [next, logits] = model_.FusedLogits(graph_, state, prev, image_);
    return {next, LogSoftmaxValues(logits.value())};
  }

 private:
  const NocModel& model_;
  Graph graph_;
  Var image_;
  LmState initial_;
};

struct Hypothesis {
  std::vector<TokenId> tokens;
  double log_prob = 0.0;
  LmState state;
};

double RankScore(const Hypothesis& h, bool length_normalize) {
  if (!length_normalize || h.tokens.empty()) return h.log_prob;
  return h.log_prob / static_cast<double>(h.tokens.size());
}

// Higher score first; equal scores fall back to lexicographic token order.
bool Better(const Hypothesis& a, const Hypothesis& b, bool length_normalize) {
  const double sa = RankScore(a, length_normalize);
  const double sb = RankScore(b, length_normalize);
  if (sa != sb) return sa > sb;
  return a.tokens < b.tokens;
}

}  // namespace

DecodeResult GreedyDecode(const NocModel& model, const Tensor& features,
                          std::size_t max_len) {
  if (max_len == 0) throw ArgumentError("greedy_decode: max_len must be >= 1");
  Decoder decoder(model, features);
  DecodeResult result;
  result.method = DecodeMethod::kGreedy;
  LmState state = decoder.initial();
  TokenId prev = kBos;
  while (result.tokens.size() < max_len) {
    auto [next, logp] = decoder.Next(state, prev);
    TokenId best = kEos;
    double best_lp = -std::numeric_limits<double>::infinity();
    for (TokenId id = 0; id < logp.size(); ++id) {
      if (!Emittable(id)) continue;
      if (logp[id] > best_lp) {
        best_lp = logp[id];
        best = id;
      }
    }
    result.tokens.push_back(best);
    result.log_prob += best_lp;
    if (best == kEos) break;
    state = next;
    prev = best;
  }
  return result;
}

DecodeResult BeamDecode(const NocModel& model, const Tensor& features,
                        const BeamOptions& options) {
  if (options.width == 0) throw ArgumentError("beam_decode: width must be >= 1");
  if (options.max_len == 0) throw ArgumentError("beam_decode: max_len must be >= 1");
  const bool norm = options.length_normalize;
  Decoder decoder(model, features);
  std::vector<Hypothesis> live = {Hypothesis{{}, 0.0, decoder.initial()}};
  std::vector<Hypothesis> finished;

  for (std::size_t len = 0; len < options.max_len && !live.empty(); ++len) {
    std::vector<Hypothesis> candidates;
    for (const auto& h : live) {
      const TokenId prev = h.tokens.empty() ? kBos : h.tokens.back();
      auto [next, logp] = decoder.Next(h.state, prev);
      for (TokenId id = 0; id < logp.size(); ++id) {
        if (!Emittable(id)) continue;
        Hypothesis c{h.tokens, h.log_prob + logp[id], next};
        c.tokens.push_back(id);
        candidates.push_back(std::move(c));
      }
    }
    const std::size_t keep = std::min(options.width, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + keep,
                      candidates.end(), [norm](const auto& a, const auto& b) {
                        return Better(a, b, norm);
                      });
    live.clear();
    for (std::size_t i = 0; i < keep; ++i) {
      if (candidates[i].tokens.back() == kEos) {
        finished.push_back(std::move(candidates[i]));
      } else {
        live.push_back(std::move(candidates[i]));
      }
    }
  }
  for (auto& h : live) finished.push_back(std::move(h));  // truncated at max_len

  const auto best = std::min_element(
      finished.begin(), finished.end(),
      [norm](const auto& a, const auto& b) { return Better(a, b, norm); });
  return DecodeResult{best->tokens, best->log_prob, DecodeMethod::kBeam};
}

std::vector<DecodeResult> DrawSamples(const NocModel& model,
                                      const Tensor& features,
                                      std::size_t num_samples,
                                      std::size_t max_len, std::uint64_t seed) {
  if (num_samples == 0) throw ArgumentError("sample_rank_decode: n must be >= 1");
  if (max_len == 0) throw ArgumentError("sample_rank_decode: max_len must be >= 1");
  Decoder decoder(model, features);
  Rng rng(seed);
  std::vector<DecodeResult> samples;
  for (std::size_t n = 0; n < num_samples; ++n) {
    DecodeResult r;
    r.method = DecodeMethod::kSampleRank;
    LmState state = decoder.initial();
    TokenId prev = kBos;
    while (r.tokens.size() < max_len) {
      auto [next, logp] = decoder.Next(state, prev);
      // Temperature 1 over the emittable tokens, renormalized.
      double mass = 0.0;
      for (TokenId id = 0; id < logp.size(); ++id) {
        if (Emittable(id)) mass += std::exp(logp[id]);
      }
      double u = UniformUnit(rng) * mass;
      // Rounding leftovers fall to the last emittable id.
      TokenId pick = kEos;
      for (TokenId id = 0; id < logp.size(); ++id) {
        if (!Emittable(id)) continue;
        pick = id;
        u -= std::exp(logp[id]);
        if (u < 0.0) break;
      }
      r.tokens.push_back(pick);
      r.log_prob += logp[pick];
      if (pick == kEos) break;
      state = next;
      prev = pick;
    }
    samples.push_back(std::move(r));
  }
  return samples;
}

DecodeResult SampleRankDecode(const NocModel& model, const Tensor& features,
                              std::size_t num_samples, std::size_t max_len,
                              std::uint64_t seed, SampleSelection selection) {
  auto samples = DrawSamples(model, features, num_samples, max_len, seed);
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const bool better = selection == SampleSelection::kHighestLogProb
                            ? samples[i].log_prob > samples[best].log_prob
                            : samples[i].log_prob < samples[best].log_prob;
    if (better) best = i;
  }
  return samples[best];
}

double ScoreTokens(const NocModel& model, const Tensor& features,
                   std::span<const TokenId> tokens) {
  Graph graph;
  Var image = model.vision().Activations(graph, features);
  LmState state = model.lm().InitialState(graph);
  double total = 0.0;
  TokenId prev = kBos;
  for (TokenId id : tokens) {
    auto [next, logits] = model.FusedLogits(graph, state, prev, image);
    total -= NegLogSoftmax(logits, id).value().item();
    state = next;
    prev = id;
  }
  return total;
}

}  // namespace noc
