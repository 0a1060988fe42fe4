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

#ifndef NOC_RANDOM_H_
#define NOC_RANDOM_H_

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace noc {

// All randomness flows through mt19937_64 with hand-written transforms, so
// streams are identical across standard-library implementations.
using Rng = std::mt19937_64;

// Uniform in [0, 1) with 53 random bits.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double Uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * UniformUnit(rng);
}

// Uniform integer in [0, n); n > 0.
std::uint64_t UniformIndex(Rng& rng, std::uint64_t n);

// Standard normal via Box-Muller (one draw per call, no caching).
double StandardNormal(Rng& rng);

template <typename T>
void Shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[UniformIndex(rng, i)]);
  }
}

// Derives an independent stream seed from a base seed and a salt.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t salt);

std::string SerializeRng(const Rng& rng);
Rng DeserializeRng(const std::string& state);

}  // namespace noc

#endif  // NOC_RANDOM_H_
