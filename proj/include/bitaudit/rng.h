// Copyright 2025 The bitaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BITAUDIT_RNG_H_
#define BITAUDIT_RNG_H_

#include <cmath>
#include <cstdint>

#include "bitaudit/normal.h"

namespace bitaudit {

// SplitMix64 finalizer (Vigna). All seed derivation goes through this mix so
// streams are reproducible bit-for-bit across platforms.
inline uint64_t Mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline uint64_t MixCombine(uint64_t a, uint64_t b) { return Mix64(a ^ Mix64(b)); }

// Purpose tags keep the independent stream families apart: a stream is
// keyed by (seed, purpose, index) and two distinct keys never collide.
enum class StreamPurpose : uint64_t {
  kBits = 1,          // input bit sampling, one stream per bit index
  kOneRunNoise = 2,   // one-run mechanism noise, one stream per coordinate
  kMultiRunNoise = 3, // multi-run mechanism noise, one stream per run index
  kRandResponse = 4,  // randomized-response flips, one stream per bit index
};

// A deterministic SplitMix64 stream. Splittable: derive per-index streams
// with StreamFor and they are mutually independent for distinct keys.
class RandomStream {
 public:
  explicit RandomStream(uint64_t state) : state_(state) {}

  uint64_t NextU64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1): ((u >> 11) + 0.5) / 2^53.
  double NextUniform() {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal by inverse-c.d.f. sampling.
  double NextNormal() { return StandardNormalQuantile(NextUniform()); }

  // Laplace(0, scale) by inverse-c.d.f. sampling.
  double NextLaplace(double scale) {
    const double u = NextUniform();
    return (u < 0.5) ? scale * std::log(2.0 * u)
                     : -scale * std::log(2.0 * (1.0 - u));
  }

  bool NextBernoulli(double p) { return NextUniform() < p; }

 private:
  uint64_t state_;
};

inline RandomStream StreamFor(uint64_t seed, StreamPurpose purpose,
                              uint64_t index) {
  return RandomStream(
      MixCombine(MixCombine(seed, static_cast<uint64_t>(purpose)), index));
}

}  // namespace bitaudit

#endif  // BITAUDIT_RNG_H_
