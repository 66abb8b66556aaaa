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

#ifndef BITAUDIT_CHANNEL_H_
#define BITAUDIT_CHANNEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bitaudit/tradeoff.h"

namespace bitaudit {

// Input bits of one audit, one canary membership decision per coordinate.
struct BitVector {
  std::vector<uint8_t> bits;
  double prior_p = 0.5;

  int64_t size() const { return static_cast<int64_t>(bits.size()); }
};

enum class MechanismKind {
  kGaussianSum,
  kLaplaceSum,
  kRandomizedResponse,
  kFlawedGaussian,
};

std::string MechanismKindName(MechanismKind kind);
MechanismKind MechanismKindFromName(const std::string& name);

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kGaussianSum;
  // mu for GaussianSum / FlawedGaussian (claimed), mu_l for LaplaceSum,
  // epsilon for RandomizedResponse.
  double privacy_param = 1.0;
  // RandomizedResponse only.
  double delta = 0.0;
  // Message dimension d; 0 means "track n" (resolved by RunAudit).
  int64_t dimension = 0;
  // FlawedGaussian only: the noise scale actually injected, at most the
  // claimed 1/mu.
  std::optional<double> noise_scale_override;
  // Replacement adjacency: the canary value an absent bit contributes.
  // 0 (the default) is the addition/removal null object; must differ
  // from 1 and is only honored by the memoryless and multi-run sum
  // arrangements.
  double zero_canary_value = 0.0;

  // The trade-off curve the mechanism claims to satisfy.
  TradeoffCurve ClaimedCurve() const;
  void Validate() const;

  nlohmann::json ToJson() const;
  static MechanismSpec FromJson(const nlohmann::json& j);
};

enum class Arrangement { kOneRunMemoryless, kMultiRun, kOneRunInterfering };

std::string ArrangementName(Arrangement arrangement);
Arrangement ArrangementFromName(const std::string& name);

// Channel output plus the metadata a decoder needs.
struct Message {
  std::vector<double> reals;     // Gaussian / Laplace coordinates
  std::vector<uint8_t> symbols;  // randomized-response symbols in {0,1,2,3}
  int64_t n = 0;
  int64_t dimension = 0;
  double prior_p = 0.5;
};

struct AuditTranscript {
  BitVector truth;
  std::vector<uint8_t> guesses;
  Arrangement arrangement = Arrangement::kOneRunMemoryless;
  MechanismSpec mechanism;
  uint64_t seed = 0;

  int64_t size() const { return truth.size(); }
  int64_t ErrorCount() const;
  double MeanError() const;

  nlohmann::json ToJson() const;
  static AuditTranscript FromJson(const nlohmann::json& j);
};

// n independent Bernoulli(p) bits; per-index streams keyed by (seed, i), so
// bit i does not depend on n.
BitVector GenerateBits(int64_t n, double p, uint64_t seed);

// One run of the summation mechanism with N(0, (1/mu)^2) noise per
// coordinate; canary i is the i-th one-hot vector, absence the zero vector.
// Requires d >= n for the memoryless arrangement.
Message RunOneRunGaussian(const BitVector& bits, const MechanismSpec& spec,
                          uint64_t seed);

// Same arrangement with Laplace(0, 1/mu_l) noise.
Message RunOneRunLaplace(const BitVector& bits, const MechanismSpec& spec,
                         uint64_t seed);

// Per-bit randomized response over symbols {0,1,2,3}: the bit value with
// probability (1-delta)e^eps / (1+e^eps), the flipped bit with probability
// (1-delta) / (1+e^eps), the identifying symbol 2 (for 0) or 3 (for 1) with
// probability delta.
Message RunRandomizedResponse(const BitVector& bits, double eps, double delta,
                              uint64_t seed);

// The Gaussian pipeline with the under-scaled noise actually injected;
// the transcript still claims the spec's mu-GDP curve.
Message RunFlawedGaussian(const BitVector& bits, const MechanismSpec& spec,
                          uint64_t seed);

// n independent mechanism executions, the i-th consuming only canary i.
Message RunMultiRun(const BitVector& bits, const MechanismSpec& spec,
                    uint64_t seed);

// One run with d < n: canary i lands on coordinate i mod d, so each
// coordinate mixes several bits and the per-bit channels interfere.
Message RunInterferingGaussian(const BitVector& bits, int64_t d,
                               const MechanismSpec& spec, uint64_t seed);

// Threshold decoder at 0.5 for Gaussian/Laplace coordinates (ties to 0),
// maximum-posterior symbol decoder for randomized response, and the
// offset-corrected threshold 0.5 + (ceil(n/d) - 1) * p for the interfering
// arrangement.
std::vector<uint8_t> Decode(const Message& message, Arrangement arrangement,
                            const MechanismSpec& spec);

// Generate bits, run the channel in the requested arrangement, decode, and
// package the transcript. For kOneRunInterfering the spec dimension must be
// smaller than n.
AuditTranscript RunAudit(const MechanismSpec& spec, Arrangement arrangement,
                         int64_t n, double prior_p, uint64_t seed);

}  // namespace bitaudit

#endif  // BITAUDIT_CHANNEL_H_
