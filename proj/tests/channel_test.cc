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

#include "bitaudit/channel.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bitaudit/limits.h"
#include "bitaudit/normal.h"
#include "bitaudit/rng.h"
#include "bitaudit/tradeoff.h"
#include "oracles.h"

namespace bitaudit {
namespace {

MechanismSpec GaussianSpec(double mu, int64_t d) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kGaussianSum;
  spec.privacy_param = mu;
  spec.dimension = d;
  return spec;
}

MechanismSpec LaplaceSpec(double mu_l, int64_t d) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kLaplaceSum;
  spec.privacy_param = mu_l;
  spec.dimension = d;
  return spec;
}

double MeanErrorOf(const AuditTranscript& t) { return t.MeanError(); }

TEST(GenerateBits, DegeneratePriors) {
  const BitVector zeros = GenerateBits(4, 0.0, 11);
  EXPECT_EQ(zeros.bits, (std::vector<uint8_t>{0, 0, 0, 0}));
  const BitVector ones = GenerateBits(4, 1.0, 11);
  EXPECT_EQ(ones.bits, (std::vector<uint8_t>{1, 1, 1, 1}));
}

TEST(GenerateBits, BalancedPriorConcentrates) {
  const int64_t n = 1000000;
  const BitVector bits = GenerateBits(n, 0.5, 2024);
  double mean = 0.0;
  for (uint8_t b : bits.bits) mean += b;
  mean /= n;
  EXPECT_NEAR(mean, 0.5, 0.002);
}

TEST(GenerateBits, DeterministicAndPrefixStable) {
  const BitVector a = GenerateBits(1000, 0.5, 37);
  const BitVector b = GenerateBits(1000, 0.5, 37);
  EXPECT_EQ(a.bits, b.bits);
  const BitVector c = GenerateBits(500, 0.5, 37);
  EXPECT_TRUE(std::equal(c.bits.begin(), c.bits.end(), a.bits.begin()));
  const BitVector d = GenerateBits(1000, 0.5, 38);
  EXPECT_NE(a.bits, d.bits);
}

TEST(OneRunGaussian, NoiseOnlyErrorRate) {
  // All-zero bits: the "0"-class error rate is the noise tail beyond 0.5,
  // Phi(-mu/2) for sigma = 1/mu.
  const int64_t n = 200000;
  MechanismSpec spec = GaussianSpec(0.8, n);
  BitVector zeros;
  zeros.prior_p = 0.0;
  zeros.bits.assign(n, 0);
  const Message message = RunOneRunGaussian(zeros, spec, 5);
  const auto guesses = Decode(message, Arrangement::kOneRunMemoryless, spec);
  double e_bar = 0.0;
  for (uint8_t g : guesses) e_bar += g;
  e_bar /= n;
  const double expected = StandardNormalCdf(-0.4);
  EXPECT_NEAR(e_bar, expected, 3.0 * std::sqrt(expected * (1 - expected) / n));
}

TEST(OneRunGaussian, NoiselessLimitRecoversAllBits) {
  const AuditTranscript t = RunAudit(GaussianSpec(50.0, 0),
                                     Arrangement::kOneRunMemoryless, 10000,
                                     0.5, 99);
  EXPECT_EQ(t.ErrorCount(), 0);
}

TEST(OneRunGaussian, MatchesClosedFormErrorAtScale) {
  const int64_t n = 1000000;
  const AuditTranscript t = RunAudit(GaussianSpec(0.8, 0),
                                     Arrangement::kOneRunMemoryless, n, 0.5, 1);
  const double e_bar = MeanErrorOf(t);
  const double p_e = StandardNormalCdf(-0.4);
  EXPECT_NEAR(e_bar, p_e, 3.0 * std::sqrt(p_e * (1 - p_e) / n));
}

TEST(OneRunGaussian, RejectsInterferingDimension) {
  BitVector bits = GenerateBits(100, 0.5, 3);
  EXPECT_THROW(RunOneRunGaussian(bits, GaussianSpec(0.8, 50), 3),
               std::invalid_argument);
}

TEST(OneRunLaplace, PreconditionsAndLimits) {
  BitVector bits = GenerateBits(100, 0.5, 4);
  EXPECT_THROW(RunOneRunLaplace(bits, LaplaceSpec(0.0, 100), 4),
               std::invalid_argument);
  const AuditTranscript t = RunAudit(LaplaceSpec(50.0, 0),
                                     Arrangement::kOneRunMemoryless, 10000,
                                     0.5, 12);
  EXPECT_EQ(t.ErrorCount(), 0);
}

TEST(OneRunLaplace, MidpointErrorMatchesNumericOracle) {
  const int64_t n = 1000000;
  const double mu_l = 0.8;
  const AuditTranscript t = RunAudit(LaplaceSpec(mu_l, 0),
                                     Arrangement::kOneRunMemoryless, n, 0.5, 2);
  // Oracle: integrate the Laplace(0, 1/mu_l) density beyond the threshold.
  const double scale = 1.0 / mu_l;
  const double p_e = oracles::Integrate(
      [scale](double x) { return 0.5 / scale * std::exp(-std::abs(x) / scale); },
      0.5, 60.0, 400000);
  EXPECT_NEAR(p_e, 0.5 * std::exp(-0.4), 1e-9);
  EXPECT_NEAR(MeanErrorOf(t), p_e, 3.0 * std::sqrt(p_e * (1 - p_e) / n));
}

TEST(RandomizedResponse, DegenerateDeltaIdentifiesBits) {
  BitVector bits = GenerateBits(1000, 0.5, 8);
  const Message message = RunRandomizedResponse(bits, 1.0, 1.0, 8);
  for (int64_t i = 0; i < bits.size(); ++i) {
    EXPECT_EQ(message.symbols[i], 2 + bits.bits[i]);
  }
  MechanismSpec spec;
  spec.kind = MechanismKind::kRandomizedResponse;
  spec.privacy_param = 1.0;
  spec.delta = 1.0;
  const auto guesses = Decode(message, Arrangement::kOneRunMemoryless, spec);
  EXPECT_EQ(guesses, bits.bits);
}

TEST(RandomizedResponse, VanishingEpsIsRandomGuessing) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kRandomizedResponse;
  spec.privacy_param = 1e-9;
  spec.delta = 0.0;
  const int64_t n = 100000;
  const AuditTranscript t =
      RunAudit(spec, Arrangement::kOneRunMemoryless, n, 0.5, 6);
  EXPECT_NEAR(MeanErrorOf(t), 0.5, 3.0 * std::sqrt(0.25 / n));
}

TEST(RandomizedResponse, MapDecoderErrorRate) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kRandomizedResponse;
  spec.privacy_param = 1.0;
  spec.delta = 1e-5;
  const int64_t n = 100000;
  const AuditTranscript t =
      RunAudit(spec, Arrangement::kOneRunMemoryless, n, 0.5, 7);
  // Exact channel flip probability (1 - delta) / (1 + e).
  const double p_e = (1.0 - 1e-5) / (1.0 + std::exp(1.0));
  EXPECT_NEAR(MeanErrorOf(t), p_e, 3.0 * std::sqrt(p_e * (1 - p_e) / n));
}

TEST(RandomizedResponse, SymbolDecoding) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kRandomizedResponse;
  spec.privacy_param = 1.0;
  spec.delta = 0.5;
  Message message;
  message.n = 4;
  message.dimension = 4;
  message.symbols = {0, 1, 2, 3};
  const auto guesses = Decode(message, Arrangement::kOneRunMemoryless, spec);
  EXPECT_EQ(guesses, (std::vector<uint8_t>{0, 1, 0, 1}));
}

TEST(FlawedGaussian, HonestOverrideMatchesHonestMechanismExactly) {
  const int64_t n = 10000;
  MechanismSpec honest = GaussianSpec(0.8, n);
  MechanismSpec flawed = honest;
  flawed.kind = MechanismKind::kFlawedGaussian;
  flawed.noise_scale_override = 1.0 / 0.8;
  const BitVector bits = GenerateBits(n, 0.5, 21);
  const Message a = RunOneRunGaussian(bits, honest, 21);
  const Message b = RunFlawedGaussian(bits, flawed, 21);
  EXPECT_EQ(a.reals, b.reals);
  EXPECT_EQ(flawed.ClaimedCurve().family(), CurveFamily::kGaussian);
  EXPECT_DOUBLE_EQ(flawed.ClaimedCurve().param(), 0.8);
}

TEST(FlawedGaussian, ZeroNoiseRecoversEverything) {
  MechanismSpec flawed = GaussianSpec(0.8, 0);
  flawed.kind = MechanismKind::kFlawedGaussian;
  flawed.noise_scale_override = 0.0;
  const AuditTranscript t =
      RunAudit(flawed, Arrangement::kOneRunMemoryless, 10000, 0.5, 22);
  EXPECT_EQ(t.ErrorCount(), 0);
}

TEST(FlawedGaussian, RejectsOverScaledOverride) {
  MechanismSpec flawed = GaussianSpec(0.8, 100);
  flawed.kind = MechanismKind::kFlawedGaussian;
  flawed.noise_scale_override = 2.0;  // claimed scale is 1.25
  EXPECT_THROW(flawed.Validate(), std::invalid_argument);
}

TEST(MultiRun, GaussianMatchesMemorylessLaw) {
  const int64_t n = 10000;
  const AuditTranscript t =
      RunAudit(GaussianSpec(0.8, 1), Arrangement::kMultiRun, n, 0.5, 23);
  EXPECT_EQ(t.arrangement, Arrangement::kMultiRun);
  const double p_e = StandardNormalCdf(-0.4);
  EXPECT_NEAR(MeanErrorOf(t), p_e, 3.0 * std::sqrt(p_e * (1 - p_e) / n));
}

TEST(MultiRun, RandomizedResponseIndistinguishableFromOneRun) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kRandomizedResponse;
  spec.privacy_param = 1.0;
  spec.delta = 1e-5;
  const int64_t n = 10000;
  const AuditTranscript one =
      RunAudit(spec, Arrangement::kOneRunMemoryless, n, 0.5, 24);
  const AuditTranscript multi =
      RunAudit(spec, Arrangement::kMultiRun, n, 0.5, 25);
  // Two-sample proportion test at the 1% level.
  const double p1 = MeanErrorOf(one), p2 = MeanErrorOf(multi);
  const double pooled = 0.5 * (p1 + p2);
  const double se = std::sqrt(pooled * (1 - pooled) * 2.0 / n);
  EXPECT_LE(std::abs(p1 - p2), 2.5758 * se);
}

TEST(Interfering, FullDimensionReducesToMemoryless) {
  const int64_t n = 5000;
  const MechanismSpec spec = GaussianSpec(0.8, n);
  const BitVector bits = GenerateBits(n, 0.5, 31);
  const Message memoryless = RunOneRunGaussian(bits, spec, 31);
  const Message interfering = RunInterferingGaussian(bits, n, spec, 31);
  EXPECT_EQ(memoryless.reals, interfering.reals);
  EXPECT_EQ(Decode(memoryless, Arrangement::kOneRunMemoryless, spec),
            Decode(interfering, Arrangement::kOneRunInterfering, spec));
}

TEST(Interfering, TenthDimensionDegradesError) {
  const int64_t n = 100000;
  const MechanismSpec spec = GaussianSpec(0.8, n);
  const AuditTranscript memoryless =
      RunAudit(spec, Arrangement::kOneRunMemoryless, n, 0.5, 32);
  MechanismSpec crowded = GaussianSpec(0.8, n / 10);
  const AuditTranscript interfering =
      RunAudit(crowded, Arrangement::kOneRunInterfering, n, 0.5, 32);
  EXPECT_GT(MeanErrorOf(interfering), StandardNormalCdf(-0.4) + 0.01);
  EXPECT_GT(MeanErrorOf(interfering), MeanErrorOf(memoryless));
}

TEST(Interfering, SingleCoordinateIsVacuous) {
  const int64_t n = 1000;
  MechanismSpec spec = GaussianSpec(0.8, 1);
  const AuditTranscript t =
      RunAudit(spec, Arrangement::kOneRunInterfering, n, 0.5, 33);
  EXPECT_NEAR(MeanErrorOf(t), 0.5, 0.06);
}

// The empirical operating points of threshold decoders stay on or above
// the mechanism's trade-off curve, within binomial noise.
TEST(Channel, EmpiricalTradeoffRegionRespectsCurve) {
  const int64_t n = 200000;
  const double mu = 0.8;
  const MechanismSpec spec = GaussianSpec(mu, n);
  const BitVector bits = GenerateBits(n, 0.5, 40);
  const Message message = RunOneRunGaussian(bits, spec, 40);
  const TradeoffCurve curve = TradeoffCurve::Gaussian(mu);
  for (double threshold : {0.3, 0.4, 0.5, 0.6, 0.7}) {
    int64_t n0 = 0, n1 = 0, fp = 0, fn = 0;
    for (int64_t i = 0; i < n; ++i) {
      const bool guess_one = message.reals[i] > threshold;
      if (bits.bits[i] == 0) {
        ++n0;
        fp += guess_one;
      } else {
        ++n1;
        fn += !guess_one;
      }
    }
    const double alpha = static_cast<double>(fp) / n0;
    const double beta = static_cast<double>(fn) / n1;
    const double s_alpha = std::sqrt(alpha * (1 - alpha) / n0);
    const double s_beta = std::sqrt(beta * (1 - beta) / n1);
    const double floor_at =
        curve(std::min(1.0, alpha + 3.0 * s_alpha)) - 3.0 * s_beta;
    EXPECT_GE(beta, floor_at) << "threshold=" << threshold;
  }
}

// Empirical mean error sits above the information-theoretic floor for every
// honest mechanism in the experimental sweep.
TEST(Channel, ErrorFloorHoldsAcrossSweep) {
  const int64_t n = 100000;
  std::vector<MechanismSpec> sweep;
  for (double mu : {0.2, 0.8, 3.2}) sweep.push_back(GaussianSpec(mu, 0));
  for (double mu_l : {0.2, 0.8, 3.2}) sweep.push_back(LaplaceSpec(mu_l, 0));
  for (double eps : {0.25, 1.0, 4.0}) {
    MechanismSpec spec;
    spec.kind = MechanismKind::kRandomizedResponse;
    spec.privacy_param = eps;
    spec.delta = 1e-5;
    sweep.push_back(spec);
  }
  uint64_t seed = 50;
  for (const auto& spec : sweep) {
    const AuditTranscript t =
        RunAudit(spec, Arrangement::kOneRunMemoryless, n, 0.5, seed++);
    const double e_bar = MeanErrorOf(t);
    const double floor = BitErrorFloor(spec.ClaimedCurve());
    EXPECT_GE(e_bar, floor - 3.0 * std::sqrt(e_bar * (1 - e_bar) / n))
        << MechanismKindName(spec.kind) << " " << spec.privacy_param;
  }
}

// Stochastic dominance of real transcript errors over Bernoulli(p_floor)
// surrogates, compared through their empirical survival functions.
TEST(Channel, MeanErrorDominatesFloorSurrogates) {
  const int64_t n = 10000;
  const int kReps = 500;
  const double mu = 0.8;
  const MechanismSpec spec = GaussianSpec(mu, 0);
  const double p_floor = BitErrorFloor(TradeoffCurve::Gaussian(mu));
  std::vector<double> real_means, surrogate_means;
  for (int rep = 0; rep < kReps; ++rep) {
    const AuditTranscript t = RunAudit(spec, Arrangement::kOneRunMemoryless, n,
                                       0.5, MixCombine(700, rep));
    real_means.push_back(MeanErrorOf(t));
    RandomStream stream(MixCombine(701, rep));
    int64_t count = 0;
    for (int64_t i = 0; i < n; ++i) count += stream.NextBernoulli(p_floor);
    surrogate_means.push_back(static_cast<double>(count) / n);
  }
  for (double a = p_floor - 0.01; a <= p_floor + 0.01; a += 0.002) {
    double sf_real = 0.0, sf_surrogate = 0.0;
    for (int rep = 0; rep < kReps; ++rep) {
      sf_real += real_means[rep] >= a;
      sf_surrogate += surrogate_means[rep] >= a;
    }
    sf_real /= kReps;
    sf_surrogate /= kReps;
    const double slack = 3.0 * std::sqrt(
        (sf_real * (1 - sf_real) + sf_surrogate * (1 - sf_surrogate)) / kReps +
        1e-6);
    EXPECT_GE(sf_real, sf_surrogate - slack) << "a=" << a;
  }
}

TEST(ReplacementAdjacency, AbsentBitsContributeTheAlternateCanary) {
  const int64_t n = 2000;
  MechanismSpec spec = GaussianSpec(50.0, n);  // near-noiseless
  spec.zero_canary_value = 0.25;
  const BitVector bits = GenerateBits(n, 0.5, 61);
  const Message message = RunOneRunGaussian(bits, spec, 61);
  for (int64_t i = 0; i < n; ++i) {
    EXPECT_NEAR(message.reals[i], bits.bits[i] ? 1.0 : 0.25, 0.2);
  }
  // The 0.5 threshold still separates the two canaries here.
  const auto guesses = Decode(message, Arrangement::kOneRunMemoryless, spec);
  EXPECT_EQ(guesses, bits.bits);

  MechanismSpec bad = spec;
  bad.zero_canary_value = 1.0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  EXPECT_THROW(RunInterferingGaussian(bits, n / 2, spec, 61),
               std::invalid_argument);
}

TEST(Decode, ExactMidpointTiesBreakToZero) {
  MechanismSpec spec = GaussianSpec(0.8, 4);
  Message message;
  message.n = 4;
  message.dimension = 4;
  message.reals = {0.5, 0.5, 0.5000001, 0.4999999};
  const auto guesses = Decode(message, Arrangement::kOneRunMemoryless, spec);
  EXPECT_EQ(guesses, (std::vector<uint8_t>{0, 0, 1, 0}));
}

TEST(Transcript, DeterministicByteForByte) {
  MechanismSpec spec = GaussianSpec(0.8, 0);
  const AuditTranscript a =
      RunAudit(spec, Arrangement::kOneRunMemoryless, 5000, 0.5, 77);
  const AuditTranscript b =
      RunAudit(spec, Arrangement::kOneRunMemoryless, 5000, 0.5, 77);
  EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
  const AuditTranscript c =
      RunAudit(spec, Arrangement::kOneRunMemoryless, 5000, 0.5, 78);
  EXPECT_NE(a.ToJson().dump(), c.ToJson().dump());
}

TEST(Transcript, JsonRoundTrip) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kRandomizedResponse;
  spec.privacy_param = 1.0;
  spec.delta = 1e-5;
  const AuditTranscript t =
      RunAudit(spec, Arrangement::kMultiRun, 999, 0.5, 123);
  const AuditTranscript restored = AuditTranscript::FromJson(t.ToJson());
  EXPECT_EQ(restored.truth.bits, t.truth.bits);
  EXPECT_EQ(restored.guesses, t.guesses);
  EXPECT_EQ(restored.arrangement, t.arrangement);
  EXPECT_EQ(restored.seed, t.seed);
  EXPECT_EQ(restored.ErrorCount(), t.ErrorCount());
}

TEST(Transcript, RejectsTamperedCounts) {
  MechanismSpec spec = GaussianSpec(0.8, 0);
  const AuditTranscript t =
      RunAudit(spec, Arrangement::kOneRunMemoryless, 100, 0.5, 5);
  nlohmann::json j = t.ToJson();
  j["counts"]["errors"] = t.ErrorCount() + 1;
  EXPECT_THROW(AuditTranscript::FromJson(j), std::invalid_argument);
}

}  // namespace
}  // namespace bitaudit
