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

#include "bitaudit/bounds.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "bitaudit/limits.h"
#include "bitaudit/normal.h"
#include "bitaudit/rng.h"
#include "oracles.h"

namespace bitaudit {
namespace {

TEST(FdpToEps, DiagonalIsZero) {
  EXPECT_DOUBLE_EQ(FdpToEps(TradeoffCurve::EpsDelta(0.0, 0.0), 0.0), 0.0);
}

TEST(FdpToEps, EpsDeltaRoundTrip) {
  EXPECT_NEAR(FdpToEps(TradeoffCurve::EpsDelta(1.7, 1e-5), 1e-5), 1.7, 1e-4);
  for (double eps : {0.25, 1.0, 4.0}) {
    EXPECT_NEAR(FdpToEps(TradeoffCurve::EpsDelta(eps, 1e-5), 1e-5), eps, 1e-4)
        << "eps=" << eps;
  }
}

TEST(FdpToEps, InfiniteWhenDeltaBelowCurveGap) {
  // 1 - f(0) = delta0; asking for a smaller delta is unattainable.
  const double eps =
      FdpToEps(TradeoffCurve::EpsDelta(1.0, 1e-3), 1e-4);
  EXPECT_TRUE(std::isinf(eps));
}

TEST(FdpToEps, GaussianMatchesDualFormulaOracle) {
  EXPECT_NEAR(FdpToEps(TradeoffCurve::Gaussian(1.0), 1e-5),
              oracles::GaussianDualEps(1.0, 1e-5), 1e-4);
  for (double mu : {0.1, 0.3, 0.8, 1.5, 2.4, 4.0}) {
    for (double delta : {1e-5, 1e-6}) {
      EXPECT_NEAR(FdpToEps(TradeoffCurve::Gaussian(mu), delta),
                  oracles::GaussianDualEps(mu, delta), 1e-4)
          << "mu=" << mu << " delta=" << delta;
    }
  }
}

TEST(FdpToEps, BracketExpandsPastSixtyFour) {
  // mu = 8 converts to an epsilon beyond the initial [0, 64] bracket.
  const double eps = FdpToEps(TradeoffCurve::Gaussian(8.0), 1e-5);
  EXPECT_GT(eps, 64.0);
  EXPECT_NEAR(eps, oracles::GaussianDualEps(8.0, 1e-5), 1e-3);
}

TEST(FloorToParam, VacuousAndForwardInverses) {
  FamilySpec gaussian{CurveFamily::kGaussian, 0.0};
  EXPECT_DOUBLE_EQ(FloorToParam(gaussian, 0.5).theta, 0.0);

  // Inverse of the symmetric-point identity: floor = Phi(-mu/2).
  const FloorToParamResult fit =
      FloorToParam(gaussian, StandardNormalCdf(-0.4));
  EXPECT_FALSE(fit.saturated);
  EXPECT_NEAR(fit.theta, 0.8, 1e-4);
  EXPECT_NEAR(BitErrorFloor(gaussian.Curve(fit.theta)),
              StandardNormalCdf(-0.4), 2e-6);
}

TEST(FloorToParam, EpsDeltaRoundTrip) {
  FamilySpec family{CurveFamily::kEpsDelta, 1e-5};
  const double floor = BitErrorFloor(family.Curve(1.0));
  EXPECT_NEAR(FloorToParam(family, floor).theta, 1.0, 1e-3);
}

TEST(FloorToParam, LaplaceRoundTrip) {
  FamilySpec family{CurveFamily::kLaplace, 0.0};
  const double floor = BitErrorFloor(family.Curve(0.8));
  EXPECT_NEAR(FloorToParam(family, floor).theta, 0.8, 1e-3);
}

TEST(FloorToParam, SaturatesAtThetaMax) {
  FamilySpec gaussian{CurveFamily::kGaussian, 0.0};
  const FloorToParamResult fit = FloorToParam(gaussian, 1e-200);
  EXPECT_TRUE(fit.saturated);
  EXPECT_DOUBLE_EQ(fit.theta, 50.0);
  EXPECT_THROW(FloorToParam(gaussian, 0.0), std::domain_error);
  EXPECT_THROW(FloorToParam(gaussian, 0.7), std::domain_error);
}

TEST(PrivacyLowerBound, RandomGuessingIsVacuous) {
  FamilySpec gaussian{CurveFamily::kGaussian, 0.0};
  const AuditResult result =
      PrivacyLowerBound(1e-5, 0.5, 0.95, 100000, gaussian, CiMethod::kAdvanced);
  EXPECT_TRUE(result.vacuous);
  EXPECT_DOUBLE_EQ(result.eps_lower, 0.0);
}

TEST(PrivacyLowerBound, MonotoneInObservedErrorAndN) {
  FamilySpec gaussian{CurveFamily::kGaussian, 0.0};
  double prev = std::numeric_limits<double>::infinity();
  for (double e_bar : {0.05, 0.15, 0.25, 0.35, 0.45}) {
    const AuditResult result = PrivacyLowerBound(1e-5, e_bar, 0.95, 10000,
                                                 gaussian, CiMethod::kAdvanced);
    EXPECT_LE(result.eps_lower, prev + 1e-9);
    prev = result.eps_lower;
  }
  prev = 0.0;
  for (int64_t n : {100, 1000, 10000, 100000}) {
    const AuditResult result =
        PrivacyLowerBound(1e-5, 0.3, 0.95, n, gaussian, CiMethod::kAdvanced);
    EXPECT_GE(result.eps_lower, prev - 1e-9);
    prev = result.eps_lower;
  }
}

// Monte Carlo at the exact floor of the eps=1 randomized-response curve:
// the lower bound must stay below 1 at the confidence rate and concentrate
// near it.
TEST(PrivacyLowerBound, RandomizedResponseFloorMonteCarlo) {
  FamilySpec family{CurveFamily::kEpsDelta, 1e-5};
  const double p_true = BitErrorFloor(family.Curve(1.0));
  const int64_t n = 100000;
  const int kReps = 200;
  int below = 0;
  double sum_eps = 0.0;
  for (int rep = 0; rep < kReps; ++rep) {
    RandomStream stream(MixCombine(515, rep));
    int64_t errors = 0;
    for (int64_t i = 0; i < n; ++i) {
      errors += stream.NextBernoulli(p_true) ? 1 : 0;
    }
    const AuditResult result =
        PrivacyLowerBound(1e-5, static_cast<double>(errors) / n, 0.95, n,
                          family, CiMethod::kAdvanced);
    below += result.eps_lower <= 1.0 ? 1 : 0;
    sum_eps += result.eps_lower;
  }
  EXPECT_GE(below, 190) << "eps_L exceeded the true eps too often";
  EXPECT_GE(sum_eps / kReps, 0.9);
}

// The fixed-point interval dominates Hoeffding wherever the audit is
// informative, so its lower bound is never weaker.
TEST(PrivacyLowerBound, AdvancedDominatesHoeffdingOnGrid) {
  FamilySpec gaussian{CurveFamily::kGaussian, 0.0};
  for (double e_bar : {0.05, 0.15, 0.25, 0.35}) {
    for (int64_t n : {100, 1000, 10000}) {
      for (double gamma : {0.95, 0.99}) {
        const double adv =
            PrivacyLowerBound(1e-5, e_bar, gamma, n, gaussian,
                              CiMethod::kAdvanced)
                .eps_lower;
        const double hoef =
            PrivacyLowerBound(1e-5, e_bar, gamma, n, gaussian,
                              CiMethod::kHoeffding)
                .eps_lower;
        EXPECT_GE(adv, hoef) << "e_bar=" << e_bar << " n=" << n
                             << " gamma=" << gamma;
      }
    }
  }
}

// Soundness: auditing an honestly simulated mechanism almost never yields
// eps_L above the curve's own epsilon.
TEST(PrivacyLowerBound, SoundnessOnHonestGaussian) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kGaussianSum;
  spec.privacy_param = 0.8;
  const double eps_upper = FdpToEps(TradeoffCurve::Gaussian(0.8), 1e-5);
  FamilySpec gaussian{CurveFamily::kGaussian, 0.0};
  const int kReps = 500;
  const int64_t n = 10000;
  int exceed = 0;
  for (int rep = 0; rep < kReps; ++rep) {
    const AuditTranscript transcript = RunAudit(
        spec, Arrangement::kOneRunMemoryless, n, 0.5, MixCombine(616, rep));
    const AuditResult result =
        PrivacyLowerBound(1e-5, transcript.MeanError(), 0.95, n, gaussian,
                          CiMethod::kAdvanced);
    exceed += result.eps_lower > eps_upper ? 1 : 0;
  }
  const double slack = 3.0 * std::sqrt(0.95 * 0.05 / kReps);
  EXPECT_LE(static_cast<double>(exceed) / kReps, 0.05 + slack);
}

TEST(MultiRunBaseline, AllWrongGuessesGiveZero) {
  AuditTranscript transcript;
  transcript.arrangement = Arrangement::kMultiRun;
  transcript.truth.bits = {0, 0, 1, 1, 0, 1};
  transcript.guesses = {1, 1, 0, 0, 1, 0};
  EXPECT_DOUBLE_EQ(MultiRunBaselineLowerBound(transcript, 1e-5, 0.95), 0.0);
}

TEST(MultiRunBaseline, PerfectGuessesMatchAnalyticZeroCountForm) {
  AuditTranscript transcript;
  transcript.arrangement = Arrangement::kMultiRun;
  const int64_t per_class = 100;
  for (int64_t i = 0; i < 2 * per_class; ++i) {
    const uint8_t b = i < per_class ? 0 : 1;
    transcript.truth.bits.push_back(b);
    transcript.guesses.push_back(b);
  }
  const double gamma = 0.95, delta = 1e-5;
  const double rate_upper = 1.0 - std::pow(1.0 - gamma, 1.0 / per_class);
  const double expected = std::log((1.0 - delta - rate_upper) / rate_upper);
  const double got = MultiRunBaselineLowerBound(transcript, delta, gamma);
  EXPECT_GT(got, 0.0);
  EXPECT_NEAR(got, expected, 1e-8);
}

TEST(MultiRunBaseline, QuarterErrorRates) {
  AuditTranscript transcript;
  transcript.arrangement = Arrangement::kMultiRun;
  const int64_t per_class = 10000;
  for (int64_t i = 0; i < 2 * per_class; ++i) {
    const uint8_t b = i < per_class ? 0 : 1;
    transcript.truth.bits.push_back(b);
    // Exactly one quarter of each class guessed wrong.
    transcript.guesses.push_back((i % 4 == 0) ? (1 - b) : b);
  }
  const double got = MultiRunBaselineLowerBound(transcript, 0.0, 0.95);
  const double rate_upper = ClopperPearsonUpper(per_class / 4, per_class, 0.95);
  const double expected = std::log((1.0 - rate_upper) / rate_upper);
  EXPECT_NEAR(got, expected, 1e-9);
  // log(3) minus the Clopper-Pearson slack.
  EXPECT_NEAR(got, std::log(3.0), 0.06);
  EXPECT_LT(got, std::log(3.0));
}

TEST(MultiRunBaseline, RejectsOneRunTranscripts) {
  AuditTranscript transcript;
  transcript.arrangement = Arrangement::kOneRunMemoryless;
  transcript.truth.bits = {0, 1};
  transcript.guesses = {0, 1};
  EXPECT_THROW(MultiRunBaselineLowerBound(transcript, 1e-5, 0.95),
               std::invalid_argument);
  transcript.arrangement = Arrangement::kOneRunInterfering;
  EXPECT_THROW(MultiRunBaselineLowerBound(transcript, 1e-5, 0.95),
               std::invalid_argument);
}

TEST(AuditResultJson, SerializesInfinityAsString) {
  AuditResult result;
  result.eps_lower = std::numeric_limits<double>::infinity();
  EXPECT_EQ(result.ToJson()["eps_lower"], "inf");
  result.eps_lower = 1.25;
  EXPECT_DOUBLE_EQ(result.ToJson()["eps_lower"].get<double>(), 1.25);
}

TEST(NaturalFamily, MapsMechanismsToTheirFamilies) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kLaplaceSum;
  EXPECT_EQ(NaturalFamily(spec).family, CurveFamily::kLaplace);
  spec.kind = MechanismKind::kRandomizedResponse;
  spec.delta = 1e-5;
  EXPECT_EQ(NaturalFamily(spec).family, CurveFamily::kEpsDelta);
  EXPECT_DOUBLE_EQ(NaturalFamily(spec).fixed_delta, 1e-5);
  spec.kind = MechanismKind::kFlawedGaussian;
  EXPECT_EQ(NaturalFamily(spec).family, CurveFamily::kGaussian);
}

}  // namespace
}  // namespace bitaudit
