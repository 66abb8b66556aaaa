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

#ifndef BITAUDIT_BOUNDS_H_
#define BITAUDIT_BOUNDS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "bitaudit/channel.h"
#include "bitaudit/estimate.h"
#include "bitaudit/tradeoff.h"

namespace bitaudit {

// Smallest epsilon such that curve(x) >= 1 - delta - e^eps * x on [0, 1];
// +infinity when delta < 1 - curve(0). Binary search over epsilon with a
// grid-plus-refinement feasibility check on x.
double FdpToEps(const TradeoffCurve& curve, double delta);

// A parametric curve family with its secondary parameters pinned, so a
// single scalar is left to fit against an error floor.
struct FamilySpec {
  CurveFamily family = CurveFamily::kGaussian;
  double fixed_delta = 0.0;  // kEpsDelta only

  TradeoffCurve Curve(double theta) const;
};

// The natural fitting family of a mechanism (Gaussian for the Gaussian sum,
// and so on).
FamilySpec NaturalFamily(const MechanismSpec& spec);

struct FloorToParamResult {
  double theta = 0.0;
  // Set when p_floor is below what the family reaches at theta = 50 and the
  // saturated endpoint was returned.
  bool saturated = false;
};

// Inverts BitErrorFloor over the family parameter: the theta whose curve
// has the requested floor, to 1e-6 in floor units. The floor is strictly
// decreasing in theta for all supported families. p_floor = 1/2 maps to
// theta = 0 (vacuous).
FloorToParamResult FloorToParam(const FamilySpec& family, double p_floor);

struct AuditResult {
  double delta = 0.0;
  double gamma = 0.0;
  int64_t n = 0;
  double e_bar = 0.0;
  CiMethod ci_method = CiMethod::kAdvanced;
  FamilySpec family;
  double ci_upper = 0.5;
  double fitted_param = 0.0;
  double eps_lower = 0.0;
  bool vacuous = false;
  std::vector<std::string> flags;

  nlohmann::json ToJson() const;
};

// The full pipeline: CI upper endpoint for the bit-error floor, family
// parameter fit, conversion to (epsilon, delta). Vacuous outcomes come back
// as eps_lower = 0 with the flag set, never as an error.
AuditResult PrivacyLowerBound(double delta, double e_bar, double gamma,
                              int64_t n, const FamilySpec& family,
                              CiMethod ci_method);

// The classical multi-run baseline: one-sided Clopper-Pearson upper limits
// on the false positive/negative rates plugged into
// max(log((1-delta-a_r)/b_r), log((1-delta-b_r)/a_r), 0). Only valid for
// transcripts whose per-bit channels are independent, so anything not
// marked multi_run is rejected.
double MultiRunBaselineLowerBound(const AuditTranscript& transcript,
                                  double delta, double gamma);

}  // namespace bitaudit

#endif  // BITAUDIT_BOUNDS_H_
