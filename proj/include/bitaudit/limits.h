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

#ifndef BITAUDIT_LIMITS_H_
#define BITAUDIT_LIMITS_H_

#include "json.hpp"

#include "bitaudit/tradeoff.h"

namespace bitaudit {

// Binary entropy in bits, with the 0*log(0) = 0 convention.
double BinaryEntropy(double x);

// Inverse of the left half of the binary entropy: the unique x in [0, 1/2]
// with h(x) = y, by bisection to 1e-12.
double InverseBinaryEntropy(double y);

// The per-bit mutual-information integrand
//   F_f(x, p) = h(p*f(x) + (1-p)(1-x)) - p*h(f(x)) - (1-p)*h(1-x).
double MiBoundIntegrand(const TradeoffCurve& curve, double x, double p);

struct MiBound {
  double u = 0.0;        // max over x of F_f(x, p), in bits
  double argmax_x = 0.0;
};

// Upper bound on the mutual information between an input bit with prior p
// and its recovered bit, for any decoder against a curve-DP mechanism.
// Grid scan (>= 1024 points) plus golden-section refinement.
MiBound MiUpperBound(const TradeoffCurve& curve, double p);

// Channel capacity: max over the prior p of MiUpperBound(curve, p).u.
double Capacity(const TradeoffCurve& curve);

// Information-theoretic floor on the per-bit error rate of any decoder:
// h^-1(1 - u_f(1/2)).
double BitErrorFloor(const TradeoffCurve& curve);

struct LimitProfile {
  double p = 0.5;
  double u = 0.0;
  double argmax_x = 0.0;
  double p_floor = 0.5;
  double capacity = 0.0;

  nlohmann::json ToJson() const;
};

LimitProfile ComputeLimitProfile(const TradeoffCurve& curve, double p);

}  // namespace bitaudit

#endif  // BITAUDIT_LIMITS_H_
