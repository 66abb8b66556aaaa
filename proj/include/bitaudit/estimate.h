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

#ifndef BITAUDIT_ESTIMATE_H_
#define BITAUDIT_ESTIMATE_H_

#include <cstdint>
#include <string>

namespace bitaudit {

enum class CiMethod { kHoeffding, kAdvanced, kClopperPearson };

std::string CiMethodName(CiMethod method);
CiMethod CiMethodFromName(const std::string& name);

// P[Bin(n, p) <= k]. Direct log-space summation for n <= 1000, regularized
// incomplete beta beyond that.
double BinomCdf(int64_t k, int64_t n, double p);

// Smallest k with BinomCdf(k, n, p) >= q, for q in (0, 1).
int64_t BinomInvCdf(double q, int64_t n, double p);

// Hoeffding one-sided radius v = sqrt(log(1 / (1 - gamma)) / (2n)).
// Natural log: the bound comes from solving exp(-2 n v^2) = 1 - gamma.
double HoeffdingRadius(int64_t n, double gamma);

struct AdvancedCiResult {
  // Self-consistent upper estimate for the bit-error floor, in [0.001, 0.5].
  double p_min = 0.5;
  // Set when the bisection bracket [0.001, 0.5] does not straddle a fixed
  // point and a boundary was returned instead.
  bool bracket_flagged = false;
};

// The fixed-point confidence construction: bisects p over [0.001, 1/2] with
// v(p) = p - F^-1(1 - gamma, n, p) / n until |p - (e_bar + v)| <= 1e-4.
// e_bar >= 1/2 yields the vacuous 1/2.
AdvancedCiResult AdvancedCi(double e_bar, double gamma, int64_t n);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Exact two-sided Clopper-Pearson interval at coverage gamma, by bisection
// of the binomial tail equations.
Interval ClopperPearson(int64_t successes, int64_t trials, double gamma);

// One-sided upper confidence limit at level gamma: the p solving
// P[Bin(trials, p) <= successes] = 1 - gamma (1 when successes == trials).
double ClopperPearsonUpper(int64_t successes, int64_t trials, double gamma);

struct ErrorEstimate {
  int64_t n = 0;
  double e_bar = 0.0;
  double gamma = 0.0;
  CiMethod method = CiMethod::kHoeffding;
  double upper = 0.5;
  bool flagged = false;
};

// Upper CI endpoint for the bit-error floor from an observed mean error.
ErrorEstimate EstimateErrorUpper(double e_bar, double gamma, int64_t n,
                                 CiMethod method);

}  // namespace bitaudit

#endif  // BITAUDIT_ESTIMATE_H_
