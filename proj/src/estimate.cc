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

#include "bitaudit/estimate.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace bitaudit {
namespace {

constexpr double kAdvancedLowerBracket = 0.001;
constexpr double kAdvancedTolerance = 1e-4;
constexpr int kAdvancedMaxIterations = 64;

void CheckProbability(double x, const char* what) {
  if (std::isnan(x) || x < 0.0 || x > 1.0) {
    throw std::domain_error(std::string(what) + " must be in [0, 1]");
  }
}

void CheckGamma(double gamma) {
  if (std::isnan(gamma) || gamma <= 0.0 || gamma >= 1.0) {
    throw std::domain_error("gamma must be in (0, 1)");
  }
}

// Solves BinomCdf(k, n, p) = target for p on [0, 1]; the cdf is
// non-increasing in p for fixed k.
double InvertCdfInP(int64_t k, int64_t n, double target) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (BinomCdf(k, n, mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string CiMethodName(CiMethod method) {
  switch (method) {
    case CiMethod::kHoeffding:
      return "hoeffding";
    case CiMethod::kAdvanced:
      return "advanced";
    case CiMethod::kClopperPearson:
      return "clopper_pearson";
  }
  throw std::logic_error("unknown CI method");
}

CiMethod CiMethodFromName(const std::string& name) {
  if (name == "hoeffding") return CiMethod::kHoeffding;
  if (name == "advanced") return CiMethod::kAdvanced;
  if (name == "clopper_pearson") return CiMethod::kClopperPearson;
  throw std::invalid_argument("unknown CI method: " + name);
}

double BinomCdf(int64_t k, int64_t n, double p) {
  if (n < 0 || k < 0 || k > n) {
    throw std::domain_error("BinomCdf: need 0 <= k <= n");
  }
  CheckProbability(p, "p");
  if (k == n || p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;  // k < n here
  if (n <= 1000) {
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double lg_n = std::lgamma(static_cast<double>(n) + 1.0);
    double sum = 0.0;
    for (int64_t i = 0; i <= k; ++i) {
      const double log_term = lg_n - std::lgamma(static_cast<double>(i) + 1.0) -
                              std::lgamma(static_cast<double>(n - i) + 1.0) +
                              i * log_p + (n - i) * log_q;
      sum += std::exp(log_term);
    }
    return std::min(1.0, sum);
  }
  // P[Bin(n,p) <= k] = I_{1-p}(n - k, k + 1).
  return boost::math::ibeta(static_cast<double>(n - k),
                            static_cast<double>(k + 1), 1.0 - p);
}

int64_t BinomInvCdf(double q, int64_t n, double p) {
  if (std::isnan(q) || q <= 0.0 || q >= 1.0) {
    throw std::domain_error("BinomInvCdf: q must be in (0, 1)");
  }
  if (n < 0) throw std::domain_error("BinomInvCdf: n must be >= 0");
  CheckProbability(p, "p");
  int64_t lo = 0, hi = n;
  if (BinomCdf(0, n, p) >= q) return 0;
  while (hi - lo > 1) {
    const int64_t mid = lo + (hi - lo) / 2;
    if (BinomCdf(mid, n, p) >= q) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double HoeffdingRadius(int64_t n, double gamma) {
  if (n < 1) throw std::domain_error("HoeffdingRadius: n must be >= 1");
  CheckGamma(gamma);
  return std::sqrt(std::log(1.0 / (1.0 - gamma)) / (2.0 * n));
}

AdvancedCiResult AdvancedCi(double e_bar, double gamma, int64_t n) {
  CheckProbability(e_bar, "e_bar");
  CheckGamma(gamma);
  if (n < 1) throw std::domain_error("AdvancedCi: n must be >= 1");

  AdvancedCiResult result;
  if (e_bar >= 0.5) {
    // Random guessing or worse carries no nontrivial conclusion.
    result.p_min = 0.5;
    return result;
  }

  // residual(p) = p - (e_bar + v(p)) = F^-1(1 - gamma, n, p)/n - e_bar,
  // non-decreasing in p. A positive value at the lower bracket or negative
  // value at the upper one means the fixed point escapes the bracket.
  auto residual = [&](double p) {
    return static_cast<double>(BinomInvCdf(1.0 - gamma, n, p)) / n - e_bar;
  };
  if (residual(kAdvancedLowerBracket) > kAdvancedTolerance) {
    result.p_min = kAdvancedLowerBracket;
    result.bracket_flagged = true;
    return result;
  }
  if (residual(0.5) < -kAdvancedTolerance) {
    result.p_min = 0.5;
    result.bracket_flagged = true;
    return result;
  }

  double p_l = kAdvancedLowerBracket;
  double p_r = 0.5;
  double p_min = 0.5 * (p_l + p_r);
  double res = residual(p_min);
  for (int it = 0; it < kAdvancedMaxIterations && std::abs(res) > kAdvancedTolerance;
       ++it) {
    if (res > 0.0) {
      p_r = p_min;
    } else {
      p_l = p_min;
    }
    p_min = 0.5 * (p_l + p_r);
    res = residual(p_min);
  }
  result.p_min = p_min;
  return result;
}

Interval ClopperPearson(int64_t successes, int64_t trials, double gamma) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::domain_error("ClopperPearson: need 0 <= successes <= trials");
  }
  CheckGamma(gamma);
  const double tail = (1.0 - gamma) / 2.0;
  Interval interval;
  // lo solves P[Bin(n, lo) >= k] = tail, i.e. 1 - cdf(k-1) = tail.
  interval.lo =
      (successes == 0) ? 0.0 : InvertCdfInP(successes - 1, trials, 1.0 - tail);
  // hi solves P[Bin(n, hi) <= k] = tail.
  interval.hi =
      (successes == trials) ? 1.0 : InvertCdfInP(successes, trials, tail);
  return interval;
}

double ClopperPearsonUpper(int64_t successes, int64_t trials, double gamma) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::domain_error("ClopperPearsonUpper: need 0 <= successes <= trials");
  }
  CheckGamma(gamma);
  if (successes == trials) return 1.0;
  return InvertCdfInP(successes, trials, 1.0 - gamma);
}

ErrorEstimate EstimateErrorUpper(double e_bar, double gamma, int64_t n,
                                 CiMethod method) {
  ErrorEstimate estimate;
  estimate.n = n;
  estimate.e_bar = e_bar;
  estimate.gamma = gamma;
  estimate.method = method;
  switch (method) {
    case CiMethod::kHoeffding:
      estimate.upper = std::min(1.0, e_bar + HoeffdingRadius(n, gamma));
      break;
    case CiMethod::kAdvanced: {
      const AdvancedCiResult aci = AdvancedCi(e_bar, gamma, n);
      estimate.upper = aci.p_min;
      estimate.flagged = aci.bracket_flagged;
      break;
    }
    case CiMethod::kClopperPearson: {
      const int64_t errors = llround(e_bar * n);
      estimate.upper = ClopperPearsonUpper(errors, n, gamma);
      break;
    }
  }
  return estimate;
}

}  // namespace bitaudit
