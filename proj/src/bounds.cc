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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bitaudit/limits.h"

namespace bitaudit {
namespace {

constexpr double kThetaMax = 50.0;
constexpr double kFloorTolerance = 1e-6;
constexpr double kEpsTolerance = 1e-6;
constexpr int kFeasibilityGrid = 4096;

// min over x in [0,1] of curve(x) - (1 - delta) + e^eps * x. The objective
// is convex in x, so it is unimodal in log x; the binding region shrinks
// like e^-eps, which forces the 4096-point scan onto a log-spaced grid
// (down to 1e-300) with golden-section refinement on the best bracket.
double FeasibilityMargin(const TradeoffCurve& curve, double delta,
                         double eps) {
  const double growth = eps > 700.0 ? std::numeric_limits<double>::infinity()
                                    : std::exp(eps);
  auto objective_at_x = [&](double x) {
    const double linear = growth * x;
    if (std::isinf(linear)) return linear;
    return curve(x) - (1.0 - delta) + linear;
  };
  // t parameterizes x = e^t over [1e-300, 1].
  auto objective = [&](double t) { return objective_at_x(std::exp(t)); };

  const double t_lo = std::log(1e-300), t_hi = 0.0;
  double best_val = objective_at_x(0.0);
  int best = -1;
  for (int i = 0; i < kFeasibilityGrid; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / (kFeasibilityGrid - 1);
    const double v = objective(t);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best < 0) return best_val;  // the x = 0 endpoint wins

  const double step = (t_hi - t_lo) / (kFeasibilityGrid - 1);
  double lo = t_lo + step * std::max(0, best - 1);
  double hi = t_lo + step * std::min(kFeasibilityGrid - 1, best + 1);
  constexpr double kGolden = 0.6180339887498949;
  double c = hi - kGolden * (hi - lo);
  double d = lo + kGolden * (hi - lo);
  double fc = objective(c), fd = objective(d);
  while (hi - lo > 1e-10) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kGolden * (hi - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kGolden * (hi - lo);
      fd = objective(d);
    }
  }
  return std::min(best_val, std::min(fc, fd));
}

}  // namespace

double FdpToEps(const TradeoffCurve& curve, double delta) {
  if (std::isnan(delta) || delta < 0.0 || delta > 1.0) {
    throw std::domain_error("FdpToEps: delta must be in [0, 1]");
  }
  if (delta < 1.0 - curve(0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  auto feasible = [&](double eps) {
    return FeasibilityMargin(curve, delta, eps) >= -1e-12;
  };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 64.0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1048576.0) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > kEpsTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::max(0.0, 0.5 * (lo + hi));
}

TradeoffCurve FamilySpec::Curve(double theta) const {
  switch (family) {
    case CurveFamily::kGaussian:
      return TradeoffCurve::Gaussian(theta);
    case CurveFamily::kEpsDelta:
      return TradeoffCurve::EpsDelta(theta, fixed_delta);
    case CurveFamily::kLaplace:
      return TradeoffCurve::Laplace(theta);
    case CurveFamily::kNumeric:
      break;
  }
  throw std::invalid_argument("family must be parametric to fit");
}

FamilySpec NaturalFamily(const MechanismSpec& spec) {
  FamilySpec family;
  switch (spec.kind) {
    case MechanismKind::kGaussianSum:
    case MechanismKind::kFlawedGaussian:
      family.family = CurveFamily::kGaussian;
      break;
    case MechanismKind::kLaplaceSum:
      family.family = CurveFamily::kLaplace;
      break;
    case MechanismKind::kRandomizedResponse:
      family.family = CurveFamily::kEpsDelta;
      family.fixed_delta = spec.delta;
      break;
  }
  return family;
}

FloorToParamResult FloorToParam(const FamilySpec& family, double p_floor) {
  if (std::isnan(p_floor) || p_floor <= 0.0 || p_floor > 0.5) {
    throw std::domain_error("FloorToParam: p_floor must be in (0, 1/2]");
  }
  FloorToParamResult result;
  if (p_floor == 0.5) {
    result.theta = 0.0;
    return result;
  }
  auto floor_of = [&](double theta) {
    return BitErrorFloor(family.Curve(theta));
  };
  // The floor decreases in theta; handle the two escape ends first.
  if (floor_of(kThetaMax) > p_floor) {
    result.theta = kThetaMax;
    result.saturated = true;
    return result;
  }
  double lo = 0.0, hi = kThetaMax;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = floor_of(mid);
    if (std::abs(f - p_floor) <= kFloorTolerance || hi - lo < 1e-12) break;
    if (f > p_floor) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.theta = mid;
  return result;
}

nlohmann::json AuditResult::ToJson() const {
  nlohmann::json j{{"delta", delta},
                   {"gamma", gamma},
                   {"n", n},
                   {"e_bar", e_bar},
                   {"ci_method", CiMethodName(ci_method)},
                   {"family", CurveFamilyName(family.family)},
                   {"ci_upper", ci_upper},
                   {"fitted_param", fitted_param},
                   {"vacuous", vacuous},
                   {"flags", flags}};
  if (std::isinf(eps_lower)) {
    j["eps_lower"] = "inf";
  } else {
    j["eps_lower"] = eps_lower;
  }
  return j;
}

AuditResult PrivacyLowerBound(double delta, double e_bar, double gamma,
                              int64_t n, const FamilySpec& family,
                              CiMethod ci_method) {
  AuditResult result;
  result.delta = delta;
  result.gamma = gamma;
  result.n = n;
  result.e_bar = e_bar;
  result.ci_method = ci_method;
  result.family = family;

  const ErrorEstimate estimate = EstimateErrorUpper(e_bar, gamma, n, ci_method);
  result.ci_upper = estimate.upper;
  if (estimate.flagged) result.flags.push_back("ci_bracket_floor");

  if (estimate.upper >= 0.5) {
    result.vacuous = true;
    result.eps_lower = 0.0;
    result.fitted_param = 0.0;
    return result;
  }

  const FloorToParamResult fit = FloorToParam(family, estimate.upper);
  result.fitted_param = fit.theta;
  if (fit.saturated) result.flags.push_back("param_saturated");
  if (fit.theta <= 0.0) {
    result.vacuous = true;
    result.eps_lower = 0.0;
    return result;
  }

  result.eps_lower = FdpToEps(family.Curve(fit.theta), delta);
  if (result.eps_lower == 0.0) result.vacuous = true;
  return result;
}

double MultiRunBaselineLowerBound(const AuditTranscript& transcript,
                                  double delta, double gamma) {
  if (transcript.arrangement != Arrangement::kMultiRun) {
    throw std::invalid_argument(
        "the multi-run baseline is only valid for independent per-bit "
        "channels; one-run transcripts are rejected");
  }
  if (std::isnan(delta) || delta < 0.0 || delta > 1.0) {
    throw std::domain_error("delta must be in [0, 1]");
  }
  int64_t n0 = 0, n1 = 0, fp = 0, fn = 0;
  for (int64_t i = 0; i < transcript.size(); ++i) {
    if (transcript.truth.bits[i] == 0) {
      ++n0;
      fp += transcript.guesses[i] == 1;
    } else {
      ++n1;
      fn += transcript.guesses[i] == 0;
    }
  }
  if (n0 == 0 || n1 == 0) {
    throw std::invalid_argument("baseline needs both bit values represented");
  }
  const double alpha_r = ClopperPearsonUpper(fp, n0, gamma);
  const double beta_r = ClopperPearsonUpper(fn, n1, gamma);
  double best = 0.0;
  if (1.0 - delta - alpha_r > 0.0 && beta_r > 0.0) {
    best = std::max(best, std::log((1.0 - delta - alpha_r) / beta_r));
  }
  if (1.0 - delta - beta_r > 0.0 && alpha_r > 0.0) {
    best = std::max(best, std::log((1.0 - delta - beta_r) / alpha_r));
  }
  return best;
}

}  // namespace bitaudit
