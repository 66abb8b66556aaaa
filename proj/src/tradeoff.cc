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

#include "bitaudit/tradeoff.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bitaudit/normal.h"

namespace bitaudit {
namespace {

void CheckProbability(double x, const char* what) {
  if (std::isnan(x) || x < 0.0 || x > 1.0) {
    throw std::domain_error(std::string(what) + " must be in [0, 1]");
  }
}

void CheckNonNegative(double x, const char* what) {
  if (std::isnan(x) || x < 0.0) {
    throw std::domain_error(std::string(what) + " must be nonnegative");
  }
}

double Clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Nodes/weights of 3-point Gauss-Legendre on [-1, 1].
constexpr double kGlNode = 0.7745966692414834;
constexpr double kGlWeightMid = 0.8888888888888888;
constexpr double kGlWeightSide = 0.5555555555555556;

double CellMass(const Density& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  return h * (kGlWeightSide * f(c - h * kGlNode) + kGlWeightMid * f(c) +
              kGlWeightSide * f(c + h * kGlNode));
}

}  // namespace

std::string CurveFamilyName(CurveFamily family) {
  switch (family) {
    case CurveFamily::kEpsDelta:
      return "eps_delta";
    case CurveFamily::kGaussian:
      return "gaussian";
    case CurveFamily::kLaplace:
      return "laplace";
    case CurveFamily::kNumeric:
      return "numeric";
  }
  throw std::logic_error("unknown curve family");
}

CurveFamily CurveFamilyFromName(const std::string& name) {
  if (name == "eps_delta") return CurveFamily::kEpsDelta;
  if (name == "gaussian") return CurveFamily::kGaussian;
  if (name == "laplace") return CurveFamily::kLaplace;
  if (name == "numeric") return CurveFamily::kNumeric;
  throw std::invalid_argument("unknown curve family: " + name);
}

double EpsDeltaTradeoff(double epsilon, double delta, double x) {
  CheckNonNegative(epsilon, "epsilon");
  CheckProbability(delta, "delta");
  CheckProbability(x, "x");
  const double a = 1.0 - delta - std::exp(epsilon) * x;
  const double b = std::exp(-epsilon) * (1.0 - delta - x);
  return std::max(0.0, std::max(a, b));
}

double GaussianTradeoff(double mu, double x) {
  CheckNonNegative(mu, "mu");
  CheckProbability(x, "x");
  if (x == 0.0) return 1.0;
  if (x == 1.0) return 0.0;
  // Phi^-1(1 - x) = -Phi^-1(x), which stays evaluable for x below the
  // resolution of 1 - x (the conversion search probes x down to e^-eps).
  return StandardNormalCdf(-StandardNormalQuantile(x) - mu);
}

// The likelihood ratio p0/p1 for Lap(0,1) vs Lap(mu,1) equals e^mu on
// x <= 0, e^(mu - 2x) on [0, mu] and e^-mu beyond; rejecting above an
// x-threshold t sweeps the whole curve:
//   alpha <= e^-mu / 2        : beta = 1 - e^mu * alpha        (t >= mu)
//   e^-mu / 2 <= alpha <= 1/2 : beta = e^-mu / (4 * alpha)     (0 <= t <= mu)
//   alpha >= 1/2              : beta = (1 - alpha) * e^-mu     (t <= 0)
double LaplaceTradeoff(double mu_l, double x) {
  CheckNonNegative(mu_l, "mu_l");
  CheckProbability(x, "x");
  if (x == 1.0) return 0.0;
  const double em = std::exp(-mu_l);
  if (x <= 0.5 * em) return 1.0 - std::exp(mu_l) * x;
  if (x <= 0.5) return em / (4.0 * x);
  return (1.0 - x) * em;
}

TradeoffCurve TradeoffCurve::EpsDelta(double epsilon, double delta) {
  CheckNonNegative(epsilon, "epsilon");
  CheckProbability(delta, "delta");
  return TradeoffCurve(CurveFamily::kEpsDelta, epsilon, delta);
}

TradeoffCurve TradeoffCurve::Gaussian(double mu) {
  CheckNonNegative(mu, "mu");
  return TradeoffCurve(CurveFamily::kGaussian, mu, 0.0);
}

TradeoffCurve TradeoffCurve::Laplace(double mu_l) {
  CheckNonNegative(mu_l, "mu_l");
  return TradeoffCurve(CurveFamily::kLaplace, mu_l, 0.0);
}

TradeoffCurve TradeoffCurve::Numeric(std::vector<double> alpha,
                                     std::vector<double> beta) {
  if (alpha.size() != beta.size() || alpha.size() < 2) {
    throw std::invalid_argument("numeric curve needs matching tables, >= 2");
  }
  if (alpha.front() != 0.0 || alpha.back() != 1.0) {
    throw std::invalid_argument("numeric curve table must span [0, 1]");
  }
  for (size_t i = 0; i + 1 < alpha.size(); ++i) {
    if (!(alpha[i] < alpha[i + 1])) {
      throw std::invalid_argument("numeric curve alphas must increase");
    }
  }
  TradeoffCurve curve(CurveFamily::kNumeric, 0.0, 0.0);
  curve.alpha_ = std::move(alpha);
  curve.beta_ = std::move(beta);
  return curve;
}

double TradeoffCurve::operator()(double x) const {
  CheckProbability(x, "x");
  switch (family_) {
    case CurveFamily::kEpsDelta:
      return EpsDeltaTradeoff(param_, delta_, x);
    case CurveFamily::kGaussian:
      return GaussianTradeoff(param_, x);
    case CurveFamily::kLaplace:
      return LaplaceTradeoff(param_, x);
    case CurveFamily::kNumeric: {
      const auto it = std::lower_bound(alpha_.begin(), alpha_.end(), x);
      const size_t hi = std::min<size_t>(it - alpha_.begin(), alpha_.size() - 1);
      if (alpha_[hi] == x || hi == 0) return beta_[hi];
      const size_t lo = hi - 1;
      const double t = (x - alpha_[lo]) / (alpha_[hi] - alpha_[lo]);
      return beta_[lo] + t * (beta_[hi] - beta_[lo]);
    }
  }
  throw std::logic_error("unknown curve family");
}

nlohmann::json TradeoffCurve::ToJson() const {
  nlohmann::json j;
  j["family"] = CurveFamilyName(family_);
  switch (family_) {
    case CurveFamily::kEpsDelta:
      j["params"] = {{"epsilon", param_}, {"delta", delta_}};
      break;
    case CurveFamily::kGaussian:
      j["params"] = {{"mu", param_}};
      break;
    case CurveFamily::kLaplace:
      j["params"] = {{"mu_l", param_}};
      break;
    case CurveFamily::kNumeric:
      j["table"] = {{"alpha", alpha_}, {"beta", beta_}};
      break;
  }
  return j;
}

TradeoffCurve TradeoffCurve::FromJson(const nlohmann::json& j) {
  const CurveFamily family = CurveFamilyFromName(j.at("family"));
  switch (family) {
    case CurveFamily::kEpsDelta:
      return EpsDelta(j.at("params").at("epsilon"), j.at("params").at("delta"));
    case CurveFamily::kGaussian:
      return Gaussian(j.at("params").at("mu"));
    case CurveFamily::kLaplace:
      return Laplace(j.at("params").at("mu_l"));
    case CurveFamily::kNumeric:
      return Numeric(j.at("table").at("alpha").get<std::vector<double>>(),
                     j.at("table").at("beta").get<std::vector<double>>());
  }
  throw std::logic_error("unknown curve family");
}

TradeoffCurve NeymanPearsonCurve(const Density& density0,
                                 const Density& density1, int grid_size,
                                 double domain_lo, double domain_hi) {
  if (grid_size < 64) {
    throw std::invalid_argument("grid_size must be >= 64");
  }
  if (!(domain_lo < domain_hi)) {
    throw std::invalid_argument("empty integration domain");
  }

  // Cell count chosen so the binning loss (second order in the cell width)
  // stays well under the 1e-6 agreement target of the closed-form curves.
  const int cells = 1 << 21;
  const double h = (domain_hi - domain_lo) / cells;

  std::vector<double> w0(cells), w1(cells);
  double total0 = 0.0, total1 = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double lo = domain_lo + i * h;
    w0[i] = CellMass(density0, lo, lo + h);
    w1[i] = CellMass(density1, lo, lo + h);
    total0 += w0[i];
    total1 += w1[i];
  }
  if (std::abs(total0 - 1.0) > 1e-6 || std::abs(total1 - 1.0) > 1e-6) {
    throw std::invalid_argument(
        "densities must integrate to 1 over the domain (within 1e-6)");
  }

  // Reject cells in increasing order of the ratio w0/w1. Ties (flat ratio
  // segments, i.e. point mass in the ratio distribution) produce collinear
  // polyline pieces, which is exactly the randomized test envelope.
  std::vector<int> order(cells);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    // w0[a] * w1[b] < w0[b] * w1[a] compares w0/w1 without dividing by 0.
    const double lhs = w0[a] * w1[b];
    const double rhs = w0[b] * w1[a];
    if (lhs != rhs) return lhs < rhs;
    return a < b;
  });

  // Cumulative (FP, FN) vertices of the rejection prefixes.
  std::vector<double> va, vb;
  va.reserve(cells + 2);
  vb.reserve(cells + 2);
  va.push_back(0.0);
  vb.push_back(1.0);
  double fp = 0.0, power = 0.0;
  for (int idx : order) {
    fp += w0[idx];
    power += w1[idx];
    va.push_back(std::min(fp, 1.0));
    vb.push_back(Clamp01(1.0 - power));
  }
  va.push_back(1.0);
  vb.push_back(0.0);

  // Resample the polyline at grid_size uniform alpha levels.
  std::vector<double> alpha(grid_size), beta(grid_size);
  size_t seg = 0;
  for (int k = 0; k < grid_size; ++k) {
    const double a = static_cast<double>(k) / (grid_size - 1);
    while (seg + 1 < va.size() && va[seg + 1] < a) ++seg;
    double b;
    if (seg + 1 >= va.size() || va[seg + 1] <= va[seg]) {
      b = vb[std::min(seg, vb.size() - 1)];
    } else {
      const double t = (a - va[seg]) / (va[seg + 1] - va[seg]);
      b = vb[seg] + t * (vb[seg + 1] - vb[seg]);
    }
    alpha[k] = a;
    beta[k] = Clamp01(std::min(b, 1.0 - a));
  }
  beta[grid_size - 1] = 0.0;
  // Enforce monotonicity against rounding in the cumulative sums.
  for (int k = grid_size - 2; k >= 0; --k) {
    beta[k] = std::max(beta[k], beta[k + 1]);
  }
  return TradeoffCurve::Numeric(std::move(alpha), std::move(beta));
}

}  // namespace bitaudit
