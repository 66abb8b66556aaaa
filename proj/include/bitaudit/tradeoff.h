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

#ifndef BITAUDIT_TRADEOFF_H_
#define BITAUDIT_TRADEOFF_H_

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace bitaudit {

enum class CurveFamily { kEpsDelta, kGaussian, kLaplace, kNumeric };

std::string CurveFamilyName(CurveFamily family);
CurveFamily CurveFamilyFromName(const std::string& name);

// Optimal type-II error of the (epsilon, delta) testing region at type-I
// level x: max(0, 1 - delta - e^eps * x, e^-eps * (1 - delta - x)).
double EpsDeltaTradeoff(double epsilon, double delta, double x);

// Optimal type-II error for N(0,1) vs N(mu,1): Phi(Phi^-1(1 - x) - mu).
double GaussianTradeoff(double mu, double x);

// Optimal type-II error for Lap(0,1) vs Lap(mu_l,1) at type-I level x,
// from the likelihood-ratio test on the piecewise-exponential ratio.
double LaplaceTradeoff(double mu_l, double x);

// An indistinguishability curve alpha -> beta on [0,1]: convex,
// non-increasing, below the diagonal beta = 1 - alpha. Immutable after
// construction; evaluation is pure and thread-safe.
class TradeoffCurve {
 public:
  static TradeoffCurve EpsDelta(double epsilon, double delta);
  static TradeoffCurve Gaussian(double mu);
  static TradeoffCurve Laplace(double mu_l);
  // Tabulated curve. `alpha` must be strictly increasing and span [0, 1];
  // evaluation between knots is the chord interpolant of the table, which
  // for points sampled from a convex curve never falls below it.
  static TradeoffCurve Numeric(std::vector<double> alpha,
                               std::vector<double> beta);

  double operator()(double x) const;

  CurveFamily family() const { return family_; }
  // epsilon, mu or mu_l depending on the family.
  double param() const { return param_; }
  double delta() const { return delta_; }
  const std::vector<double>& table_alpha() const { return alpha_; }
  const std::vector<double>& table_beta() const { return beta_; }

  nlohmann::json ToJson() const;
  static TradeoffCurve FromJson(const nlohmann::json& j);

 private:
  TradeoffCurve(CurveFamily family, double param, double delta)
      : family_(family), param_(param), delta_(delta) {}

  CurveFamily family_;
  double param_ = 0.0;
  double delta_ = 0.0;
  std::vector<double> alpha_;
  std::vector<double> beta_;
};

using Density = std::function<double(double)>;

// Builds the tabulated trade-off curve for testing density0 against
// density1 by the Neyman-Pearson construction: the support is cut into
// small cells, cells are rejected in increasing order of the mass ratio
// w0/w1, and the resulting (FP, FN) polyline is resampled at grid_size
// levels. Randomization across thresholds whose ratio carries point mass
// shows up as the collinear segments of that polyline. Throws if either
// density does not integrate to 1 within 1e-6 over [domain_lo, domain_hi].
TradeoffCurve NeymanPearsonCurve(const Density& density0,
                                 const Density& density1, int grid_size,
                                 double domain_lo = -40.0,
                                 double domain_hi = 40.0);

}  // namespace bitaudit

#endif  // BITAUDIT_TRADEOFF_H_
