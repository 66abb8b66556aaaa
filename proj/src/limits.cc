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

#include "bitaudit/limits.h"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bitaudit {
namespace {

// Grid endpoints are pulled off 0 and 1 so intermediate entropy terms never
// see log(0); the exact endpoints contribute 0 by the entropy convention.
constexpr double kEdge = 1e-12;
constexpr double kGoldenRatio = 0.6180339887498949;  // (sqrt(5) - 1) / 2

// Grid scan followed by golden-section refinement on the bracket around the
// best grid point. Returns the maximum value and its approximate location.
MiBound GridGoldenMax(const std::function<double(double)>& fn, double lo,
                      double hi, int grid_points, double x_tol) {
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  std::vector<double> xs(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    xs[i] = lo + (hi - lo) * i / (grid_points - 1);
    const double v = fn(xs[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double bl = xs[std::max(0, best - 1)];
  const double bh = xs[std::min(grid_points - 1, best + 1)];

  double a = bl, b = bh;
  double c = b - kGoldenRatio * (b - a);
  double d = a + kGoldenRatio * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > x_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGoldenRatio * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGoldenRatio * (b - a);
      fd = fn(d);
    }
  }
  MiBound result;
  if (fc >= fd && fc >= best_val) {
    result.u = fc;
    result.argmax_x = c;
  } else if (fd >= best_val) {
    result.u = fd;
    result.argmax_x = d;
  } else {
    // The refinement must never come back below the grid maximum.
    result.u = best_val;
    result.argmax_x = xs[best];
  }
  return result;
}

}  // namespace

double BinaryEntropy(double x) {
  if (std::isnan(x) || x < 0.0 || x > 1.0) {
    throw std::domain_error("BinaryEntropy: x must be in [0, 1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  constexpr double kLn2 = 0.6931471805599453;
  return -(x * std::log(x) + (1.0 - x) * std::log1p(-x)) / kLn2;
}

double InverseBinaryEntropy(double y) {
  if (std::isnan(y) || y < 0.0 || y > 1.0) {
    throw std::domain_error("InverseBinaryEntropy: y must be in [0, 1]");
  }
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 0.5;
  double lo = 0.0, hi = 0.5;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (BinaryEntropy(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double MiBoundIntegrand(const TradeoffCurve& curve, double x, double p) {
  if (std::isnan(p) || p <= 0.0 || p >= 1.0) {
    throw std::domain_error("MiBoundIntegrand: p must be in (0, 1)");
  }
  const double fx = curve(x);
  const double mix = p * fx + (1.0 - p) * (1.0 - x);
  return BinaryEntropy(std::min(1.0, std::max(0.0, mix))) -
         p * BinaryEntropy(fx) - (1.0 - p) * BinaryEntropy(1.0 - x);
}

MiBound MiUpperBound(const TradeoffCurve& curve, double p) {
  if (std::isnan(p) || p <= 0.0 || p >= 1.0) {
    throw std::domain_error("MiUpperBound: p must be in (0, 1)");
  }
  auto fn = [&](double x) { return MiBoundIntegrand(curve, x, p); };
  MiBound bound = GridGoldenMax(fn, kEdge, 1.0 - kEdge, 1025, 1e-10);
  bound.u = std::max(bound.u, 0.0);
  return bound;
}

double Capacity(const TradeoffCurve& curve) {
  auto fn = [&](double p) { return MiUpperBound(curve, p).u; };
  const MiBound best = GridGoldenMax(fn, 1e-6, 1.0 - 1e-6, 257, 1e-10);
  return std::max(best.u, 0.0);
}

double BitErrorFloor(const TradeoffCurve& curve) {
  const double u = MiUpperBound(curve, 0.5).u;
  return InverseBinaryEntropy(std::min(1.0, std::max(0.0, 1.0 - u)));
}

nlohmann::json LimitProfile::ToJson() const {
  return nlohmann::json{{"p", p},
                        {"u", u},
                        {"argmax_x", argmax_x},
                        {"p_floor", p_floor},
                        {"capacity", capacity}};
}

LimitProfile ComputeLimitProfile(const TradeoffCurve& curve, double p) {
  LimitProfile profile;
  profile.p = p;
  const MiBound bound = MiUpperBound(curve, p);
  profile.u = bound.u;
  profile.argmax_x = bound.argmax_x;
  profile.p_floor = BitErrorFloor(curve);
  profile.capacity = Capacity(curve);
  return profile;
}

}  // namespace bitaudit
