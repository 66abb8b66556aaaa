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

#ifndef BITAUDIT_NORMAL_H_
#define BITAUDIT_NORMAL_H_

namespace bitaudit {

// Standard normal c.d.f., evaluated via erfc for full tail accuracy.
// Absolute error is a few ulps of the result down to arguments near -38.
double StandardNormalCdf(double x);

// Standard normal quantile function (inverse c.d.f.).
// Rational approximation with relative error below 1e-15 on
// p in [1e-300, 1 - 1e-16]. Returns +/-infinity at p = 1 and p = 0.
double StandardNormalQuantile(double p);

// Standard normal density.
double StandardNormalPdf(double x);

}  // namespace bitaudit

#endif  // BITAUDIT_NORMAL_H_
