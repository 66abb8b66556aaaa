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

#ifndef BITAUDIT_HARNESS_H_
#define BITAUDIT_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bitaudit/bounds.h"
#include "bitaudit/channel.h"
#include "bitaudit/estimate.h"

namespace bitaudit {

// Configuration problems carry the offending field path in what().
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  MechanismSpec mechanism;
  Arrangement arrangement = Arrangement::kOneRunMemoryless;
  std::vector<int64_t> n_values;
  double gamma = 0.95;
  double delta = 1e-5;
  int64_t repetitions = 1;
  uint64_t base_seed = 0;
  std::vector<CiMethod> ci_methods = {CiMethod::kAdvanced};
  FamilySpec family;
  std::string output_path;
  int jobs = 1;

  void Validate() const;
  static ExperimentConfig FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

// Per-row derivation of the sweep seed: base_seed plus a stable 64-bit mix
// of (n, repetition), so reruns and paired comparisons line up across
// platforms and worker counts.
uint64_t SweepSeed(uint64_t base_seed, int64_t n, int64_t repetition);

struct SweepRow {
  std::string mechanism;
  double param = 0.0;
  int64_t n = 0;
  uint64_t seed = 0;
  std::string arrangement;
  std::string ci_method;
  double e_bar = 0.0;
  double ci_upper = 0.0;
  double eps_lower = 0.0;
  double eps_claimed = 0.0;
  bool vacuous = false;
};

// Runs the full (n, repetition, ci_method) grid. The claimed epsilon is
// computed once per n from the mechanism's claimed curve. Rows come back
// sorted by (n, repetition, ci_method) regardless of the worker count.
std::vector<SweepRow> RunSweep(const ExperimentConfig& config);

// CSV schema: the exact column set consumed by the plotting scripts.
void WriteCsv(const std::vector<SweepRow>& rows, std::ostream& out);

struct DetectVerdict {
  double eps_lower = 0.0;
  double eps_claimed = 0.0;
  bool violated = false;
  AuditResult audit;

  nlohmann::json ToJson() const;
};

// The flawed-implementation case study: run the claimed mechanism with the
// actually injected noise scale, audit against the claimed family, and
// compare the resulting lower bound with the claimed upper bound.
DetectVerdict DetectViolation(const MechanismSpec& claimed,
                              double actual_noise, int64_t n, double gamma,
                              double delta, uint64_t seed,
                              CiMethod ci_method = CiMethod::kHoeffding);

// Audits one transcript: mean error to AuditResult via the requested family
// and CI method.
AuditResult AuditTranscriptResult(const AuditTranscript& transcript,
                                  double delta, double gamma,
                                  const FamilySpec& family, CiMethod method);

}  // namespace bitaudit

#endif  // BITAUDIT_HARNESS_H_
