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

#include "bitaudit/harness.h"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <map>
#include <ostream>
#include <thread>

#include "bitaudit/rng.h"

namespace bitaudit {
namespace {

template <typename T>
T GetField(const nlohmann::json& j, const std::string& path,
           const std::string& key) {
  if (!j.contains(key)) {
    throw ConfigError("missing config field: " + path + "." + key);
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad config field " + path + "." + key + ": " +
                      e.what());
  }
}

template <typename T>
T GetFieldOr(const nlohmann::json& j, const std::string& path,
             const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return GetField<T>(j, path, key);
}

std::string FormatDouble(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

}  // namespace

void ExperimentConfig::Validate() const {
  mechanism.Validate();
  if (n_values.empty()) throw ConfigError("config.n_values must be non-empty");
  for (int64_t n : n_values) {
    if (n < 1) throw ConfigError("config.n_values entries must be >= 1");
  }
  if (gamma <= 0.0 || gamma >= 1.0) {
    throw ConfigError("config.gamma must be in (0, 1)");
  }
  if (delta < 0.0 || delta > 1.0) {
    throw ConfigError("config.delta must be in [0, 1]");
  }
  if (repetitions < 1) throw ConfigError("config.repetitions must be >= 1");
  if (ci_methods.empty()) {
    throw ConfigError("config.ci_methods must be non-empty");
  }
  if (jobs < 1) throw ConfigError("config.jobs must be >= 1");
}

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json& j) {
  ExperimentConfig config;
  if (!j.contains("mechanism")) {
    throw ConfigError("missing config field: config.mechanism");
  }
  try {
    config.mechanism = MechanismSpec::FromJson(j.at("mechanism"));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config field config.mechanism: ") +
                      e.what());
  }
  config.arrangement = ArrangementFromName(GetFieldOr<std::string>(
      j, "config", "arrangement", "one_run_memoryless"));
  config.n_values = GetField<std::vector<int64_t>>(j, "config", "n_values");
  config.gamma = GetFieldOr<double>(j, "config", "gamma", 0.95);
  config.delta = GetFieldOr<double>(j, "config", "delta", 1e-5);
  config.repetitions = GetFieldOr<int64_t>(j, "config", "repetitions", 1);
  config.base_seed = GetFieldOr<uint64_t>(j, "config", "base_seed", 0);
  config.jobs = GetFieldOr<int>(j, "config", "jobs", 1);
  config.output_path = GetFieldOr<std::string>(j, "config", "output_path", "");

  const auto method_names = GetFieldOr<std::vector<std::string>>(
      j, "config", "ci_methods", {"advanced"});
  config.ci_methods.clear();
  for (const auto& name : method_names) {
    try {
      config.ci_methods.push_back(CiMethodFromName(name));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad config field config.ci_methods: ") +
                        e.what());
    }
  }

  if (j.contains("family")) {
    try {
      config.family.family = CurveFamilyFromName(j.at("family"));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad config field config.family: ") +
                        e.what());
    }
    config.family.fixed_delta =
        config.family.family == CurveFamily::kEpsDelta ? config.delta : 0.0;
  } else {
    config.family = NaturalFamily(config.mechanism);
  }
  config.Validate();
  return config;
}

nlohmann::json ExperimentConfig::ToJson() const {
  std::vector<std::string> method_names;
  for (CiMethod m : ci_methods) method_names.push_back(CiMethodName(m));
  return nlohmann::json{{"mechanism", mechanism.ToJson()},
                        {"arrangement", ArrangementName(arrangement)},
                        {"n_values", n_values},
                        {"gamma", gamma},
                        {"delta", delta},
                        {"repetitions", repetitions},
                        {"base_seed", base_seed},
                        {"ci_methods", method_names},
                        {"family", CurveFamilyName(family.family)},
                        {"output_path", output_path},
                        {"jobs", jobs}};
}

uint64_t SweepSeed(uint64_t base_seed, int64_t n, int64_t repetition) {
  return base_seed + MixCombine(static_cast<uint64_t>(n),
                                static_cast<uint64_t>(repetition));
}

AuditResult AuditTranscriptResult(const AuditTranscript& transcript,
                                  double delta, double gamma,
                                  const FamilySpec& family, CiMethod method) {
  return PrivacyLowerBound(delta, transcript.MeanError(), gamma,
                           transcript.size(), family, method);
}

std::vector<SweepRow> RunSweep(const ExperimentConfig& config) {
  config.Validate();

  struct Job {
    int64_t n;
    int64_t repetition;
  };
  std::vector<Job> jobs;
  for (int64_t n : config.n_values) {
    for (int64_t rep = 0; rep < config.repetitions; ++rep) {
      jobs.push_back({n, rep});
    }
  }

  // The claimed bound depends only on the curve and delta; computed once.
  const double eps_claimed =
      FdpToEps(config.mechanism.ClaimedCurve(), config.delta);

  std::vector<std::vector<SweepRow>> slots(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      const Job& job = jobs[idx];
      const uint64_t seed = SweepSeed(config.base_seed, job.n, job.repetition);
      const AuditTranscript transcript = RunAudit(
          config.mechanism, config.arrangement, job.n, 0.5, seed);
      for (CiMethod method : config.ci_methods) {
        const AuditResult audit = AuditTranscriptResult(
            transcript, config.delta, config.gamma, config.family, method);
        SweepRow row;
        row.mechanism = MechanismKindName(config.mechanism.kind);
        row.param = config.mechanism.privacy_param;
        row.n = job.n;
        row.seed = seed;
        row.arrangement = ArrangementName(config.arrangement);
        row.ci_method = CiMethodName(method);
        row.e_bar = audit.e_bar;
        row.ci_upper = audit.ci_upper;
        row.eps_lower = audit.eps_lower;
        row.eps_claimed = eps_claimed;
        row.vacuous = audit.vacuous;
        slots[idx].push_back(row);
      }
    }
  };

  const int worker_count =
      std::max(1, std::min<int>(config.jobs, static_cast<int>(jobs.size())));
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (int i = 0; i < worker_count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Jobs were enumerated in (n, repetition) order; flattening the slots in
  // index order keeps the output deterministic for any worker count.
  std::vector<SweepRow> rows;
  rows.reserve(jobs.size() * config.ci_methods.size());
  for (auto& slot : slots) {
    for (auto& row : slot) rows.push_back(std::move(row));
  }
  return rows;
}

void WriteCsv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "mechanism,param,n,seed,arrangement,ci_method,e_bar,ci_upper,"
         "eps_lower,eps_claimed,vacuous\n";
  for (const auto& row : rows) {
    char seed_text[24];
    std::snprintf(seed_text, sizeof(seed_text), "%" PRIu64, row.seed);
    out << row.mechanism << ',' << FormatDouble(row.param) << ',' << row.n
        << ',' << seed_text << ',' << row.arrangement << ',' << row.ci_method
        << ',' << FormatDouble(row.e_bar) << ',' << FormatDouble(row.ci_upper)
        << ',' << FormatDouble(row.eps_lower) << ','
        << FormatDouble(row.eps_claimed) << ',' << (row.vacuous ? 1 : 0)
        << '\n';
  }
}

nlohmann::json DetectVerdict::ToJson() const {
  return nlohmann::json{{"eps_lower", eps_lower},
                        {"eps_claimed", eps_claimed},
                        {"violated", violated},
                        {"audit", audit.ToJson()}};
}

DetectVerdict DetectViolation(const MechanismSpec& claimed,
                              double actual_noise, int64_t n, double gamma,
                              double delta, uint64_t seed,
                              CiMethod ci_method) {
  if (claimed.kind != MechanismKind::kGaussianSum &&
      claimed.kind != MechanismKind::kFlawedGaussian) {
    throw std::invalid_argument("detection case study audits a Gaussian claim");
  }
  const double claimed_scale = 1.0 / claimed.privacy_param;
  if (actual_noise > claimed_scale + 1e-12) {
    throw std::invalid_argument(
        "actual noise above the claimed scale is not a violation scenario");
  }

  MechanismSpec flawed = claimed;
  flawed.kind = MechanismKind::kFlawedGaussian;
  flawed.noise_scale_override = actual_noise;
  if (flawed.dimension == 0) flawed.dimension = n;
  flawed.Validate();

  const AuditTranscript transcript =
      RunAudit(flawed, Arrangement::kOneRunMemoryless, n, 0.5, seed);

  FamilySpec family;
  family.family = CurveFamily::kGaussian;
  DetectVerdict verdict;
  verdict.audit = AuditTranscriptResult(transcript, delta, gamma, family,
                                        ci_method);
  verdict.eps_lower = verdict.audit.eps_lower;
  verdict.eps_claimed = FdpToEps(claimed.ClaimedCurve(), delta);
  verdict.violated = verdict.eps_lower > verdict.eps_claimed;
  return verdict;
}

}  // namespace bitaudit
