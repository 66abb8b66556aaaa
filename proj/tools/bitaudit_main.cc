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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bitaudit/bounds.h"
#include "bitaudit/channel.h"
#include "bitaudit/harness.h"
#include "bitaudit/limits.h"
#include "bitaudit/tradeoff.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw bitaudit::ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

// Accepts inline JSON or a path to a JSON file.
nlohmann::json JsonArgument(const std::string& arg) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
    try {
      return nlohmann::json::parse(arg);
    } catch (const nlohmann::json::exception& e) {
      throw bitaudit::ConfigError(std::string("invalid inline JSON: ") +
                                  e.what());
    }
  }
  return ReadJsonFile(arg);
}

void WriteOutput(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload << std::endl;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << payload << '\n';
  if (!out) throw IoError("failed writing " + path);
}

int RunAuditCommand(const std::string& transcript_arg,
                    const std::string& mechanism_arg,
                    const std::string& arrangement_name, int64_t n,
                    uint64_t seed, double delta, double gamma,
                    const std::string& family_name,
                    const std::string& ci_name, bool eq5,
                    const std::string& output) {
  using namespace bitaudit;
  AuditTranscript transcript;
  if (!transcript_arg.empty()) {
    transcript = AuditTranscript::FromJson(JsonArgument(transcript_arg));
  } else if (!mechanism_arg.empty()) {
    const MechanismSpec spec = MechanismSpec::FromJson(JsonArgument(mechanism_arg));
    if (n < 1) throw ConfigError("audit needs --n >= 1 with --mechanism");
    transcript = RunAudit(spec, ArrangementFromName(arrangement_name), n, 0.5,
                          seed);
  } else {
    throw ConfigError("audit needs --transcript or --mechanism");
  }

  FamilySpec family = NaturalFamily(transcript.mechanism);
  if (!family_name.empty()) {
    family.family = CurveFamilyFromName(family_name);
    family.fixed_delta =
        family.family == CurveFamily::kEpsDelta ? delta : 0.0;
  }
  const AuditResult result = AuditTranscriptResult(
      transcript, delta, gamma, family, CiMethodFromName(ci_name));
  nlohmann::json j = result.ToJson();
  if (eq5) {
    j["eq5_baseline"] = MultiRunBaselineLowerBound(transcript, delta, gamma);
  }
  WriteOutput(output, j.dump(2));
  return kExitOk;
}

int RunSweepCommand(const std::string& config_path, const std::string& output,
                    int jobs_override) {
  using namespace bitaudit;
  ExperimentConfig config = ExperimentConfig::FromJson(ReadJsonFile(config_path));
  if (jobs_override > 0) config.jobs = jobs_override;
  const std::vector<SweepRow> rows = RunSweep(config);
  std::ostringstream csv;
  WriteCsv(rows, csv);
  const std::string path = output.empty() ? config.output_path : output;
  WriteOutput(path, csv.str());
  return kExitOk;
}

int RunLimitsCommand(const std::string& curve_arg, double p,
                     const std::string& output) {
  using namespace bitaudit;
  const TradeoffCurve curve = TradeoffCurve::FromJson(JsonArgument(curve_arg));
  const LimitProfile profile = ComputeLimitProfile(curve, p);
  WriteOutput(output, profile.ToJson().dump(2));
  return kExitOk;
}

int RunDetectCommand(double claimed_mu, double actual_sigma, int64_t n,
                     double gamma, double delta, uint64_t seed,
                     const std::string& ci_name, const std::string& output) {
  using namespace bitaudit;
  MechanismSpec claimed;
  claimed.kind = MechanismKind::kGaussianSum;
  claimed.privacy_param = claimed_mu;
  claimed.dimension = n;
  const DetectVerdict verdict = DetectViolation(
      claimed, actual_sigma, n, gamma, delta, seed, CiMethodFromName(ci_name));
  WriteOutput(output, verdict.ToJson().dump(2));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bitaudit: privacy auditing of DP mechanisms as bit transmission"};
  app.require_subcommand(1);

  // audit
  auto* audit = app.add_subcommand(
      "audit", "Audit one transcript or one simulated mechanism run");
  std::string transcript_arg, mechanism_arg, family_name, output;
  std::string arrangement_name = "one_run_memoryless";
  std::string ci_name = "advanced";
  int64_t n = 0;
  uint64_t seed = 0;
  double delta = 1e-5, gamma = 0.95, prior = 0.5;
  bool eq5 = false;
  audit->add_option("--transcript", transcript_arg,
                    "Transcript JSON (file or inline)");
  audit->add_option("--mechanism", mechanism_arg,
                    "Mechanism spec JSON (file or inline)");
  audit->add_option("--arrangement", arrangement_name,
                    "one_run_memoryless | multi_run | one_run_interfering");
  audit->add_option("--n", n, "Number of bits when simulating");
  audit->add_option("--seed", seed, "Simulation seed");
  audit->add_option("--delta", delta, "Target delta");
  audit->add_option("--gamma", gamma, "Confidence level");
  audit->add_option("--family", family_name,
                    "Fit family (defaults to the mechanism's own)");
  audit->add_option("--ci", ci_name, "hoeffding | advanced");
  audit->add_flag("--eq5-baseline", eq5,
                  "Also compute the multi-run Clopper-Pearson baseline");
  audit->add_option("--output,-o", output, "Output path (default stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep to CSV");
  std::string config_path, sweep_output;
  int jobs_override = 0;
  sweep->add_option("--config", config_path, "Experiment config JSON")
      ->required();
  sweep->add_option("--output,-o", sweep_output,
                    "CSV path (overrides config.output_path)");
  sweep->add_option("--jobs", jobs_override, "Worker count cap");

  // limits
  auto* limits = app.add_subcommand(
      "limits", "Information-theoretic limits of a trade-off curve");
  std::string curve_arg, limits_output;
  limits->add_option("--curve", curve_arg, "Curve JSON (file or inline)")
      ->required();
  limits->add_option("--p", prior, "Input bit prior");
  limits->add_option("--output,-o", limits_output, "Output path");

  // detect
  auto* detect = app.add_subcommand(
      "detect", "Flawed Gaussian implementation case study");
  double claimed_mu = 0.8, actual_sigma = 0.125;
  int64_t detect_n = 10000;
  uint64_t detect_seed = 0;
  double detect_gamma = 0.95, detect_delta = 1e-5;
  std::string detect_ci = "hoeffding", detect_output;
  detect->add_option("--claimed-mu", claimed_mu, "Claimed GDP parameter");
  detect->add_option("--actual-sigma", actual_sigma,
                     "Noise scale actually injected");
  detect->add_option("--n", detect_n, "Number of canaries");
  detect->add_option("--gamma", detect_gamma, "Confidence level");
  detect->add_option("--delta", detect_delta, "Target delta");
  detect->add_option("--seed", detect_seed, "Simulation seed");
  detect->add_option("--ci", detect_ci, "hoeffding | advanced");
  detect->add_option("--output,-o", detect_output, "Output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (audit->parsed()) {
      return RunAuditCommand(transcript_arg, mechanism_arg, arrangement_name,
                             n, seed, delta, gamma, family_name, ci_name, eq5,
                             output);
    }
    if (sweep->parsed()) {
      return RunSweepCommand(config_path, sweep_output, jobs_override);
    }
    if (limits->parsed()) {
      return RunLimitsCommand(curve_arg, prior, limits_output);
    }
    if (detect->parsed()) {
      return RunDetectCommand(claimed_mu, actual_sigma, detect_n, detect_gamma,
                              detect_delta, detect_seed, detect_ci,
                              detect_output);
    }
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << std::endl;
    return kExitIoError;
  } catch (const bitaudit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfigError;
  }
  return kExitOk;
}
