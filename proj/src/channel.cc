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

#include "bitaudit/channel.h"

#include <cmath>
#include <stdexcept>

#include "bitaudit/rng.h"

namespace bitaudit {
namespace {

constexpr char kBase64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

// Bits are packed little-endian within each byte before base64 coding.
std::string BitsToBase64(const std::vector<uint8_t>& bits) {
  std::vector<uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) bytes[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  }
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (size_t i = 0; i < bytes.size(); i += 3) {
    uint32_t chunk = static_cast<uint32_t>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) chunk |= static_cast<uint32_t>(bytes[i + 1]) << 8;
    if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
    out.push_back(kBase64Chars[(chunk >> 18) & 0x3F]);
    out.push_back(kBase64Chars[(chunk >> 12) & 0x3F]);
    out.push_back(i + 1 < bytes.size() ? kBase64Chars[(chunk >> 6) & 0x3F] : '=');
    out.push_back(i + 2 < bytes.size() ? kBase64Chars[chunk & 0x3F] : '=');
  }
  return out;
}

std::vector<uint8_t> BitsFromBase64(const std::string& text, int64_t n_bits) {
  auto decode_char = [](char c) -> uint32_t {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    throw std::invalid_argument("invalid base64 character");
  };
  std::vector<uint8_t> bytes;
  bytes.reserve(text.size() / 4 * 3);
  for (size_t i = 0; i + 3 < text.size(); i += 4) {
    uint32_t chunk = decode_char(text[i]) << 18 | decode_char(text[i + 1]) << 12;
    bytes.push_back((chunk >> 16) & 0xFF);
    if (text[i + 2] != '=') {
      chunk |= decode_char(text[i + 2]) << 6;
      bytes.push_back((chunk >> 8) & 0xFF);
    }
    if (text[i + 3] != '=') {
      chunk |= decode_char(text[i + 3]);
      bytes.push_back(chunk & 0xFF);
    }
  }
  if (static_cast<int64_t>(bytes.size()) * 8 < n_bits) {
    throw std::invalid_argument("base64 bitmap shorter than declared length");
  }
  std::vector<uint8_t> bits(n_bits);
  for (int64_t i = 0; i < n_bits; ++i) {
    bits[i] = (bytes[i / 8] >> (i % 8)) & 1u;
  }
  return bits;
}

void CheckSeedablePrior(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) {
    throw std::domain_error("prior p must be in [0, 1]");
  }
}

double GaussianScale(const MechanismSpec& spec) {
  // sigma = 1/mu makes the unit-l2 canary sum mechanism exactly mu-GDP.
  return 1.0 / spec.privacy_param;
}

Message RunGaussianWithScale(const BitVector& bits, const MechanismSpec& spec,
                             double sigma, uint64_t seed) {
  const int64_t n = bits.size();
  const int64_t d = spec.dimension;
  if (d < n) {
    throw std::invalid_argument(
        "memoryless one-run arrangement needs dimension >= n");
  }
  Message message;
  message.n = n;
  message.dimension = d;
  message.prior_p = bits.prior_p;
  message.reals.resize(d);
  for (int64_t j = 0; j < d; ++j) {
    const double canary =
        j >= n ? 0.0 : (bits.bits[j] ? 1.0 : spec.zero_canary_value);
    message.reals[j] =
        canary + sigma * StreamFor(seed, StreamPurpose::kOneRunNoise, j).NextNormal();
  }
  return message;
}

uint8_t RandomizedResponseSymbol(uint8_t bit, double eps, double delta,
                                 RandomStream stream) {
  // e^eps / (1 + e^eps), written overflow-safe.
  const double keep = (1.0 - delta) / (1.0 + std::exp(-eps));
  const double u = stream.NextUniform();
  if (u < keep) return bit;
  if (u < 1.0 - delta) return static_cast<uint8_t>(1 - bit);
  return static_cast<uint8_t>(2 + bit);
}

}  // namespace

std::string MechanismKindName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kGaussianSum:
      return "gaussian_sum";
    case MechanismKind::kLaplaceSum:
      return "laplace_sum";
    case MechanismKind::kRandomizedResponse:
      return "randomized_response";
    case MechanismKind::kFlawedGaussian:
      return "flawed_gaussian";
  }
  throw std::logic_error("unknown mechanism kind");
}

MechanismKind MechanismKindFromName(const std::string& name) {
  if (name == "gaussian_sum") return MechanismKind::kGaussianSum;
  if (name == "laplace_sum") return MechanismKind::kLaplaceSum;
  if (name == "randomized_response") return MechanismKind::kRandomizedResponse;
  if (name == "flawed_gaussian") return MechanismKind::kFlawedGaussian;
  throw std::invalid_argument("unknown mechanism kind: " + name);
}

std::string ArrangementName(Arrangement arrangement) {
  switch (arrangement) {
    case Arrangement::kOneRunMemoryless:
      return "one_run_memoryless";
    case Arrangement::kMultiRun:
      return "multi_run";
    case Arrangement::kOneRunInterfering:
      return "one_run_interfering";
  }
  throw std::logic_error("unknown arrangement");
}

Arrangement ArrangementFromName(const std::string& name) {
  if (name == "one_run_memoryless") return Arrangement::kOneRunMemoryless;
  if (name == "multi_run") return Arrangement::kMultiRun;
  if (name == "one_run_interfering") return Arrangement::kOneRunInterfering;
  throw std::invalid_argument("unknown arrangement: " + name);
}

void MechanismSpec::Validate() const {
  if (!(privacy_param > 0.0)) {
    throw std::invalid_argument("privacy_param must be positive");
  }
  if (dimension < 0) {
    throw std::invalid_argument("dimension must be >= 1 (or 0 to track n)");
  }
  if (kind == MechanismKind::kRandomizedResponse) {
    if (delta < 0.0 || delta >= 1.0) {
      throw std::invalid_argument("randomized response needs delta in [0, 1)");
    }
  }
  if (kind == MechanismKind::kFlawedGaussian) {
    if (!noise_scale_override.has_value()) {
      throw std::invalid_argument("flawed_gaussian needs noise_scale_override");
    }
    const double claimed_scale = 1.0 / privacy_param;
    if (*noise_scale_override < 0.0 ||
        *noise_scale_override > claimed_scale + 1e-12) {
      throw std::invalid_argument(
          "noise_scale_override must lie in [0, 1/mu]: the implementation "
          "cannot be noisier than claimed and still count as flawed");
    }
  }
  if (zero_canary_value == 1.0) {
    throw std::invalid_argument(
        "replacement canary must differ from the present-bit canary");
  }
  if (zero_canary_value != 0.0 &&
      kind == MechanismKind::kRandomizedResponse) {
    throw std::invalid_argument(
        "randomized response has no replacement canary");
  }
}

TradeoffCurve MechanismSpec::ClaimedCurve() const {
  switch (kind) {
    case MechanismKind::kGaussianSum:
    case MechanismKind::kFlawedGaussian:
      return TradeoffCurve::Gaussian(privacy_param);
    case MechanismKind::kLaplaceSum:
      return TradeoffCurve::Laplace(privacy_param);
    case MechanismKind::kRandomizedResponse:
      return TradeoffCurve::EpsDelta(privacy_param, delta);
  }
  throw std::logic_error("unknown mechanism kind");
}

nlohmann::json MechanismSpec::ToJson() const {
  nlohmann::json j{{"kind", MechanismKindName(kind)},
                   {"privacy_param", privacy_param},
                   {"dimension", dimension}};
  if (kind == MechanismKind::kRandomizedResponse) j["delta"] = delta;
  if (noise_scale_override.has_value()) {
    j["noise_scale_override"] = *noise_scale_override;
  }
  if (zero_canary_value != 0.0) j["zero_canary_value"] = zero_canary_value;
  return j;
}

MechanismSpec MechanismSpec::FromJson(const nlohmann::json& j) {
  MechanismSpec spec;
  spec.kind = MechanismKindFromName(j.at("kind"));
  spec.privacy_param = j.at("privacy_param");
  spec.delta = j.value("delta", 0.0);
  spec.dimension = j.value("dimension", int64_t{0});
  if (j.contains("noise_scale_override")) {
    spec.noise_scale_override = j["noise_scale_override"].get<double>();
  }
  spec.zero_canary_value = j.value("zero_canary_value", 0.0);
  spec.Validate();
  return spec;
}

int64_t AuditTranscript::ErrorCount() const {
  if (guesses.size() != truth.bits.size()) {
    throw std::logic_error("transcript guesses/truth length mismatch");
  }
  int64_t errors = 0;
  for (int64_t i = 0; i < size(); ++i) {
    errors += (guesses[i] != truth.bits[i]) ? 1 : 0;
  }
  return errors;
}

double AuditTranscript::MeanError() const {
  return size() == 0 ? 0.0 : static_cast<double>(ErrorCount()) / size();
}

nlohmann::json AuditTranscript::ToJson() const {
  return nlohmann::json{
      {"mechanism", mechanism.ToJson()},
      {"seed", seed},
      {"arrangement", ArrangementName(arrangement)},
      {"prior_p", truth.prior_p},
      {"truth_bits", BitsToBase64(truth.bits)},
      {"guesses", BitsToBase64(guesses)},
      {"counts", {{"errors", ErrorCount()}, {"n", size()}}}};
}

AuditTranscript AuditTranscript::FromJson(const nlohmann::json& j) {
  AuditTranscript transcript;
  transcript.mechanism = MechanismSpec::FromJson(j.at("mechanism"));
  transcript.seed = j.at("seed");
  transcript.arrangement = ArrangementFromName(j.at("arrangement"));
  const int64_t n = j.at("counts").at("n");
  transcript.truth.prior_p = j.at("prior_p");
  transcript.truth.bits = BitsFromBase64(j.at("truth_bits"), n);
  transcript.guesses = BitsFromBase64(j.at("guesses"), n);
  const int64_t declared_errors = j.at("counts").at("errors");
  if (declared_errors != transcript.ErrorCount()) {
    throw std::invalid_argument("transcript error count does not match bits");
  }
  return transcript;
}

BitVector GenerateBits(int64_t n, double p, uint64_t seed) {
  if (n < 1) throw std::invalid_argument("GenerateBits: n must be >= 1");
  CheckSeedablePrior(p);
  BitVector bits;
  bits.prior_p = p;
  bits.bits.resize(n);
  for (int64_t i = 0; i < n; ++i) {
    bits.bits[i] =
        StreamFor(seed, StreamPurpose::kBits, i).NextBernoulli(p) ? 1 : 0;
  }
  return bits;
}

Message RunOneRunGaussian(const BitVector& bits, const MechanismSpec& spec,
                          uint64_t seed) {
  if (spec.kind != MechanismKind::kGaussianSum) {
    throw std::invalid_argument("RunOneRunGaussian needs kind=gaussian_sum");
  }
  spec.Validate();
  return RunGaussianWithScale(bits, spec, GaussianScale(spec), seed);
}

Message RunFlawedGaussian(const BitVector& bits, const MechanismSpec& spec,
                          uint64_t seed) {
  if (spec.kind != MechanismKind::kFlawedGaussian) {
    throw std::invalid_argument("RunFlawedGaussian needs kind=flawed_gaussian");
  }
  spec.Validate();
  return RunGaussianWithScale(bits, spec, *spec.noise_scale_override, seed);
}

Message RunOneRunLaplace(const BitVector& bits, const MechanismSpec& spec,
                         uint64_t seed) {
  if (spec.kind != MechanismKind::kLaplaceSum) {
    throw std::invalid_argument("RunOneRunLaplace needs kind=laplace_sum");
  }
  spec.Validate();
  const int64_t n = bits.size();
  const int64_t d = spec.dimension;
  if (d < n) {
    throw std::invalid_argument(
        "memoryless one-run arrangement needs dimension >= n");
  }
  const double scale = 1.0 / spec.privacy_param;
  Message message;
  message.n = n;
  message.dimension = d;
  message.prior_p = bits.prior_p;
  message.reals.resize(d);
  for (int64_t j = 0; j < d; ++j) {
    const double canary =
        j >= n ? 0.0 : (bits.bits[j] ? 1.0 : spec.zero_canary_value);
    message.reals[j] =
        canary +
        StreamFor(seed, StreamPurpose::kOneRunNoise, j).NextLaplace(scale);
  }
  return message;
}

Message RunRandomizedResponse(const BitVector& bits, double eps, double delta,
                              uint64_t seed) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("randomized response needs eps > 0");
  }
  // delta = 1 is the degenerate channel that always emits the identifying
  // symbols 2/3; valid here, though audit configs require delta < 1.
  if (delta < 0.0 || delta > 1.0) {
    throw std::invalid_argument("randomized response needs delta in [0, 1]");
  }
  Message message;
  message.n = bits.size();
  message.dimension = bits.size();
  message.prior_p = bits.prior_p;
  message.symbols.resize(bits.size());
  for (int64_t i = 0; i < bits.size(); ++i) {
    message.symbols[i] = RandomizedResponseSymbol(
        bits.bits[i], eps, delta,
        StreamFor(seed, StreamPurpose::kRandResponse, i));
  }
  return message;
}

Message RunMultiRun(const BitVector& bits, const MechanismSpec& spec,
                    uint64_t seed) {
  spec.Validate();
  const int64_t n = bits.size();
  Message message;
  message.n = n;
  message.dimension = spec.dimension == 0 ? 1 : spec.dimension;
  message.prior_p = bits.prior_p;
  switch (spec.kind) {
    case MechanismKind::kGaussianSum:
    case MechanismKind::kFlawedGaussian: {
      const double sigma = spec.kind == MechanismKind::kFlawedGaussian
                               ? *spec.noise_scale_override
                               : GaussianScale(spec);
      message.reals.resize(n);
      for (int64_t i = 0; i < n; ++i) {
        message.reals[i] =
            (bits.bits[i] ? 1.0 : spec.zero_canary_value) +
            sigma *
                StreamFor(seed, StreamPurpose::kMultiRunNoise, i).NextNormal();
      }
      break;
    }
    case MechanismKind::kLaplaceSum: {
      const double scale = 1.0 / spec.privacy_param;
      message.reals.resize(n);
      for (int64_t i = 0; i < n; ++i) {
        message.reals[i] =
            (bits.bits[i] ? 1.0 : spec.zero_canary_value) +
            StreamFor(seed, StreamPurpose::kMultiRunNoise, i).NextLaplace(scale);
      }
      break;
    }
    case MechanismKind::kRandomizedResponse: {
      message.symbols.resize(n);
      for (int64_t i = 0; i < n; ++i) {
        message.symbols[i] = RandomizedResponseSymbol(
            bits.bits[i], spec.privacy_param, spec.delta,
            StreamFor(seed, StreamPurpose::kMultiRunNoise, i));
      }
      break;
    }
  }
  return message;
}

Message RunInterferingGaussian(const BitVector& bits, int64_t d,
                               const MechanismSpec& spec, uint64_t seed) {
  if (spec.kind != MechanismKind::kGaussianSum) {
    throw std::invalid_argument(
        "RunInterferingGaussian needs kind=gaussian_sum");
  }
  spec.Validate();
  if (spec.zero_canary_value != 0.0) {
    throw std::invalid_argument(
        "interfering arrangement only supports the addition/removal null "
        "canary (its decoder offset assumes it)");
  }
  const int64_t n = bits.size();
  if (d < 1 || d > n) {
    throw std::invalid_argument("interfering arrangement needs 1 <= d <= n");
  }
  const double sigma = GaussianScale(spec);
  Message message;
  message.n = n;
  message.dimension = d;
  message.prior_p = bits.prior_p;
  message.reals.resize(d);
  for (int64_t j = 0; j < d; ++j) {
    message.reals[j] =
        sigma * StreamFor(seed, StreamPurpose::kOneRunNoise, j).NextNormal();
  }
  for (int64_t i = 0; i < n; ++i) {
    if (bits.bits[i]) message.reals[i % d] += 1.0;
  }
  return message;
}

std::vector<uint8_t> Decode(const Message& message, Arrangement arrangement,
                            const MechanismSpec& spec) {
  const int64_t n = message.n;
  std::vector<uint8_t> guesses(n);
  if (spec.kind == MechanismKind::kRandomizedResponse) {
    if (static_cast<int64_t>(message.symbols.size()) != n) {
      throw std::invalid_argument("symbol message does not match n");
    }
    for (int64_t i = 0; i < n; ++i) {
      switch (message.symbols[i]) {
        case 0:
        case 1:
          guesses[i] = message.symbols[i];
          break;
        case 2:
          guesses[i] = 0;
          break;
        case 3:
          guesses[i] = 1;
          break;
        default:
          throw std::invalid_argument("invalid randomized-response symbol");
      }
    }
    return guesses;
  }

  if (arrangement == Arrangement::kOneRunInterfering) {
    const int64_t d = message.dimension;
    if (static_cast<int64_t>(message.reals.size()) != d) {
      throw std::invalid_argument("message does not match dimension");
    }
    // Subtract the expected interference before thresholding at 0.5.
    const int64_t per_coord = (n + d - 1) / d;
    const double threshold =
        0.5 + static_cast<double>(per_coord - 1) * message.prior_p;
    for (int64_t i = 0; i < n; ++i) {
      guesses[i] = message.reals[i % d] > threshold ? 1 : 0;
    }
    return guesses;
  }

  if (static_cast<int64_t>(message.reals.size()) < n) {
    throw std::invalid_argument("real message shorter than n");
  }
  for (int64_t i = 0; i < n; ++i) {
    guesses[i] = message.reals[i] > 0.5 ? 1 : 0;
  }
  return guesses;
}

AuditTranscript RunAudit(const MechanismSpec& spec, Arrangement arrangement,
                         int64_t n, double prior_p, uint64_t seed) {
  MechanismSpec effective = spec;
  if (effective.dimension == 0) effective.dimension = n;
  effective.Validate();

  AuditTranscript transcript;
  transcript.truth = GenerateBits(n, prior_p, seed);
  transcript.arrangement = arrangement;
  transcript.mechanism = effective;
  transcript.seed = seed;

  Message message;
  switch (arrangement) {
    case Arrangement::kOneRunMemoryless:
      switch (effective.kind) {
        case MechanismKind::kGaussianSum:
          message = RunOneRunGaussian(transcript.truth, effective, seed);
          break;
        case MechanismKind::kLaplaceSum:
          message = RunOneRunLaplace(transcript.truth, effective, seed);
          break;
        case MechanismKind::kRandomizedResponse:
          message = RunRandomizedResponse(transcript.truth,
                                          effective.privacy_param,
                                          effective.delta, seed);
          break;
        case MechanismKind::kFlawedGaussian:
          message = RunFlawedGaussian(transcript.truth, effective, seed);
          break;
      }
      break;
    case Arrangement::kMultiRun:
      message = RunMultiRun(transcript.truth, effective, seed);
      break;
    case Arrangement::kOneRunInterfering:
      message = RunInterferingGaussian(transcript.truth, effective.dimension,
                                       effective, seed);
      break;
  }
  transcript.guesses = Decode(message, arrangement, effective);
  return transcript;
}

}  // namespace bitaudit
