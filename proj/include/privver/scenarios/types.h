/*
 * Copyright 2026 The Privver Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRIVVER_SCENARIOS_TYPES_H_
#define PRIVVER_SCENARIOS_TYPES_H_

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privver/common/bytes.h"
#include "privver/he/he.h"
#include "privver/protocols/channel.h"

namespace privver::scenarios {

enum class ScenarioId : uint8_t {
  kS1Plaintext = 1,
  kS2Additive = 2,
  kS3Leveled = 3,
};

// "s1", "s2", "s3".
const char* ScenarioName(ScenarioId scenario);
ScenarioId ParseScenario(std::string_view name);
ScenarioId ScenarioFromByte(uint8_t v);

// Encrypted resident index under the server's additive key.
struct IdCard {
  he::Ciphertext enc_id;
};

Bytes SerializeIdCard(const IdCard& card);
IdCard ParseIdCard(std::span<const uint8_t> bytes);
void SaveIdCard(const std::string& path, const IdCard& card);
IdCard LoadIdCard(const std::string& path);

// What the server keeps per resident. S1 stores plaintext integers; S2 and S3
// store ciphertexts under the client's key. quad is x'Ax, gx is Gx.
struct RegistrationRecord {
  uint64_t index = 0;
  ScenarioId scenario = ScenarioId::kS1Plaintext;
  he::KeyId client_key_id{};
  int quad_scale = 0;
  int gx_scale = 0;
  mpz_class quad_plain;
  std::vector<mpz_class> gx_plain;
  std::optional<he::Ciphertext> quad;
  std::vector<he::Ciphertext> gx;

  size_t d() const { return scenario == ScenarioId::kS1Plaintext ? gx_plain.size() : gx.size(); }
};

Bytes SerializeRecord(const RegistrationRecord& record);
RegistrationRecord ParseRecord(std::span<const uint8_t> bytes);

// Per-party cost of one stage. compute_seconds excludes time blocked waiting
// for the peer.
struct PartyStats {
  double compute_seconds = 0;
  double wall_seconds = 0;
  size_t messages = 0;
  size_t bytes = 0;
};

PartyStats StatsFor(const protocols::Channel& ch, double wall_seconds);

struct AccessDecision {
  bool granted = false;
  ScenarioId scenario = ScenarioId::kS1Plaintext;
  protocols::SessionTranscript transcript;
  PartyStats stats;
};

}  // namespace privver::scenarios

#endif  // PRIVVER_SCENARIOS_TYPES_H_
