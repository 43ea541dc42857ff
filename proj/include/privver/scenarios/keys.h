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

#ifndef PRIVVER_SCENARIOS_KEYS_H_
#define PRIVVER_SCENARIOS_KEYS_H_

#include <optional>
#include <string>

#include "privver/common/rng.h"
#include "privver/he/he.h"
#include "privver/protocols/compare.h"
#include "privver/scenarios/types.h"

namespace privver::scenarios {

struct ServerKeys {
  he::KeyPair additive;
};

// features encrypts the client's vectors in S2 (additive) and S3 (leveled).
// compare holds the keys the client uses as Alice in the final comparison; in
// S2 compare.additive is the same key pair as features, in S1 it is an
// ephemeral pair.
struct ClientKeys {
  ScenarioId scenario = ScenarioId::kS1Plaintext;
  std::optional<he::KeyPair> features;
  protocols::AliceKeys compare;
};

struct KeySizes {
  int additive_bits = 2048;
  int comparison_bits = 2048;
  he::SchemeParams leveled = he::SchemeParams::Default(he::SchemeId::kLeveled);
};

ServerKeys GenerateServerKeys(Rng& rng, const KeySizes& sizes = {});
ClientKeys GenerateClientKeys(ScenarioId scenario, Rng& rng, const KeySizes& sizes = {});
// Fresh comparison keys for one S1 verification.
protocols::AliceKeys GenerateEphemeralKeys(Rng& rng, const KeySizes& sizes = {});

Bytes SerializeServerKeys(const ServerKeys& keys);
ServerKeys ParseServerKeys(std::span<const uint8_t> bytes);
Bytes SerializeClientKeys(const ClientKeys& keys);
ClientKeys ParseClientKeys(std::span<const uint8_t> bytes);

void SaveServerKeys(const std::string& path, const ServerKeys& keys);
ServerKeys LoadServerKeys(const std::string& path);
void SaveClientKeys(const std::string& path, const ClientKeys& keys);
ClientKeys LoadClientKeys(const std::string& path);

}  // namespace privver::scenarios

#endif  // PRIVVER_SCENARIOS_KEYS_H_
