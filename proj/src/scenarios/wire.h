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

#ifndef PRIVVER_SRC_SCENARIOS_WIRE_H_
#define PRIVVER_SRC_SCENARIOS_WIRE_H_

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "privver/encoding/fixed_point.h"
#include "privver/he/he.h"
#include "privver/protocols/channel.h"
#include "privver/protocols/compare.h"
#include "privver/scenarios/types.h"

namespace privver::scenarios::wire {

enum class Op : uint8_t { kRegister = 1, kVerify = 2 };

struct ClientHello {
  Op op = Op::kRegister;
  ScenarioId scenario = ScenarioId::kS1Plaintext;
};

// Deployment parameters the client needs before encoding anything.
struct ServerHello {
  ScenarioId scenario = ScenarioId::kS1Plaintext;
  int d = 0;
  encoding::LrScales scales;
  protocols::ComparisonParams compare;
  he::PublicKey server_key;
};

Bytes EncodeClientHello(const ClientHello& h);
ClientHello DecodeClientHello(std::span<const uint8_t> bytes);
Bytes EncodeServerHello(const ServerHello& h);
ServerHello DecodeServerHello(std::span<const uint8_t> bytes);

void Send(protocols::Channel& ch, protocols::MessageType type, Bytes payload);
// Receives one message of the given type; a peer ERROR or any other type
// raises ProtocolAbort.
Bytes Expect(protocols::Channel& ch, protocols::MessageType type);

void WriteKeys(ByteWriter& w, const std::vector<const he::PublicKey*>& keys);
std::vector<he::PublicKey> ReadKeys(ByteReader& r);

mpz_class ToMpz(__int128 v);

}  // namespace privver::scenarios::wire

#endif  // PRIVVER_SRC_SCENARIOS_WIRE_H_
