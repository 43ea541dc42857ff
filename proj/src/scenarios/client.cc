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

#include "privver/scenarios/client.h"

#include <cmath>

#include "privver/common/error.h"
#include "privver/common/timer.h"
#include "privver/encoding/fixed_point.h"
#include "privver/kernels/kernels.h"
#include "privver/protocols/bridge.h"
#include "privver/protocols/codec.h"
#include "privver/protocols/compare.h"
#include "privver/protocols/matmul.h"
#include "wire.h"

namespace privver::scenarios {
namespace {

using protocols::Channel;
using protocols::MessageType;

wire::ServerHello Handshake(Channel& ch, const ClientKeys& keys, wire::Op op) {
  wire::Send(ch, MessageType::kHello, wire::EncodeClientHello({op, keys.scenario}));
  Bytes payload = wire::Expect(ch, MessageType::kHello);
  wire::ServerHello hello = protocols::AbortOnMalformed([&] { return wire::DecodeServerHello(payload); });
  if (hello.scenario != keys.scenario) Fail(ErrorCode::kProtocolAbort, "server runs another scenario");
  if (keys.scenario != ScenarioId::kS1Plaintext && !keys.features) {
    Fail(ErrorCode::kBadParams, "client keys lack a feature key");
  }
  return hello;
}

std::vector<int64_t> EncodeFeatures(const wire::ServerHello& hello, const jointbayes::Vector& x) {
  if (x.size() != hello.d) {
    Fail(ErrorCode::kDimensionMismatch,
         "feature vector has " + std::to_string(x.size()) + " entries, model expects " + std::to_string(hello.d));
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(std::abs(x[i]) <= encoding::kInputRange)) {
      Fail(ErrorCode::kOverflow, "feature " + std::to_string(i) + " outside the supported range");
    }
  }
  return encoding::EncodeVector(hello.scales.feature_codec(), x);
}

std::vector<he::Ciphertext> EncryptAll(const he::PublicKey& pk, std::span<const int64_t> values, int scale,
                                       Rng& rng) {
  std::vector<mpz_class> plain = kernels::ToMpz(values);
  return kernels::parallel::EncryptBatch(pk, plain, scale, rng);
}

}  // namespace

RegistrationResult RegisterClient(Channel& ch, const ClientKeys& keys, const jointbayes::Vector& x, Rng& rng) {
  Stopwatch wall;
  wire::ServerHello hello = Handshake(ch, keys, wire::Op::kRegister);
  const int sf = hello.scales.feature;
  std::vector<int64_t> xi = EncodeFeatures(hello, x);

  ByteWriter req;
  ByteWriter features;
  switch (keys.scenario) {
    case ScenarioId::kS1Plaintext:
      wire::WriteKeys(req, {});
      protocols::WriteCiphertexts(features, EncryptAll(hello.server_key, xi, sf, rng));
      break;
    case ScenarioId::kS2Additive:
      wire::WriteKeys(req, {&keys.features->pub});
      protocols::WriteCiphertexts(features, EncryptAll(keys.features->pub, encoding::KroneckerSelf(xi), 2 * sf, rng));
      break;
    case ScenarioId::kS3Leveled:
      wire::WriteKeys(req, {&keys.features->pub});
      protocols::WriteCiphertexts(features, EncryptAll(keys.features->pub, xi, sf, rng));
      break;
  }
  wire::Send(ch, MessageType::kRegisterReq, req.Take());
  wire::Send(ch, MessageType::kRegisterFeatures, features.Take());
  if (keys.scenario == ScenarioId::kS2Additive) {
    protocols::IntMatrix row{1, xi.size(), xi};
    protocols::secure_mat_mul_alice(ch, *keys.features, row, sf, rng);
  }

  Bytes card_bytes = wire::Expect(ch, MessageType::kIdCard);
  RegistrationResult result;
  result.card = protocols::AbortOnMalformed([&] { return ParseIdCard(card_bytes); });
  result.transcript = ch.transcript();
  result.stats = StatsFor(ch, wall.Seconds());
  return result;
}

AccessDecision VerifyClient(Channel& ch, const ClientKeys& keys, const IdCard& card, const jointbayes::Vector& y,
                            Rng& rng) {
  Stopwatch wall;
  wire::ServerHello hello = Handshake(ch, keys, wire::Op::kVerify);
  const int sf = hello.scales.feature;
  std::vector<int64_t> yi = EncodeFeatures(hello, y);

  ByteWriter req;
  req.Blob(SerializeIdCard(card));
  switch (keys.scenario) {
    case ScenarioId::kS1Plaintext:
      wire::WriteKeys(req, {});
      break;
    case ScenarioId::kS2Additive:
      wire::WriteKeys(req, {&keys.features->pub});
      break;
    case ScenarioId::kS3Leveled:
      wire::WriteKeys(req, {&keys.features->pub, &keys.compare.additive.pub, &keys.compare.comparison.pub});
      break;
  }
  wire::Send(ch, MessageType::kVerifyReq, req.Take());
  wire::Expect(ch, MessageType::kVerifyReq);

  ByteWriter features;
  switch (keys.scenario) {
    case ScenarioId::kS1Plaintext:
      protocols::WriteCiphertexts(features, EncryptAll(hello.server_key, yi, sf, rng));
      break;
    case ScenarioId::kS2Additive:
      protocols::WriteCiphertexts(features, EncryptAll(keys.features->pub, encoding::KroneckerSelf(yi), 2 * sf, rng));
      protocols::WriteCiphertexts(features, EncryptAll(keys.features->pub, yi, sf, rng));
      break;
    case ScenarioId::kS3Leveled:
      protocols::WriteCiphertexts(features, EncryptAll(keys.features->pub, yi, sf, rng));
      break;
  }
  wire::Send(ch, MessageType::kVerifyFeatures, features.Take());

  if (keys.scenario == ScenarioId::kS2Additive) {
    protocols::blinded_inner_product_alice(ch, *keys.features, yi, sf, rng);
  } else if (keys.scenario == ScenarioId::kS3Leveled) {
    protocols::leveled_to_additive_alice(ch, *keys.features, keys.compare, rng);
  }
  const bool granted = protocols::secure_compare_alice(ch, keys.compare, hello.compare, rng);
  // Opens the gate on the server side.
  wire::Send(ch, MessageType::kDecision, {static_cast<uint8_t>(granted ? 1 : 0)});

  AccessDecision decision;
  decision.granted = granted;
  decision.scenario = keys.scenario;
  decision.transcript = ch.transcript();
  decision.stats = StatsFor(ch, wall.Seconds());
  return decision;
}

}  // namespace privver::scenarios
