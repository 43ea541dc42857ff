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

#include "wire.h"

#include "privver/common/error.h"
#include "privver/protocols/codec.h"

namespace privver::scenarios::wire {

using protocols::MessageType;

Bytes EncodeClientHello(const ClientHello& h) {
  return {static_cast<uint8_t>(h.op), static_cast<uint8_t>(h.scenario)};
}

ClientHello DecodeClientHello(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  ClientHello h;
  const uint8_t op = r.U8();
  if (op != 1 && op != 2) Fail(ErrorCode::kParseError, "unknown session operation");
  h.op = static_cast<Op>(op);
  h.scenario = ScenarioFromByte(r.U8());
  r.ExpectDone();
  return h;
}

Bytes EncodeServerHello(const ServerHello& h) {
  ByteWriter w;
  w.U8(static_cast<uint8_t>(h.scenario));
  w.U32Be(static_cast<uint32_t>(h.d));
  w.I16Le(static_cast<int16_t>(h.scales.feature));
  w.I16Le(static_cast<int16_t>(h.scales.matrix));
  w.U16Le(static_cast<uint16_t>(h.compare.l));
  w.U16Le(static_cast<uint16_t>(h.compare.kappa));
  protocols::WritePublicKey(w, h.server_key);
  return w.Take();
}

ServerHello DecodeServerHello(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  ServerHello h;
  h.scenario = ScenarioFromByte(r.U8());
  h.d = static_cast<int>(r.U32Be());
  h.scales.feature = r.I16Le();
  h.scales.matrix = r.I16Le();
  h.compare.l = r.U16Le();
  h.compare.kappa = r.U16Le();
  h.server_key = protocols::ReadPublicKey(r);
  r.ExpectDone();
  if (h.d < 1 || h.d > (1 << 12)) Fail(ErrorCode::kParseError, "server announced a bad dimension");
  if (h.server_key.scheme != he::SchemeId::kAdditive) Fail(ErrorCode::kParseError, "server key must be additive");
  return h;
}

void Send(protocols::Channel& ch, MessageType type, Bytes payload) { ch.Send({type, std::move(payload)}); }

Bytes Expect(protocols::Channel& ch, MessageType type) {
  protocols::Message m = ch.Receive();
  protocols::ThrowIfError(m);
  if (m.type != type) {
    Fail(ErrorCode::kProtocolAbort, std::string("expected ") + protocols::MessageTypeName(type) + ", got " +
                                        protocols::MessageTypeName(m.type));
  }
  return std::move(m.payload);
}

void WriteKeys(ByteWriter& w, const std::vector<const he::PublicKey*>& keys) {
  w.U8(static_cast<uint8_t>(keys.size()));
  for (const he::PublicKey* k : keys) protocols::WritePublicKey(w, *k);
}

std::vector<he::PublicKey> ReadKeys(ByteReader& r) {
  const uint8_t n = r.U8();
  if (n > 3) Fail(ErrorCode::kParseError, "too many keys");
  std::vector<he::PublicKey> keys;
  for (uint8_t i = 0; i < n; ++i) keys.push_back(protocols::ReadPublicKey(r));
  return keys;
}

mpz_class ToMpz(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 mag = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  mpz_class hi = static_cast<unsigned long>(static_cast<uint64_t>(mag >> 64));
  mpz_class out = (hi << 64) + mpz_class(static_cast<unsigned long>(static_cast<uint64_t>(mag)));
  return neg ? mpz_class(-out) : out;
}

}  // namespace privver::scenarios::wire
