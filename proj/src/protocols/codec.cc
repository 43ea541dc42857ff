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

#include "privver/protocols/codec.h"

namespace privver::protocols {

void WriteBigInt(ByteWriter& w, const mpz_class& v) { w.SignedBigInt(v); }
mpz_class ReadBigInt(ByteReader& r) { return r.SignedBigInt(); }

void WriteBytes(ByteWriter& w, std::span<const uint8_t> data) {
  w.U32Be(static_cast<uint32_t>(data.size()));
  w.Raw(data);
}

std::span<const uint8_t> ReadBytes(ByteReader& r) {
  uint32_t n = r.U32Be();
  return r.Raw(n);
}

void WriteCiphertext(ByteWriter& w, const he::Ciphertext& ct) {
  WriteBytes(w, he::SerializeCiphertext(ct));
}

he::Ciphertext ReadCiphertext(ByteReader& r) { return he::ParseCiphertext(ReadBytes(r)); }

void WriteCiphertexts(ByteWriter& w, std::span<const he::Ciphertext> cts) {
  w.U32Be(static_cast<uint32_t>(cts.size()));
  for (const auto& ct : cts) WriteCiphertext(w, ct);
}

std::vector<he::Ciphertext> ReadCiphertexts(ByteReader& r, size_t max_count) {
  uint32_t n = r.U32Be();
  if (n > max_count) Fail(ErrorCode::kParseError, "ciphertext vector too long");
  std::vector<he::Ciphertext> out;
  out.reserve(n);
  for (uint32_t i = 0; i < n; ++i) out.push_back(ReadCiphertext(r));
  return out;
}

void WritePublicKey(ByteWriter& w, const he::PublicKey& pk) {
  WriteBytes(w, he::SerializePublicKey(pk));
}

he::PublicKey ReadPublicKey(ByteReader& r) { return he::ParsePublicKey(ReadBytes(r)); }

void SendStep(Channel& ch, ProtocolId id, uint8_t step, const Bytes& body) {
  Message m;
  m.type = MessageType::kSubprotocol;
  m.payload.reserve(body.size() + 2);
  m.payload.push_back(static_cast<uint8_t>(id));
  m.payload.push_back(step);
  m.payload.insert(m.payload.end(), body.begin(), body.end());
  ch.Send(m);
}

void ThrowIfError(const Message& m) {
  if (m.type == MessageType::kError) {
    Fail(ErrorCode::kProtocolAbort, std::string(m.payload.begin(), m.payload.end()));
  }
}

Bytes ReceiveStep(Channel& ch, ProtocolId id, uint8_t step) {
  Message m = ch.Receive();
  ThrowIfError(m);
  if (m.type != MessageType::kSubprotocol || m.payload.size() < 2 ||
      m.payload[0] != static_cast<uint8_t>(id) || m.payload[1] != step) {
    Fail(ErrorCode::kProtocolAbort, "unexpected message: expected sub-protocol " +
                                        std::to_string(static_cast<int>(id)) + " step " +
                                        std::to_string(step));
  }
  return Bytes(m.payload.begin() + 2, m.payload.end());
}

void SendError(Channel& ch, const std::string& text) {
  Message m;
  m.type = MessageType::kError;
  m.payload.assign(text.begin(), text.end());
  ch.Send(m);
}

}  // namespace privver::protocols
