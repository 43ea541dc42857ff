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

#ifndef PRIVVER_PROTOCOLS_CODEC_H_
#define PRIVVER_PROTOCOLS_CODEC_H_

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "privver/common/bytes.h"
#include "privver/common/error.h"
#include "privver/he/he.h"
#include "privver/protocols/channel.h"

// Element encodings shared by the sub-protocols and the scenario messages:
// big integers as 4-byte length + big-endian magnitude + sign byte, vectors
// as a big-endian u32 count followed by the elements, and nested blobs
// (ciphertexts, keys) as a big-endian u32 length followed by the bytes.
namespace privver::protocols {

enum class ProtocolId : uint8_t {
  kDgkCompare = 1,
  kSecureCompare = 2,
  kSecureMatMul = 3,
  kBlindedInnerProduct = 4,
  kLeveledBridge = 5,
};

void WriteBigInt(ByteWriter& w, const mpz_class& v);
mpz_class ReadBigInt(ByteReader& r);

void WriteBytes(ByteWriter& w, std::span<const uint8_t> data);
std::span<const uint8_t> ReadBytes(ByteReader& r);

void WriteCiphertext(ByteWriter& w, const he::Ciphertext& ct);
he::Ciphertext ReadCiphertext(ByteReader& r);
void WriteCiphertexts(ByteWriter& w, std::span<const he::Ciphertext> cts);
// Rejects counts above max_count before allocating.
std::vector<he::Ciphertext> ReadCiphertexts(ByteReader& r, size_t max_count);

void WritePublicKey(ByteWriter& w, const he::PublicKey& pk);
he::PublicKey ReadPublicKey(ByteReader& r);

// SUBPROTOCOL message: u8 protocol id, u8 step, body.
void SendStep(Channel& ch, ProtocolId id, uint8_t step, const Bytes& body);
// Receives the expected step; an ERROR message or any other step aborts.
Bytes ReceiveStep(Channel& ch, ProtocolId id, uint8_t step);

void SendError(Channel& ch, const std::string& text);
// ProtocolAbort carrying the peer's text when m is an ERROR message.
void ThrowIfError(const Message& m);

// Runs f, converting malformed-input failures into ProtocolAbort.
template <typename F>
auto AbortOnMalformed(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::kParseError:
      case ErrorCode::kKeyMismatch:
      case ErrorCode::kScaleMismatch:
      case ErrorCode::kDimensionMismatch:
        Fail(ErrorCode::kProtocolAbort, std::string("malformed message: ") + e.what());
      default:
        throw;
    }
  }
}

}  // namespace privver::protocols

#endif  // PRIVVER_PROTOCOLS_CODEC_H_
