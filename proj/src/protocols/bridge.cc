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

#include "privver/protocols/bridge.h"

#include "privver/common/error.h"
#include "privver/protocols/codec.h"

namespace privver::protocols {
namespace {

enum BridgeStep : uint8_t { kBlinded = 1, kReencrypted = 2 };

mpz_class PlainModulus(const he::PublicKey& leveled) { return 2 * he::plaintext_half_range(leveled) + 1; }

int BitLength(const mpz_class& v) { return static_cast<int>(mpz_sizeinbase(v.get_mpz_t(), 2)); }

void CheckLeveled(const he::PublicKey& pk) {
  if (pk.scheme != he::SchemeId::kLeveled) Fail(ErrorCode::kKeyMismatch, "expected a leveled key");
}

}  // namespace

void leveled_to_additive_alice(Channel& ch, const he::KeyPair& leveled, const AliceKeys& keys, Rng& rng) {
  CheckLeveled(leveled.pub);
  const mpz_class t = PlainModulus(leveled.pub);
  Bytes body = ReceiveStep(ch, ProtocolId::kLeveledBridge, kBlinded);
  he::Ciphertext ct = AbortOnMalformed([&] {
    ByteReader r(body);
    he::Ciphertext c = ReadCiphertext(r);
    r.ExpectDone();
    he::ValidateCiphertext(leveled.pub, c);
    return c;
  });
  mpz_class w = he::decrypt(leveled.sec, ct);
  if (w < 0) w += t;
  {
    ByteWriter out;
    WriteCiphertext(out, he::encrypt(keys.additive.pub, w, rng, ct.scale_exp));
    SendStep(ch, ProtocolId::kLeveledBridge, kReencrypted, out.Take());
  }
  dgk_compare_alice(ch, keys, w, BitLength(t), rng);
}

he::Ciphertext leveled_to_additive_bob(Channel& ch, const he::PublicKey& leveled,
                                       const AlicePublicKeys& keys, const he::Ciphertext& ct, Rng& rng) {
  CheckLeveled(leveled);
  he::ValidateCiphertext(leveled, ct);
  const he::PublicKey& apk = keys.additive;
  if (apk.scheme != he::SchemeId::kAdditive) Fail(ErrorCode::kKeyMismatch, "expected an additive key");
  const mpz_class t = PlainModulus(leveled);
  const mpz_class half = t / 2;

  // w = (m + half + r) mod t with m + half in [0, t).
  const mpz_class r = rng.UniformMpz(t);
  mpz_class offset = (half + r) % t;
  if (offset > half) offset -= t;
  {
    ByteWriter w;
    WriteCiphertext(w, he::rerandomize(leveled, he::he_add_plain(leveled, ct, offset), rng));
    SendStep(ch, ProtocolId::kLeveledBridge, kBlinded, w.Take());
  }
  Bytes body = ReceiveStep(ch, ProtocolId::kLeveledBridge, kReencrypted);
  he::Ciphertext w_add = AbortOnMalformed([&] {
    ByteReader rd(body);
    he::Ciphertext c = ReadCiphertext(rd);
    rd.ExpectDone();
    he::ValidateCiphertext(apk, c);
    return c;
  });
  if (w_add.scale_exp != ct.scale_exp) Fail(ErrorCode::kProtocolAbort, "bridge scale changed");

  // The sum m + half + r wrapped past t exactly when w < r.
  he::Ciphertext wrapped = dgk_compare_bob(ch, keys, r, BitLength(t), rng);
  he::Ciphertext m = he::he_add(apk, w_add, he::he_mul_plain(apk, wrapped, t, ct.scale_exp));
  return he::he_add_plain(apk, m, -(r + half));
}

}  // namespace privver::protocols
