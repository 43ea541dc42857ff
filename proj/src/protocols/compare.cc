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

#include "privver/protocols/compare.h"

#include <string>
#include <vector>

#include "privver/common/error.h"
#include "privver/protocols/codec.h"

namespace privver::protocols {
namespace {

enum DgkStep : uint8_t { kDgkBits = 1, kDgkMasked = 2, kDgkResult = 3 };
enum CompareStep : uint8_t { kKeys = 1, kBlinded = 2, kTopBit = 3, kCombined = 4, kAck = 5 };

mpz_class Pow2(int bits) {
  mpz_class v = 1;
  v <<= bits;
  return v;
}

bool Bit(const mpz_class& v, int i) { return mpz_tstbit(v.get_mpz_t(), static_cast<mp_bitcnt_t>(i)) != 0; }

void CheckOperand(const mpz_class& v, int l) {
  if (l < 1 || l > 1024) Fail(ErrorCode::kBadParams, "comparison bit length out of range");
  if (v < 0 || v >= Pow2(l)) {
    Fail(ErrorCode::kBitLengthExceeded, "comparison operand exceeds " + std::to_string(l) + " bits");
  }
}

void CheckDgkKey(const he::PublicKey& pk, int l) {
  if (pk.scheme != he::SchemeId::kComparison) Fail(ErrorCode::kKeyMismatch, "expected a comparison key");
  if (static_cast<uint64_t>(3 * l + 3) >= pk.comparison->u) {
    Fail(ErrorCode::kBadParams, "comparison plaintext space too small for l");
  }
}

}  // namespace

void ComparisonParams::Validate(const he::PublicKey& additive, const he::PublicKey& comparison) const {
  if (l < 1 || kappa < 0) Fail(ErrorCode::kBadParams, "invalid comparison parameters");
  if (additive.scheme != he::SchemeId::kAdditive) Fail(ErrorCode::kKeyMismatch, "expected an additive key");
  const size_t bits = mpz_sizeinbase(additive.additive->n.get_mpz_t(), 2);
  // Values must fit in the positive half of Z_n.
  if (static_cast<size_t>(l + kappa + 2) >= bits - 1) {
    Fail(ErrorCode::kBadParams, "l + kappa + 2 exceeds the additive plaintext space");
  }
  CheckDgkKey(comparison, l);
}

AliceKeys MakeAliceKeys(Rng& rng, int additive_bits, int comparison_bits) {
  he::SchemeParams a = he::SchemeParams::Default(he::SchemeId::kAdditive);
  a.modulus_bits = additive_bits;
  he::SchemeParams c = he::SchemeParams::Default(he::SchemeId::kComparison);
  c.comparison.modulus_bits = comparison_bits;
  AliceKeys keys;
  keys.additive = he::keygen(a, rng);
  keys.comparison = he::keygen(c, rng);
  return keys;
}

void dgk_compare_alice(Channel& ch, const AliceKeys& keys, const mpz_class& d, int l, Rng& rng,
                       DgkAliceView* view) {
  CheckOperand(d, l);
  const he::PublicKey& cpk = keys.comparison.pub;
  CheckDgkKey(cpk, l);

  std::vector<mpz_class> bits;
  for (int i = 0; i < l; ++i) bits.emplace_back(Bit(d, i) ? 1 : 0);
  ByteWriter w;
  std::vector<he::Ciphertext> enc;
  enc.reserve(bits.size());
  for (const auto& b : bits) enc.push_back(he::encrypt(cpk, b, rng));
  WriteCiphertexts(w, enc);
  SendStep(ch, ProtocolId::kDgkCompare, kDgkBits, w.Take());

  Bytes masked_bytes = ReceiveStep(ch, ProtocolId::kDgkCompare, kDgkMasked);
  bool zero = false;
  DgkAliceView local;
  AbortOnMalformed([&] {
    ByteReader r(masked_bytes);
    auto masked = ReadCiphertexts(r, static_cast<size_t>(l) + 1);
    r.ExpectDone();
    if (masked.size() != static_cast<size_t>(l) + 1) Fail(ErrorCode::kParseError, "wrong masked count");
    for (const auto& ct : masked) {
      he::ValidateCiphertext(cpk, ct);
      bool z = dgk::IsZero(*keys.comparison.sec.comparison, std::get<dgk::Ciphertext>(ct.payload));
      local.zero_positions.push_back(z);
      local.zeros += z ? 1 : 0;
      zero = zero || z;
    }
    local.values = masked.size();
  });
  if (view != nullptr) *view = local;

  ByteWriter out;
  WriteCiphertext(out, he::encrypt(keys.additive.pub, zero ? 1 : 0, rng));
  SendStep(ch, ProtocolId::kDgkCompare, kDgkResult, out.Take());
}

he::Ciphertext dgk_compare_bob(Channel& ch, const AlicePublicKeys& keys, const mpz_class& c, int l,
                               Rng& rng) {
  CheckOperand(c, l);
  const he::PublicKey& cpk = keys.comparison;
  CheckDgkKey(cpk, l);

  Bytes bits_bytes = ReceiveStep(ch, ProtocolId::kDgkCompare, kDgkBits);
  std::vector<he::Ciphertext> d_bits = AbortOnMalformed([&] {
    ByteReader r(bits_bytes);
    auto cts = ReadCiphertexts(r, static_cast<size_t>(l));
    r.ExpectDone();
    if (cts.size() != static_cast<size_t>(l)) Fail(ErrorCode::kParseError, "wrong bit count");
    for (const auto& ct : cts) he::ValidateCiphertext(cpk, ct);
    return cts;
  });

  // delta = 0 looks for d < c, delta = 1 for d > c; the extra element adds a
  // zero for d == c only when delta = 1, so in both cases the zero count is
  // [d < c] xor delta.
  const int delta = static_cast<int>(rng.Uniform(2));
  const long s = 1 - 2 * delta;
  std::vector<he::Ciphertext> e(static_cast<size_t>(l) + 1);
  he::Ciphertext suffix = he::encrypt(cpk, 0, rng);  // sum_{j>i} d_j xor c_j
  for (int i = l - 1; i >= 0; --i) {
    const long ci = Bit(c, i) ? 1 : 0;
    he::Ciphertext ei = he::he_add(cpk, d_bits[i], he::he_mul_plain(cpk, suffix, 3));
    e[i] = he::he_add_plain(cpk, ei, s - ci);
    he::Ciphertext xor_bit = ci == 0 ? d_bits[i] : he::he_add_plain(cpk, he::he_neg(cpk, d_bits[i]), 1);
    suffix = he::he_add(cpk, suffix, xor_bit);
  }
  e[l] = he::he_add_plain(cpk, he::he_mul_plain(cpk, suffix, 3), 1 - delta);

  const uint64_t u = cpk.comparison->u;
  for (auto& ei : e) {
    // A uniform unit of Z_u, written in centered form.
    long mask = static_cast<long>(1 + rng.Uniform(u - 1));
    if (static_cast<uint64_t>(mask) > u / 2) mask -= static_cast<long>(u);
    ei = he::rerandomize(cpk, he::he_mul_plain(cpk, ei, mask), rng);
  }
  for (size_t i = e.size() - 1; i > 0; --i) std::swap(e[i], e[rng.Uniform(i + 1)]);
  ByteWriter w;
  WriteCiphertexts(w, e);
  SendStep(ch, ProtocolId::kDgkCompare, kDgkMasked, w.Take());

  Bytes result_bytes = ReceiveStep(ch, ProtocolId::kDgkCompare, kDgkResult);
  he::Ciphertext lambda = AbortOnMalformed([&] {
    ByteReader r(result_bytes);
    he::Ciphertext ct = ReadCiphertext(r);
    r.ExpectDone();
    he::ValidateCiphertext(keys.additive, ct);
    return ct;
  });
  if (delta == 0) return lambda;
  return he::he_add_plain(keys.additive, he::he_neg(keys.additive, lambda), 1);
}

bool secure_compare_alice(Channel& ch, const AliceKeys& keys, const ComparisonParams& params,
                          Rng& rng, SecureCompareAliceView* view) {
  const AlicePublicKeys pub = keys.pub();
  params.Validate(pub.additive, pub.comparison);
  const he::PublicKey& apk = pub.additive;
  {
    ByteWriter w;
    WritePublicKey(w, pub.additive);
    WritePublicKey(w, pub.comparison);
    SendStep(ch, ProtocolId::kSecureCompare, kKeys, w.Take());
  }

  Bytes z_bytes = ReceiveStep(ch, ProtocolId::kSecureCompare, kBlinded);
  mpz_class z = AbortOnMalformed([&] {
    ByteReader r(z_bytes);
    he::Ciphertext ct = ReadCiphertext(r);
    r.ExpectDone();
    he::ValidateCiphertext(apk, ct);
    return he::decrypt(keys.additive.sec, ct);
  });
  if (z < 0 || z >= Pow2(params.l + 1) + Pow2(params.l + 1 + params.kappa)) {
    Fail(ErrorCode::kBitLengthExceeded, "blinded comparison value out of range");
  }
  if (view != nullptr) view->z = z;

  const int z_l = Bit(z, params.l) ? 1 : 0;
  {
    ByteWriter w;
    WriteCiphertext(w, he::encrypt(apk, z_l, rng));
    SendStep(ch, ProtocolId::kSecureCompare, kTopBit, w.Take());
  }
  mpz_class d = z;
  mpz_fdiv_r_2exp(d.get_mpz_t(), z.get_mpz_t(), static_cast<mp_bitcnt_t>(params.l));
  dgk_compare_alice(ch, keys, d, params.l, rng);

  Bytes t_bytes = ReceiveStep(ch, ProtocolId::kSecureCompare, kCombined);
  mpz_class v = AbortOnMalformed([&] {
    ByteReader r(t_bytes);
    he::Ciphertext ct = ReadCiphertext(r);
    r.ExpectDone();
    he::ValidateCiphertext(apk, ct);
    return he::decrypt(keys.additive.sec, ct);
  });
  if (v < 0 || v > 2) Fail(ErrorCode::kProtocolAbort, "combined comparison bit out of range");
  SendStep(ch, ProtocolId::kSecureCompare, kAck, {});
  return mpz_odd_p(v.get_mpz_t()) != 0;
}

void secure_compare_bob(Channel& ch, const ComparisonParams& params, const CompareInputs& inputs,
                        Rng& rng) {
  Bytes key_bytes = ReceiveStep(ch, ProtocolId::kSecureCompare, kKeys);
  AlicePublicKeys keys = AbortOnMalformed([&] {
    ByteReader r(key_bytes);
    AlicePublicKeys k{ReadPublicKey(r), ReadPublicKey(r)};
    r.ExpectDone();
    return k;
  });
  params.Validate(keys.additive, keys.comparison);
  const he::PublicKey& apk = keys.additive;
  auto [a, b] = inputs(keys);
  he::ValidateCiphertext(apk, a);
  he::ValidateCiphertext(apk, b);

  // x = b + 2^l - a has bit l set exactly when a <= b.
  he::Ciphertext x = he::he_add_plain(apk, he::he_sub(apk, b, a), Pow2(params.l));
  const mpz_class r = rng.UniformMpz(Pow2(params.l + 1 + params.kappa));
  {
    ByteWriter w;
    WriteCiphertext(w, he::rerandomize(apk, he::he_add_plain(apk, x, r), rng));
    SendStep(ch, ProtocolId::kSecureCompare, kBlinded, w.Take());
  }

  Bytes zl_bytes = ReceiveStep(ch, ProtocolId::kSecureCompare, kTopBit);
  he::Ciphertext z_l = AbortOnMalformed([&] {
    ByteReader rd(zl_bytes);
    he::Ciphertext ct = ReadCiphertext(rd);
    rd.ExpectDone();
    he::ValidateCiphertext(apk, ct);
    return ct;
  });
  mpz_class c = r;
  mpz_fdiv_r_2exp(c.get_mpz_t(), r.get_mpz_t(), static_cast<mp_bitcnt_t>(params.l));
  he::Ciphertext t_prime = dgk_compare_bob(ch, keys, c, params.l, rng);

  // x_l = z_l xor r_l xor t'. Bob folds r_l into t' so Alice's decryption of
  // the sum reveals only bits she can already explain.
  he::Ciphertext folded = Bit(r, params.l) ? he::he_add_plain(apk, he::he_neg(apk, t_prime), 1) : t_prime;
  {
    ByteWriter w;
    WriteCiphertext(w, he::rerandomize(apk, he::he_add(apk, folded, z_l), rng));
    SendStep(ch, ProtocolId::kSecureCompare, kCombined, w.Take());
  }
  ReceiveStep(ch, ProtocolId::kSecureCompare, kAck);
}

}  // namespace privver::protocols
