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

#include "privver/he/he.h"

#include <string>

#include "privver/common/error.h"
#include "privver/common/test_mode.h"

namespace privver::he {

const char* SchemeName(SchemeId scheme) {
  switch (scheme) {
    case SchemeId::kAdditive: return "ADDITIVE";
    case SchemeId::kLeveled: return "LEVELED";
    case SchemeId::kComparison: return "COMPARISON";
  }
  return "UNKNOWN";
}

SchemeParams SchemeParams::Default(SchemeId scheme) {
  SchemeParams p;
  p.scheme = scheme;
  return p;
}

KeyPair keygen(SchemeId scheme, const SchemeParams& params, std::optional<uint64_t> rng_seed) {
  SchemeParams p = params;
  p.scheme = scheme;
  Rng rng = Rng::ForSession(rng_seed, std::string("keygen/") + SchemeName(scheme));
  return keygen(p, rng);
}

KeyPair keygen(const SchemeParams& params, Rng& rng) {
  KeyPair kp;
  kp.scheme = params.scheme;
  kp.params = params;
  switch (params.scheme) {
    case SchemeId::kAdditive: {
      paillier::PublicKey pk;
      paillier::SecretKey sk;
      paillier::KeyGen(params.modulus_bits, rng, &pk, &sk);
      kp.pub = WrapPublicKey(std::move(pk));
      kp.sec.additive = std::make_shared<const paillier::SecretKey>(std::move(sk));
      break;
    }
    case SchemeId::kLeveled: {
      bfv::ContextPtr ctx = bfv::Context::Create(params.leveled);
      bfv::PublicKey pk;
      bfv::SecretKey sk;
      bfv::KeyGen(ctx, rng, &sk, &pk);
      kp.pub = WrapPublicKey(std::move(pk));
      kp.sec.leveled = std::make_shared<const bfv::SecretKey>(std::move(sk));
      break;
    }
    case SchemeId::kComparison: {
      dgk::PublicKey pk;
      dgk::SecretKey sk;
      dgk::KeyGen(params.comparison, rng, &pk, &sk);
      kp.pub = WrapPublicKey(std::move(pk));
      kp.sec.comparison = std::make_shared<const dgk::SecretKey>(std::move(sk));
      break;
    }
    default:
      Fail(ErrorCode::kBadParams, "unknown scheme");
  }
  kp.sec.scheme = kp.scheme;
  kp.sec.key_id = kp.pub.key_id;
  return kp;
}

PublicKey WrapPublicKey(paillier::PublicKey pk) {
  PublicKey out;
  out.scheme = SchemeId::kAdditive;
  out.additive = std::make_shared<const paillier::PublicKey>(std::move(pk));
  out.key_id = Sha256(SerializePublicKey(out));
  return out;
}

PublicKey WrapPublicKey(bfv::PublicKey pk) {
  PublicKey out;
  out.scheme = SchemeId::kLeveled;
  out.leveled = std::make_shared<const bfv::PublicKey>(std::move(pk));
  out.key_id = Sha256(SerializePublicKey(out));
  return out;
}

PublicKey WrapPublicKey(dgk::PublicKey pk) {
  PublicKey out;
  out.scheme = SchemeId::kComparison;
  out.comparison = std::make_shared<const dgk::PublicKey>(std::move(pk));
  out.key_id = Sha256(SerializePublicKey(out));
  return out;
}

mpz_class plaintext_half_range(const PublicKey& pk) {
  switch (pk.scheme) {
    case SchemeId::kAdditive: return (pk.additive->n - 1) / 2;
    case SchemeId::kLeveled: return mpz_class(static_cast<unsigned long>(pk.leveled->ctx->t() / 2));
    case SchemeId::kComparison: return mpz_class(static_cast<unsigned long>(pk.comparison->u / 2));
  }
  Fail(ErrorCode::kBadParams, "unknown scheme");
}

void CheckKey(const KeyId& key_id, SchemeId scheme, const Ciphertext& ct) {
  if (ct.scheme != scheme) Fail(ErrorCode::kKeyMismatch, "ciphertext scheme does not match key");
  if (ct.key_id != key_id) Fail(ErrorCode::kKeyMismatch, "ciphertext was produced under another key");
}

namespace {

template <typename T>
const T& As(const Ciphertext& ct) {
  const T* p = std::get_if<T>(&ct.payload);
  if (p == nullptr) Fail(ErrorCode::kParseError, "ciphertext payload does not match its scheme");
  return *p;
}

void CheckRange(const PublicKey& pk, const mpz_class& m) {
  if (abs(m) > plaintext_half_range(pk)) {
    Fail(ErrorCode::kPlaintextOutOfRange, "plaintext outside the centered range");
  }
}

Ciphertext Derive(const Ciphertext& like, Payload payload, int level, int scale_exp) {
  Ciphertext out;
  out.scheme = like.scheme;
  out.key_id = like.key_id;
  out.level = level;
  out.scale_exp = scale_exp;
  out.payload = std::move(payload);
  return out;
}

void CheckPair(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  CheckKey(pk.key_id, pk.scheme, a);
  CheckKey(pk.key_id, pk.scheme, b);
  if (a.scale_exp != b.scale_exp) {
    Fail(ErrorCode::kScaleMismatch, "operands carry scales 2^" + std::to_string(a.scale_exp) +
                                        " and 2^" + std::to_string(b.scale_exp));
  }
}

}  // namespace

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, Rng& rng, int scale_exp) {
  CheckRange(pk, m);
  Ciphertext ct;
  ct.scheme = pk.scheme;
  ct.key_id = pk.key_id;
  ct.scale_exp = scale_exp;
  switch (pk.scheme) {
    case SchemeId::kAdditive: ct.payload = paillier::Encrypt(*pk.additive, m, rng); break;
    case SchemeId::kLeveled: ct.payload = bfv::Encrypt(*pk.leveled, m, rng); break;
    case SchemeId::kComparison: ct.payload = dgk::Encrypt(*pk.comparison, m.get_si(), rng); break;
  }
  return ct;
}

mpz_class decrypt(const SecretKey& sk, const Ciphertext& ct) {
  CheckKey(sk.key_id, sk.scheme, ct);
  switch (sk.scheme) {
    case SchemeId::kAdditive: {
      if (!sk.additive) Fail(ErrorCode::kKeyMismatch, "missing secret key material");
      paillier::PublicKey pk = paillier::PublicKey::Make(sk.additive->p * sk.additive->q, 1);
      return paillier::Decrypt(pk, *sk.additive, As<paillier::Ciphertext>(ct));
    }
    case SchemeId::kLeveled: {
      const auto& c = As<bfv::Ciphertext>(ct);
      if (TestModeEnabled()) {
        bfv::NoiseReport report = bfv::InspectNoise(*sk.leveled, c);
        if (report.budget_bits <= 1.0 || !report.constant_message) {
          Fail(ErrorCode::kNoiseOverflow, "noise budget exhausted (" +
                                              std::to_string(report.budget_bits) + " bits left)");
        }
      }
      return bfv::Decrypt(*sk.leveled, c);
    }
    case SchemeId::kComparison: {
      Fail(ErrorCode::kBadParams, "comparison ciphertexts support only zero tests");
    }
  }
  Fail(ErrorCode::kBadParams, "unknown scheme");
}

Ciphertext he_add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  CheckPair(pk, a, b);
  int level = std::max(a.level, b.level);
  switch (pk.scheme) {
    case SchemeId::kAdditive:
      return Derive(a, paillier::Add(*pk.additive, As<paillier::Ciphertext>(a), As<paillier::Ciphertext>(b)),
                    level, a.scale_exp);
    case SchemeId::kLeveled:
      return Derive(a, bfv::Add(*pk.leveled->ctx, As<bfv::Ciphertext>(a), As<bfv::Ciphertext>(b)),
                    level, a.scale_exp);
    case SchemeId::kComparison:
      return Derive(a, dgk::Add(*pk.comparison, As<dgk::Ciphertext>(a), As<dgk::Ciphertext>(b)),
                    level, a.scale_exp);
  }
  Fail(ErrorCode::kBadParams, "unknown scheme");
}

Ciphertext he_neg(const PublicKey& pk, const Ciphertext& a) {
  CheckKey(pk.key_id, pk.scheme, a);
  switch (pk.scheme) {
    case SchemeId::kAdditive:
      return Derive(a, paillier::Negate(*pk.additive, As<paillier::Ciphertext>(a)), a.level, a.scale_exp);
    case SchemeId::kLeveled:
      return Derive(a, bfv::Negate(*pk.leveled->ctx, As<bfv::Ciphertext>(a)), a.level, a.scale_exp);
    case SchemeId::kComparison:
      return Derive(a, dgk::MulPlain(*pk.comparison, As<dgk::Ciphertext>(a), -1), a.level, a.scale_exp);
  }
  Fail(ErrorCode::kBadParams, "unknown scheme");
}

Ciphertext he_sub(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  CheckPair(pk, a, b);
  return he_add(pk, a, he_neg(pk, b));
}

Ciphertext he_add_plain(const PublicKey& pk, const Ciphertext& a, const mpz_class& m) {
  CheckKey(pk.key_id, pk.scheme, a);
  CheckRange(pk, m);
  switch (pk.scheme) {
    case SchemeId::kAdditive:
      return Derive(a, paillier::AddPlain(*pk.additive, As<paillier::Ciphertext>(a), m), a.level, a.scale_exp);
    case SchemeId::kLeveled:
      return Derive(a, bfv::AddPlain(*pk.leveled->ctx, As<bfv::Ciphertext>(a), m), a.level, a.scale_exp);
    case SchemeId::kComparison:
      return Derive(a, dgk::AddPlain(*pk.comparison, As<dgk::Ciphertext>(a), m.get_si()), a.level,
                    a.scale_exp);
  }
  Fail(ErrorCode::kBadParams, "unknown scheme");
}

Ciphertext he_mul_plain(const PublicKey& pk, const Ciphertext& a, const mpz_class& k, int k_scale_exp) {
  CheckKey(pk.key_id, pk.scheme, a);
  CheckRange(pk, k);
  const int scale = a.scale_exp + k_scale_exp;
  switch (pk.scheme) {
    case SchemeId::kAdditive:
      return Derive(a, paillier::MulPlain(*pk.additive, As<paillier::Ciphertext>(a), k), a.level, scale);
    case SchemeId::kLeveled:
      return Derive(a, bfv::MulPlain(*pk.leveled->ctx, As<bfv::Ciphertext>(a), k), a.level, scale);
    case SchemeId::kComparison:
      return Derive(a, dgk::MulPlain(*pk.comparison, As<dgk::Ciphertext>(a), k.get_si()), a.level, scale);
  }
  Fail(ErrorCode::kBadParams, "unknown scheme");
}

Ciphertext he_mul(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  const Ciphertext* lhs[] = {&a};
  const Ciphertext* rhs[] = {&b};
  return he_inner_product(pk, lhs, rhs);
}

Ciphertext he_inner_product(const PublicKey& pk, std::span<const Ciphertext* const> a,
                            std::span<const Ciphertext* const> b) {
  if (pk.scheme != SchemeId::kLeveled) {
    Fail(ErrorCode::kDepthExceeded, std::string(SchemeName(pk.scheme)) +
                                        " ciphertexts do not support ciphertext multiplication");
  }
  if (a.size() != b.size() || a.empty()) Fail(ErrorCode::kDimensionMismatch, "inner product length mismatch");
  std::vector<const bfv::Ciphertext*> ca, cb;
  for (size_t i = 0; i < a.size(); ++i) {
    CheckKey(pk.key_id, pk.scheme, *a[i]);
    CheckKey(pk.key_id, pk.scheme, *b[i]);
    if (a[i]->level != 0 || b[i]->level != 0) {
      Fail(ErrorCode::kDepthExceeded, "multiplication input is already at level 1");
    }
    if (a[i]->scale_exp != a[0]->scale_exp || b[i]->scale_exp != b[0]->scale_exp) {
      Fail(ErrorCode::kScaleMismatch, "inner product terms carry different scales");
    }
    ca.push_back(&As<bfv::Ciphertext>(*a[i]));
    cb.push_back(&As<bfv::Ciphertext>(*b[i]));
  }
  return Derive(*a[0], bfv::InnerProduct(*pk.leveled, ca, cb), 1, a[0]->scale_exp + b[0]->scale_exp);
}

Ciphertext rerandomize(const PublicKey& pk, const Ciphertext& a, Rng& rng) {
  CheckKey(pk.key_id, pk.scheme, a);
  switch (pk.scheme) {
    case SchemeId::kAdditive:
      return Derive(a, paillier::Rerandomize(*pk.additive, As<paillier::Ciphertext>(a), rng), a.level,
                    a.scale_exp);
    case SchemeId::kLeveled:
      return Derive(a, bfv::Rerandomize(*pk.leveled, As<bfv::Ciphertext>(a), rng), a.level, a.scale_exp);
    case SchemeId::kComparison:
      return Derive(a, dgk::Rerandomize(*pk.comparison, As<dgk::Ciphertext>(a), rng), a.level, a.scale_exp);
  }
  Fail(ErrorCode::kBadParams, "unknown scheme");
}

Ciphertext he_dot_plain(const PublicKey& pk, std::span<const Ciphertext* const> cts,
                        std::span<const int64_t> k, int k_scale_exp) {
  if (cts.size() != k.size() || cts.empty()) Fail(ErrorCode::kDimensionMismatch, "dot product length mismatch");
  int level = 0;
  for (const Ciphertext* ct : cts) {
    CheckPair(pk, *cts[0], *ct);
    level = std::max(level, ct->level);
  }
  const int scale = cts[0]->scale_exp + k_scale_exp;
  switch (pk.scheme) {
    case SchemeId::kAdditive: {
      std::vector<const paillier::Ciphertext*> p;
      std::vector<mpz_class> w;
      for (size_t i = 0; i < cts.size(); ++i) {
        p.push_back(&As<paillier::Ciphertext>(*cts[i]));
        w.emplace_back(static_cast<long>(k[i]));
      }
      return Derive(*cts[0], paillier::Dot(*pk.additive, p, w), level, scale);
    }
    case SchemeId::kLeveled: {
      std::vector<const bfv::Ciphertext*> p;
      for (const Ciphertext* ct : cts) p.push_back(&As<bfv::Ciphertext>(*ct));
      return Derive(*cts[0], bfv::LinearCombination(*pk.leveled->ctx, p, k), level, scale);
    }
    case SchemeId::kComparison:
      break;
  }
  Fail(ErrorCode::kBadParams, "dot product is not supported for this scheme");
}

}  // namespace privver::he
