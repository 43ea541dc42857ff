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

#include <string>

#include "privver/common/error.h"
#include "privver/he/he.h"

namespace privver::he {
namespace {

constexpr std::string_view kPublicMagic = "HEK1";
constexpr std::string_view kSecretMagic = "HES1";
constexpr std::string_view kCiphertextMagic = "HEC1";

SchemeId ReadScheme(ByteReader& r) {
  uint8_t tag = r.U8();
  if (tag < 1 || tag > 3) Fail(ErrorCode::kParseError, "unknown scheme tag " + std::to_string(tag));
  return static_cast<SchemeId>(tag);
}

void WritePoly(ByteWriter& w, const bfv::RnsPoly& poly) {
  for (uint64_t v : poly) w.U64Le(v);
}

bfv::RnsPoly ReadPoly(ByteReader& r, const bfv::Context& ctx, bool check_range = true) {
  bfv::RnsPoly poly(ctx.q_count() * ctx.n());
  for (size_t i = 0; i < ctx.q_count(); ++i) {
    const uint64_t q = ctx.q()[i].value();
    for (size_t c = 0; c < ctx.n(); ++c) {
      uint64_t v = r.U64Le();
      if (check_range && v >= q) Fail(ErrorCode::kParseError, "polynomial residue out of range");
      poly[i * ctx.n() + c] = v;
    }
  }
  return poly;
}

KeyId ReadKeyId(ByteReader& r) {
  KeyId id;
  auto raw = r.Raw(id.size());
  std::copy(raw.begin(), raw.end(), id.begin());
  return id;
}

}  // namespace

Bytes SerializePublicKey(const PublicKey& pk) {
  ByteWriter w;
  w.Raw(kPublicMagic);
  w.U8(static_cast<uint8_t>(pk.scheme));
  switch (pk.scheme) {
    case SchemeId::kAdditive:
      w.MagnitudeBe(pk.additive->n);
      w.MagnitudeBe(pk.additive->h_s);
      break;
    case SchemeId::kLeveled: {
      const bfv::PublicKey& k = *pk.leveled;
      const bfv::Context& ctx = *k.ctx;
      w.U32Le(static_cast<uint32_t>(ctx.n()));
      w.U8(static_cast<uint8_t>(ctx.q_count()));
      for (uint64_t q : ctx.q_primes()) w.U64Le(q);
      w.U64Le(ctx.t());
      w.F64Le(ctx.sigma());
      WritePoly(w, k.pk0_ntt);
      WritePoly(w, k.pk1_ntt);
      w.U8(static_cast<uint8_t>(k.rlk0_ntt.size()));
      for (size_t i = 0; i < k.rlk0_ntt.size(); ++i) {
        WritePoly(w, k.rlk0_ntt[i]);
        WritePoly(w, k.rlk1_ntt[i]);
      }
      break;
    }
    case SchemeId::kComparison:
      w.MagnitudeBe(pk.comparison->n);
      w.MagnitudeBe(pk.comparison->g);
      w.MagnitudeBe(pk.comparison->h);
      w.U64Le(pk.comparison->u);
      w.U32Le(static_cast<uint32_t>(pk.comparison->r_bits));
      break;
  }
  return w.Take();
}

PublicKey ParsePublicKey(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.Expect(kPublicMagic);
  SchemeId scheme = ReadScheme(r);
  PublicKey out;
  switch (scheme) {
    case SchemeId::kAdditive: {
      mpz_class n = r.MagnitudeBe();
      mpz_class h_s = r.MagnitudeBe();
      r.ExpectDone();
      out = WrapPublicKey(paillier::PublicKey::Make(n, h_s));
      break;
    }
    case SchemeId::kLeveled: {
      size_t n = r.U32Le();
      size_t count = r.U8();
      std::vector<uint64_t> primes(count);
      for (auto& q : primes) q = r.U64Le();
      uint64_t t = r.U64Le();
      double sigma = r.F64Le();
      bfv::PublicKey k;
      k.ctx = bfv::Context::FromPrimes(n, primes, t, sigma);
      k.pk0_ntt = ReadPoly(r, *k.ctx);
      k.pk1_ntt = ReadPoly(r, *k.ctx);
      size_t rlk = r.U8();
      if (rlk != count) Fail(ErrorCode::kParseError, "relinearization key count mismatch");
      for (size_t i = 0; i < rlk; ++i) {
        k.rlk0_ntt.push_back(ReadPoly(r, *k.ctx));
        k.rlk1_ntt.push_back(ReadPoly(r, *k.ctx));
      }
      r.ExpectDone();
      out = WrapPublicKey(std::move(k));
      break;
    }
    case SchemeId::kComparison: {
      mpz_class n = r.MagnitudeBe();
      mpz_class g = r.MagnitudeBe();
      mpz_class h = r.MagnitudeBe();
      uint64_t u = r.U64Le();
      int r_bits = static_cast<int>(r.U32Le());
      r.ExpectDone();
      out = WrapPublicKey(dgk::PublicKey::Make(n, g, h, u, r_bits));
      break;
    }
  }
  return out;
}

Bytes SerializeSecretKey(const SecretKey& sk) {
  ByteWriter w;
  w.Raw(kSecretMagic);
  w.U8(static_cast<uint8_t>(sk.scheme));
  w.Raw(sk.key_id);
  switch (sk.scheme) {
    case SchemeId::kAdditive:
      w.MagnitudeBe(sk.additive->p);
      w.MagnitudeBe(sk.additive->q);
      break;
    case SchemeId::kLeveled:
      w.U32Le(static_cast<uint32_t>(sk.leveled->s.size()));
      for (int8_t v : sk.leveled->s) w.I8(v);
      break;
    case SchemeId::kComparison:
      w.MagnitudeBe(sk.comparison->p);
      w.MagnitudeBe(sk.comparison->q);
      w.MagnitudeBe(sk.comparison->v_p);
      w.MagnitudeBe(sk.comparison->v_q);
      break;
  }
  return w.Take();
}

SecretKey ParseSecretKey(std::span<const uint8_t> bytes, const PublicKey& pk) {
  ByteReader r(bytes);
  r.Expect(kSecretMagic);
  SecretKey sk;
  sk.scheme = ReadScheme(r);
  sk.key_id = ReadKeyId(r);
  if (sk.scheme != pk.scheme || sk.key_id != pk.key_id) {
    Fail(ErrorCode::kKeyMismatch, "secret key does not belong to this public key");
  }
  switch (sk.scheme) {
    case SchemeId::kAdditive: {
      mpz_class p = r.MagnitudeBe();
      mpz_class q = r.MagnitudeBe();
      sk.additive = std::make_shared<const paillier::SecretKey>(paillier::SecretKey::Make(*pk.additive, p, q));
      break;
    }
    case SchemeId::kLeveled: {
      size_t n = r.U32Le();
      std::vector<int8_t> s(n);
      for (auto& v : s) v = r.I8();
      sk.leveled = std::make_shared<const bfv::SecretKey>(bfv::MakeSecretKey(pk.leveled->ctx, std::move(s)));
      break;
    }
    case SchemeId::kComparison: {
      auto k = std::make_shared<dgk::SecretKey>();
      k->p = r.MagnitudeBe();
      k->q = r.MagnitudeBe();
      k->v_p = r.MagnitudeBe();
      k->v_q = r.MagnitudeBe();
      if (k->p * k->q != pk.comparison->n) Fail(ErrorCode::kKeyMismatch, "secret key does not match modulus");
      sk.comparison = std::move(k);
      break;
    }
  }
  r.ExpectDone();
  return sk;
}

Bytes SerializeCiphertext(const Ciphertext& ct) {
  ByteWriter w;
  w.Raw(kCiphertextMagic);
  w.U8(static_cast<uint8_t>(ct.scheme));
  w.Raw(ct.key_id);
  w.I8(static_cast<int8_t>(ct.level));
  w.I16Le(static_cast<int16_t>(ct.scale_exp));
  switch (ct.scheme) {
    case SchemeId::kAdditive:
      w.MagnitudeBe(std::get<paillier::Ciphertext>(ct.payload).c);
      break;
    case SchemeId::kComparison:
      w.MagnitudeBe(std::get<dgk::Ciphertext>(ct.payload).c);
      break;
    case SchemeId::kLeveled: {
      const auto& c = std::get<bfv::Ciphertext>(ct.payload);
      if (c.n == 0 || c.c.empty() || c.c[0].size() % c.n != 0) {
        Fail(ErrorCode::kParseError, "malformed leveled ciphertext");
      }
      const uint32_t n = static_cast<uint32_t>(c.n);
      const uint8_t residues = static_cast<uint8_t>(c.c[0].size() / c.n);
      w.U32Le(n);
      w.U8(static_cast<uint8_t>(c.c.size()));
      w.U8(residues);
      for (const auto& poly : c.c) WritePoly(w, poly);
      break;
    }
  }
  return w.Take();
}

Ciphertext ParseCiphertext(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.Expect(kCiphertextMagic);
  Ciphertext ct;
  ct.scheme = ReadScheme(r);
  ct.key_id = ReadKeyId(r);
  ct.level = r.I8();
  ct.scale_exp = r.I16Le();
  if (ct.level < 0 || ct.level > 1) Fail(ErrorCode::kParseError, "ciphertext level out of range");
  switch (ct.scheme) {
    case SchemeId::kAdditive:
      ct.payload = paillier::Ciphertext{r.MagnitudeBe()};
      break;
    case SchemeId::kComparison:
      ct.payload = dgk::Ciphertext{r.MagnitudeBe()};
      break;
    case SchemeId::kLeveled: {
      size_t n = r.U32Le();
      size_t comps = r.U8();
      size_t residues = r.U8();
      if (comps != 2 || residues == 0 || n == 0 || n > 32768) {
        Fail(ErrorCode::kParseError, "malformed leveled ciphertext header");
      }
      if (r.remaining() != comps * residues * n * 8) Fail(ErrorCode::kParseError, "leveled payload length mismatch");
      bfv::Ciphertext c;
      c.n = n;
      c.c.assign(comps, bfv::RnsPoly(residues * n));
      for (auto& poly : c.c) {
        for (auto& v : poly) v = r.U64Le();
      }
      ct.payload = std::move(c);
      break;
    }
  }
  r.ExpectDone();
  return ct;
}

void ValidateCiphertext(const PublicKey& pk, const Ciphertext& ct) {
  CheckKey(pk.key_id, pk.scheme, ct);
  if (ct.level < 0 || ct.level > (pk.scheme == SchemeId::kLeveled ? 1 : 0)) {
    Fail(ErrorCode::kParseError, "ciphertext level out of range");
  }
  switch (pk.scheme) {
    case SchemeId::kAdditive: {
      const auto* c = std::get_if<paillier::Ciphertext>(&ct.payload);
      if (c == nullptr || c->c <= 0 || c->c >= pk.additive->n_squared) {
        Fail(ErrorCode::kParseError, "additive ciphertext out of range");
      }
      break;
    }
    case SchemeId::kComparison: {
      const auto* c = std::get_if<dgk::Ciphertext>(&ct.payload);
      if (c == nullptr || c->c <= 0 || c->c >= pk.comparison->n) {
        Fail(ErrorCode::kParseError, "comparison ciphertext out of range");
      }
      break;
    }
    case SchemeId::kLeveled: {
      const auto* c = std::get_if<bfv::Ciphertext>(&ct.payload);
      const bfv::Context& ctx = *pk.leveled->ctx;
      if (c == nullptr || c->c.size() != 2) Fail(ErrorCode::kParseError, "leveled ciphertext shape");
      for (const auto& poly : c->c) {
        if (poly.size() != ctx.q_count() * ctx.n()) Fail(ErrorCode::kKeyMismatch, "ring shape does not match key");
        for (size_t i = 0; i < ctx.q_count(); ++i) {
          const uint64_t q = ctx.q()[i].value();
          for (size_t k = 0; k < ctx.n(); ++k) {
            if (poly[i * ctx.n() + k] >= q) Fail(ErrorCode::kParseError, "residue out of range");
          }
        }
      }
      break;
    }
  }
}

}  // namespace privver::he
