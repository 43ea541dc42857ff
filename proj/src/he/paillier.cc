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

#include "privver/he/paillier.h"

#include <mutex>

#include "privver/common/error.h"

namespace privver::paillier {
namespace {

// (x - 1) / m for x = 1 mod m.
mpz_class L(const mpz_class& x, const mpz_class& m) { return (x - 1) / m; }

void CheckRange(const PublicKey& pk, const mpz_class& m) {
  if (abs(m) * 2 >= pk.n) Fail(ErrorCode::kPlaintextOutOfRange, "plaintext outside (-n/2, n/2)");
}

mpz_class Reduce(const mpz_class& v, const mpz_class& m) {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
  return r;
}

}  // namespace

struct PublicKey::Cache {
  std::once_flag once;
  std::unique_ptr<he::FixedBaseTable> table;
};

PublicKey PublicKey::Make(mpz_class n, mpz_class h_s) {
  if (n < 15 || mpz_even_p(n.get_mpz_t())) Fail(ErrorCode::kBadParams, "invalid Paillier modulus");
  PublicKey pk;
  pk.n = std::move(n);
  pk.n_squared = pk.n * pk.n;
  pk.h_s = std::move(h_s);
  pk.alpha_bits = static_cast<int>((mpz_sizeinbase(pk.n.get_mpz_t(), 2) + 1) / 2);
  pk.cache_ = std::make_shared<Cache>();
  return pk;
}

const he::FixedBaseTable& PublicKey::table() const {
  std::call_once(cache_->once, [this] {
    cache_->table = std::make_unique<he::FixedBaseTable>(h_s, n_squared, alpha_bits);
  });
  return *cache_->table;
}

SecretKey SecretKey::Make(const PublicKey& pk, mpz_class p, mpz_class q) {
  if (p * q != pk.n) Fail(ErrorCode::kKeyMismatch, "secret key does not match public key");
  SecretKey sk;
  sk.p = std::move(p);
  sk.q = std::move(q);
  sk.p_squared = sk.p * sk.p;
  sk.q_squared = sk.q * sk.q;
  mpz_class g = pk.n + 1;
  mpz_class gp = he::PowMod(g, sk.p - 1, sk.p_squared);
  mpz_class gq = he::PowMod(g, sk.q - 1, sk.q_squared);
  mpz_class lp = L(gp, sk.p), lq = L(gq, sk.q);
  if (mpz_invert(sk.hp.get_mpz_t(), lp.get_mpz_t(), sk.p.get_mpz_t()) == 0 ||
      mpz_invert(sk.hq.get_mpz_t(), lq.get_mpz_t(), sk.q.get_mpz_t()) == 0) {
    Fail(ErrorCode::kBadParams, "degenerate Paillier key");
  }
  return sk;
}

void KeyGen(int modulus_bits, Rng& rng, PublicKey* pk, SecretKey* sk) {
  if (modulus_bits < 64 || modulus_bits % 2 != 0) {
    Fail(ErrorCode::kBadParams, "Paillier modulus must be an even number of bits >= 64");
  }
  while (true) {
    mpz_class p = he::RandomPrime(modulus_bits / 2, rng);
    mpz_class q = he::RandomPrime(modulus_bits / 2, rng);
    if (p == q) continue;
    mpz_class n = p * q;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) != static_cast<size_t>(modulus_bits)) continue;
    mpz_class phi = (p - 1) * (q - 1);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (g != 1) continue;
    mpz_class x = he::RandomUnit(n, rng);
    mpz_class h = Reduce(-(x * x), n);
    mpz_class n2 = n * n;
    mpz_class h_s = he::PowMod(h, n, n2);
    *pk = PublicKey::Make(n, h_s);
    *sk = SecretKey::Make(*pk, p, q);
    return;
  }
}

namespace {

mpz_class Noise(const PublicKey& pk, Rng& rng) {
  return pk.table().Pow(rng.RandomBits(pk.alpha_bits));
}

}  // namespace

Ciphertext Encrypt(const PublicKey& pk, const mpz_class& m, Rng& rng) {
  CheckRange(pk, m);
  // (1 + n)^m = 1 + m n mod n^2.
  mpz_class gm = Reduce(1 + Reduce(m, pk.n) * pk.n, pk.n_squared);
  return {gm * Noise(pk, rng) % pk.n_squared};
}

mpz_class Decrypt(const PublicKey& pk, const SecretKey& sk, const Ciphertext& ct) {
  if (ct.c <= 0 || ct.c >= pk.n_squared) Fail(ErrorCode::kParseError, "ciphertext out of range");
  mpz_class cp = he::PowMod(ct.c % sk.p_squared, sk.p - 1, sk.p_squared);
  mpz_class cq = he::PowMod(ct.c % sk.q_squared, sk.q - 1, sk.q_squared);
  mpz_class mp = Reduce(L(cp, sk.p) * sk.hp, sk.p);
  mpz_class mq = Reduce(L(cq, sk.q) * sk.hq, sk.q);
  mpz_class m = he::Crt(mp, sk.p, mq, sk.q);
  if (m * 2 > pk.n) m -= pk.n;
  return m;
}

Ciphertext Add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  return {a.c * b.c % pk.n_squared};
}

Ciphertext Negate(const PublicKey& pk, const Ciphertext& a) {
  Ciphertext out;
  if (mpz_invert(out.c.get_mpz_t(), a.c.get_mpz_t(), pk.n_squared.get_mpz_t()) == 0) {
    Fail(ErrorCode::kParseError, "ciphertext is not a unit");
  }
  return out;
}

Ciphertext Sub(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  return Add(pk, a, Negate(pk, b));
}

Ciphertext AddPlain(const PublicKey& pk, const Ciphertext& a, const mpz_class& m) {
  CheckRange(pk, m);
  mpz_class gm = Reduce(1 + Reduce(m, pk.n) * pk.n, pk.n_squared);
  return {a.c * gm % pk.n_squared};
}

Ciphertext MulPlain(const PublicKey& pk, const Ciphertext& a, const mpz_class& k) {
  CheckRange(pk, k);
  return {he::PowMod(a.c, k, pk.n_squared)};
}

Ciphertext Rerandomize(const PublicKey& pk, const Ciphertext& a, Rng& rng) {
  return {a.c * Noise(pk, rng) % pk.n_squared};
}

Ciphertext Dot(const PublicKey& pk, std::span<const Ciphertext* const> cts,
               std::span<const mpz_class> weights) {
  if (cts.size() != weights.size()) Fail(ErrorCode::kDimensionMismatch, "dot product length mismatch");
  mpz_class acc = 1;
  for (size_t i = 0; i < cts.size(); ++i) {
    if (weights[i] == 0) continue;
    acc = acc * MulPlain(pk, *cts[i], weights[i]).c % pk.n_squared;
  }
  return {acc};
}

}  // namespace privver::paillier
