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

#include "privver/he/dgk.h"

#include <mutex>
#include <unordered_map>

#include "privver/common/error.h"

namespace privver::dgk {
namespace {

mpz_class Big(uint64_t v) {
  mpz_class out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return out;
}

// Prime p = 2 * u * v * r + 1 of the requested size, for random r.
mpz_class StructuredPrime(int bits, const mpz_class& u, const mpz_class& v, Rng& rng) {
  mpz_class uv2 = 2 * u * v;
  const int r_bits = bits - static_cast<int>(mpz_sizeinbase(uv2.get_mpz_t(), 2));
  if (r_bits < 16) Fail(ErrorCode::kBadParams, "DGK modulus too small for u and v");
  while (true) {
    mpz_class r = rng.RandomBits(r_bits);
    mpz_setbit(r.get_mpz_t(), r_bits - 1);
    mpz_class p = uv2 * r + 1;
    if (mpz_sizeinbase(p.get_mpz_t(), 2) != static_cast<size_t>(bits)) continue;
    if (mpz_probab_prime_p(p.get_mpz_t(), 40) != 0) return p;
  }
}

// Element of Z_p^* of order exactly `order` (a product of the given primes).
mpz_class ElementOfOrder(const mpz_class& p, const std::vector<mpz_class>& factors, Rng& rng) {
  mpz_class order = 1;
  for (const auto& f : factors) order *= f;
  const mpz_class cofactor = (p - 1) / order;
  while (true) {
    mpz_class x = he::RandomUnit(p, rng);
    mpz_class e = he::PowMod(x, cofactor, p);
    bool exact = true;
    for (const auto& f : factors) exact = exact && he::PowMod(e, order / f, p) != 1;
    if (exact) return e;
  }
}

}  // namespace

struct PublicKey::Cache {
  std::once_flag once;
  std::unique_ptr<he::FixedBaseTable> h_table;
};

PublicKey PublicKey::Make(mpz_class n, mpz_class g, mpz_class h, uint64_t u, int r_bits) {
  if (u < 3 || n <= 0 || r_bits <= 0) Fail(ErrorCode::kBadParams, "invalid DGK public key");
  PublicKey pk;
  pk.n = std::move(n);
  pk.g = std::move(g);
  pk.h = std::move(h);
  pk.u = u;
  pk.r_bits = r_bits;
  pk.cache_ = std::make_shared<Cache>();
  return pk;
}

const he::FixedBaseTable& PublicKey::h_table() const {
  std::call_once(cache_->once, [this] {
    cache_->h_table = std::make_unique<he::FixedBaseTable>(h, n, r_bits);
  });
  return *cache_->h_table;
}

void KeyGen(const Params& params, Rng& rng, PublicKey* pk, SecretKey* sk) {
  if (params.modulus_bits < 256 || params.modulus_bits % 2 != 0 || params.v_bits < 16 ||
      mpz_probab_prime_p(Big(params.u).get_mpz_t(), 40) == 0) {
    Fail(ErrorCode::kBadParams, "invalid DGK parameters");
  }
  const mpz_class u = Big(params.u);
  mpz_class v_p = he::RandomPrime(params.v_bits, rng);
  mpz_class v_q = he::RandomPrime(params.v_bits, rng);
  while (v_q == v_p) v_q = he::RandomPrime(params.v_bits, rng);
  const int half = params.modulus_bits / 2;
  mpz_class p = StructuredPrime(half, u, v_p, rng);
  mpz_class q = StructuredPrime(half, u, v_q, rng);
  while (q == p) q = StructuredPrime(half, u, v_q, rng);
  mpz_class n = p * q;
  // g has order u * v_p mod p and u * v_q mod q; h has order v_p and v_q.
  mpz_class g = he::Crt(ElementOfOrder(p, {u, v_p}, rng), p, ElementOfOrder(q, {u, v_q}, rng), q);
  mpz_class h = he::Crt(ElementOfOrder(p, {v_p}, rng), p, ElementOfOrder(q, {v_q}, rng), q);
  *pk = PublicKey::Make(n, g, h, params.u, params.r_bits);
  sk->p = p;
  sk->q = q;
  sk->v_p = v_p;
  sk->v_q = v_q;
}

namespace {

mpz_class GPow(const PublicKey& pk, int64_t m) {
  int64_t r = m % static_cast<int64_t>(pk.u);
  if (r < 0) r += static_cast<int64_t>(pk.u);
  return he::PowMod(pk.g, static_cast<unsigned long>(r), pk.n);
}

}  // namespace

Ciphertext Encrypt(const PublicKey& pk, int64_t m, Rng& rng) {
  mpz_class noise = pk.h_table().Pow(rng.RandomBits(pk.r_bits));
  return {GPow(pk, m) * noise % pk.n};
}

bool IsZero(const SecretKey& sk, const Ciphertext& ct) {
  return he::PowMod(ct.c % sk.p, sk.v_p, sk.p) == 1;
}

uint64_t Decrypt(const PublicKey& pk, const SecretKey& sk, const Ciphertext& ct) {
  // c^{v_p} = (g^{v_p})^m mod p; baby-step giant-step over Z_u.
  const mpz_class base = he::PowMod(pk.g % sk.p, sk.v_p, sk.p);
  const mpz_class target = he::PowMod(ct.c % sk.p, sk.v_p, sk.p);
  uint64_t step = 1;
  while (step * step < pk.u) ++step;
  std::unordered_map<std::string, uint64_t> baby;
  mpz_class cur = 1;
  for (uint64_t j = 0; j < step; ++j) {
    baby.emplace(cur.get_str(16), j);
    cur = cur * base % sk.p;
  }
  mpz_class giant = he::PowMod(base, -mpz_class(static_cast<unsigned long>(step)), sk.p);
  mpz_class gamma = target;
  for (uint64_t i = 0; i <= step; ++i) {
    auto it = baby.find(gamma.get_str(16));
    if (it != baby.end()) return (i * step + it->second) % pk.u;
    gamma = gamma * giant % sk.p;
  }
  Fail(ErrorCode::kParseError, "DGK ciphertext is not in the message subgroup");
}

Ciphertext Add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  return {a.c * b.c % pk.n};
}

Ciphertext AddPlain(const PublicKey& pk, const Ciphertext& a, int64_t m) {
  return {a.c * GPow(pk, m) % pk.n};
}

Ciphertext MulPlain(const PublicKey& pk, const Ciphertext& a, int64_t k) {
  int64_t r = k % static_cast<int64_t>(pk.u);
  if (r < 0) r += static_cast<int64_t>(pk.u);
  return {he::PowMod(a.c, static_cast<unsigned long>(r), pk.n)};
}

Ciphertext Rerandomize(const PublicKey& pk, const Ciphertext& a, Rng& rng) {
  return {a.c * pk.h_table().Pow(rng.RandomBits(pk.r_bits)) % pk.n};
}

}  // namespace privver::dgk
