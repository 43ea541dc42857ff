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

#ifndef PRIVVER_HE_PAILLIER_H_
#define PRIVVER_HE_PAILLIER_H_

#include <gmpxx.h>

#include <memory>
#include <span>

#include "privver/common/rng.h"
#include "privver/he/bigint.h"

// Paillier with g = n + 1. Encryption randomness is h_s^alpha for
// h_s = (-x^2)^n mod n^2 and a short alpha, which lets one fixed-base table
// serve every encryption.
namespace privver::paillier {

inline constexpr int kDefaultModulusBits = 2048;

struct PublicKey {
  mpz_class n;
  mpz_class n_squared;
  mpz_class h_s;
  int alpha_bits = 0;

  // Lazily built table for h_s; shared between copies.
  const he::FixedBaseTable& table() const;

  static PublicKey Make(mpz_class n, mpz_class h_s);

 private:
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

struct SecretKey {
  mpz_class p;
  mpz_class q;
  // Derived CRT constants.
  mpz_class p_squared, q_squared, hp, hq;

  static SecretKey Make(const PublicKey& pk, mpz_class p, mpz_class q);
};

struct Ciphertext {
  mpz_class c;
};

void KeyGen(int modulus_bits, Rng& rng, PublicKey* pk, SecretKey* sk);

// |m| < n/2; negative values use the centered lift.
Ciphertext Encrypt(const PublicKey& pk, const mpz_class& m, Rng& rng);
// Result in (-n/2, n/2].
mpz_class Decrypt(const PublicKey& pk, const SecretKey& sk, const Ciphertext& ct);

Ciphertext Add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext Sub(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext Negate(const PublicKey& pk, const Ciphertext& a);
Ciphertext AddPlain(const PublicKey& pk, const Ciphertext& a, const mpz_class& m);
Ciphertext MulPlain(const PublicKey& pk, const Ciphertext& a, const mpz_class& k);
Ciphertext Rerandomize(const PublicKey& pk, const Ciphertext& a, Rng& rng);

// prod_i cts[i]^weights[i].
Ciphertext Dot(const PublicKey& pk, std::span<const Ciphertext* const> cts,
               std::span<const mpz_class> weights);

}  // namespace privver::paillier

#endif  // PRIVVER_HE_PAILLIER_H_
