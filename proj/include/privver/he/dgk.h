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

#ifndef PRIVVER_HE_DGK_H_
#define PRIVVER_HE_DGK_H_

#include <gmpxx.h>

#include <cstdint>
#include <memory>

#include "privver/common/rng.h"
#include "privver/he/bigint.h"

// Damgard-Geisler-Kroigaard encryption: c = g^m h^r mod n with a small
// plaintext space Z_u. The secret key holder can test c for m = 0 with one
// short exponentiation, which is all the bitwise comparison needs.
namespace privver::dgk {

struct Params {
  int modulus_bits = 2048;
  uint64_t u = 65537;
  int v_bits = 160;
  // Randomizer length; 2.5 * v_bits as in the original construction.
  int r_bits = 400;
};

struct PublicKey {
  mpz_class n;
  mpz_class g;
  mpz_class h;
  uint64_t u = 0;
  int r_bits = 0;

  const he::FixedBaseTable& h_table() const;
  static PublicKey Make(mpz_class n, mpz_class g, mpz_class h, uint64_t u, int r_bits);

 private:
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

struct SecretKey {
  mpz_class p;
  mpz_class q;
  mpz_class v_p;
  mpz_class v_q;
};

struct Ciphertext {
  mpz_class c;
};

void KeyGen(const Params& params, Rng& rng, PublicKey* pk, SecretKey* sk);

// m is reduced mod u.
Ciphertext Encrypt(const PublicKey& pk, int64_t m, Rng& rng);
bool IsZero(const SecretKey& sk, const Ciphertext& ct);
// Full decryption by discrete log in the order-u subgroup; for tests.
uint64_t Decrypt(const PublicKey& pk, const SecretKey& sk, const Ciphertext& ct);

Ciphertext Add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext AddPlain(const PublicKey& pk, const Ciphertext& a, int64_t m);
Ciphertext MulPlain(const PublicKey& pk, const Ciphertext& a, int64_t k);
Ciphertext Rerandomize(const PublicKey& pk, const Ciphertext& a, Rng& rng);

}  // namespace privver::dgk

#endif  // PRIVVER_HE_DGK_H_
