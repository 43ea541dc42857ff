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

#ifndef PRIVVER_HE_HE_H_
#define PRIVVER_HE_HE_H_

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "privver/common/bytes.h"
#include "privver/common/digest.h"
#include "privver/common/rng.h"
#include "privver/he/bfv.h"
#include "privver/he/dgk.h"
#include "privver/he/paillier.h"

// Scheme-independent evaluation contract over the three backends. Every key
// and ciphertext carries its scheme and the digest of the public key it
// belongs to, and ciphertexts carry multiplicative level and fixed-point
// scale so misuse fails fast.
namespace privver::he {

enum class SchemeId : uint8_t {
  kAdditive = 1,
  kLeveled = 2,
  // Bitwise-comparison encryption used inside the comparison sub-protocol.
  kComparison = 3,
};

const char* SchemeName(SchemeId scheme);

using KeyId = Digest;

struct SchemeParams {
  SchemeId scheme = SchemeId::kAdditive;
  int modulus_bits = paillier::kDefaultModulusBits;
  bfv::Params leveled;
  dgk::Params comparison;

  static SchemeParams Default(SchemeId scheme);
};

struct PublicKey {
  SchemeId scheme = SchemeId::kAdditive;
  KeyId key_id{};
  std::shared_ptr<const paillier::PublicKey> additive;
  std::shared_ptr<const bfv::PublicKey> leveled;
  std::shared_ptr<const dgk::PublicKey> comparison;
};

struct SecretKey {
  SchemeId scheme = SchemeId::kAdditive;
  KeyId key_id{};
  std::shared_ptr<const paillier::SecretKey> additive;
  std::shared_ptr<const bfv::SecretKey> leveled;
  std::shared_ptr<const dgk::SecretKey> comparison;
};

struct KeyPair {
  SchemeId scheme = SchemeId::kAdditive;
  PublicKey pub;
  SecretKey sec;
  SchemeParams params;

  const KeyId& key_id() const { return pub.key_id; }
};

using Payload = std::variant<paillier::Ciphertext, bfv::Ciphertext, dgk::Ciphertext>;

struct Ciphertext {
  SchemeId scheme = SchemeId::kAdditive;
  KeyId key_id{};
  int level = 0;
  int scale_exp = 0;
  Payload payload;
};

// A seed is honored only in test mode; otherwise keys come from the OS RNG.
KeyPair keygen(SchemeId scheme, const SchemeParams& params, std::optional<uint64_t> rng_seed = {});
KeyPair keygen(const SchemeParams& params, Rng& rng);

// Largest magnitude accepted by encrypt (floor of half the plaintext modulus).
mpz_class plaintext_half_range(const PublicKey& pk);

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, Rng& rng, int scale_exp = 0);
// Centered result. In test mode LEVELED decryption also checks the noise
// budget and raises NoiseOverflow when it is exhausted.
mpz_class decrypt(const SecretKey& sk, const Ciphertext& ct);

Ciphertext he_add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext he_sub(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext he_neg(const PublicKey& pk, const Ciphertext& a);
// m must carry the ciphertext's scale.
Ciphertext he_add_plain(const PublicKey& pk, const Ciphertext& a, const mpz_class& m);
// The result scale is a.scale_exp + k_scale_exp.
Ciphertext he_mul_plain(const PublicKey& pk, const Ciphertext& a, const mpz_class& k,
                        int k_scale_exp = 0);
// LEVELED only, both inputs at level 0.
Ciphertext he_mul(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext rerandomize(const PublicKey& pk, const Ciphertext& a, Rng& rng);

// sum_i k[i] * cts[i]; all inputs share one scale, weights share k_scale_exp.
Ciphertext he_dot_plain(const PublicKey& pk, std::span<const Ciphertext* const> cts,
                        std::span<const int64_t> k, int k_scale_exp = 0);
// sum_i a[i] * b[i] with a single relinearization (LEVELED only).
Ciphertext he_inner_product(const PublicKey& pk, std::span<const Ciphertext* const> a,
                            std::span<const Ciphertext* const> b);

// Throws KeyMismatch unless ct belongs to the key with this id.
void CheckKey(const KeyId& key_id, SchemeId scheme, const Ciphertext& ct);
// Full structural check of a received ciphertext against a key: key id,
// level, payload shape and residue ranges. Raises ParseError or KeyMismatch.
void ValidateCiphertext(const PublicKey& pk, const Ciphertext& ct);

// HEK1 / HES1 / HEC1 binary formats.
Bytes SerializePublicKey(const PublicKey& pk);
PublicKey ParsePublicKey(std::span<const uint8_t> bytes);
Bytes SerializeSecretKey(const SecretKey& sk);
// The public key supplies the LEVELED ring context and is checked by key_id.
SecretKey ParseSecretKey(std::span<const uint8_t> bytes, const PublicKey& pk);
Bytes SerializeCiphertext(const Ciphertext& ct);
Ciphertext ParseCiphertext(std::span<const uint8_t> bytes);

// Builds the key_id-bearing wrappers from backend keys.
PublicKey WrapPublicKey(paillier::PublicKey pk);
PublicKey WrapPublicKey(bfv::PublicKey pk);
PublicKey WrapPublicKey(dgk::PublicKey pk);

}  // namespace privver::he

#endif  // PRIVVER_HE_HE_H_
