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

#ifndef PRIVVER_HE_BFV_H_
#define PRIVVER_HE_BFV_H_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "privver/common/rng.h"
#include "privver/he/modarith.h"

// RNS variant of the Fan-Vercauteren scheme over Z_Q[X]/(X^n + 1), restricted
// to one ciphertext-ciphertext multiplication. Integers are encrypted as
// constant polynomials, so there is no slot packing. Multiplication follows
// the Halevi-Polyakov-Shoup approach: operands are lifted to an auxiliary
// basis P, tensored in the NTT domain over QP, and scaled by t/Q without
// leaving RNS form.
namespace privver::bfv {

using he::Modulus;
using he::MulConst;
using he::NttTables;
using he::u128;

struct Params {
  size_t n = 8192;
  std::vector<int> q_bits{60, 60, 60};
  // 0 selects the largest prime below 2^51.
  uint64_t t = 0;
  double sigma = 3.2;
};

// Heuristic worst-case noise of a fan-in sum of depth-1 products whose
// operands are fan-in linear combinations with 16-bit weights, compared with
// the decryption bound Q / (2t). Key generation rejects parameter sets where
// the margin is not positive.
struct NoiseEstimate {
  double fresh_bits = 0;
  double product_sum_bits = 0;
  double limit_bits = 0;

  double margin_bits() const { return limit_bits - product_sum_bits; }
};

inline constexpr int kMaxFanIn = 160;
inline constexpr int kWeightBits = 16;

class Context {
 public:
  static std::shared_ptr<const Context> Create(const Params& params);
  // Rebuilds a context from explicit primes (deserialization).
  static std::shared_ptr<const Context> FromPrimes(size_t n, std::vector<uint64_t> q_primes,
                                                   uint64_t t, double sigma);

  size_t n() const { return n_; }
  size_t q_count() const { return q_.size(); }
  size_t p_count() const { return p_.size(); }
  uint64_t t() const { return t_; }
  double sigma() const { return sigma_; }
  const std::vector<Modulus>& q() const { return q_; }
  const std::vector<Modulus>& p() const { return p_; }
  const NttTables& q_ntt(size_t i) const { return q_ntt_[i]; }
  const NttTables& p_ntt(size_t i) const { return p_ntt_[i]; }
  const mpz_class& big_q() const { return big_q_; }
  std::vector<uint64_t> q_primes() const;
  NoiseEstimate EstimateNoise() const;

  struct Impl;
  const Impl& impl() const { return *impl_; }

  Context(size_t n, std::vector<uint64_t> q_primes, uint64_t t, double sigma);
  ~Context();

 private:
  size_t n_;
  uint64_t t_;
  double sigma_;
  std::vector<Modulus> q_;
  std::vector<Modulus> p_;
  std::vector<NttTables> q_ntt_;
  std::vector<NttTables> p_ntt_;
  mpz_class big_q_;
  std::unique_ptr<Impl> impl_;
};

using ContextPtr = std::shared_ptr<const Context>;

// RNS polynomial: residue i occupies [i*n, (i+1)*n).
using RnsPoly = std::vector<uint64_t>;

struct SecretKey {
  ContextPtr ctx;
  std::vector<int8_t> s;
  RnsPoly s_ntt;
};

struct PublicKey {
  ContextPtr ctx;
  RnsPoly pk0_ntt;
  RnsPoly pk1_ntt;
  // One relinearization pair per Q prime (RNS gadget), in NTT form.
  std::vector<RnsPoly> rlk0_ntt;
  std::vector<RnsPoly> rlk1_ntt;
};

// Coefficient-form components over Q; always two after relinearization.
struct Ciphertext {
  size_t n = 0;
  std::vector<RnsPoly> c;
};

void KeyGen(const ContextPtr& ctx, Rng& rng, SecretKey* sk, PublicKey* pk);
// Rebuilds the NTT form after deserialization.
SecretKey MakeSecretKey(const ContextPtr& ctx, std::vector<int8_t> s);

// m must satisfy |m| <= t/2.
Ciphertext Encrypt(const PublicKey& pk, const mpz_class& m, Rng& rng);
// Centered result in (-t/2, t/2].
mpz_class Decrypt(const SecretKey& sk, const Ciphertext& ct);

struct NoiseReport {
  // Remaining bits before decryption fails, measured on every coefficient;
  // capped near 55 by the long double resolution used.
  double budget_bits = 0;
  // False when some non-constant coefficient decodes to a nonzero value.
  bool constant_message = true;
};
NoiseReport InspectNoise(const SecretKey& sk, const Ciphertext& ct);

Ciphertext Add(const Context& ctx, const Ciphertext& a, const Ciphertext& b);
Ciphertext Sub(const Context& ctx, const Ciphertext& a, const Ciphertext& b);
Ciphertext Negate(const Context& ctx, const Ciphertext& a);
Ciphertext AddPlain(const Context& ctx, const Ciphertext& a, const mpz_class& m);
Ciphertext MulPlain(const Context& ctx, const Ciphertext& a, const mpz_class& k);
void AddInPlace(const Context& ctx, Ciphertext& acc, const Ciphertext& b);

// sum_j weights[j] * cts[j] with small signed weights (|w| < 2^31).
Ciphertext LinearCombination(const Context& ctx, std::span<const Ciphertext* const> cts,
                             std::span<const int64_t> weights);

// a * b followed by relinearization.
Ciphertext Multiply(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
// sum_i a[i] * b[i] with one scaling and one relinearization.
Ciphertext InnerProduct(const PublicKey& pk, std::span<const Ciphertext* const> a,
                        std::span<const Ciphertext* const> b);

// Adds a fresh encryption of zero.
Ciphertext Rerandomize(const PublicKey& pk, const Ciphertext& a, Rng& rng);

// Reference helpers exposed for tests.
namespace detail {
// Exact centered conversion of Q-basis residues to the P basis, per coefficient.
void ConvertQToP(const Context& ctx, const uint64_t* in_q, uint64_t* out_p);
// round(t * x / Q) for x given in the QP basis, returned in the Q basis.
void ScaleDown(const Context& ctx, const uint64_t* in_qp, uint64_t* out_q);
}  // namespace detail

}  // namespace privver::bfv

#endif  // PRIVVER_HE_BFV_H_
