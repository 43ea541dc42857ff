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

#ifndef PRIVVER_PROTOCOLS_COMPARE_H_
#define PRIVVER_PROTOCOLS_COMPARE_H_

#include <gmpxx.h>

#include <functional>
#include <utility>

#include "privver/common/rng.h"
#include "privver/he/he.h"
#include "privver/protocols/channel.h"

namespace privver::protocols {

inline constexpr int kDefaultKappa = 40;
// Bit length for comparing shifted likelihood ratios at the default scales.
inline constexpr int kLrCompareBits = 52;

struct ComparisonParams {
  int l = kLrCompareBits;
  int kappa = kDefaultKappa;

  // l + kappa + 2 must stay below the additive plaintext bit length, and the
  // masked DGK values (at most 3l + 2) below the DGK plaintext modulus.
  void Validate(const he::PublicKey& additive, const he::PublicKey& comparison) const;
};

struct AlicePublicKeys {
  he::PublicKey additive;
  he::PublicKey comparison;
};

// Alice owns both secret keys; Bob only ever sees the public halves.
struct AliceKeys {
  he::KeyPair additive;
  he::KeyPair comparison;

  AlicePublicKeys pub() const { return {additive.pub, comparison.pub}; }
};

// Generates both key pairs; modulus sizes default to the production values.
AliceKeys MakeAliceKeys(Rng& rng, int additive_bits = 2048, int comparison_bits = 2048);

// What Alice observes during dgk_compare, for the view-shape tests.
struct DgkAliceView {
  size_t values = 0;
  size_t zeros = 0;
  std::vector<bool> zero_positions;
};

// Alice holds d, Bob holds c, both in [0, 2^l). Bob ends with [d < c] under
// Alice's additive key; Alice learns nothing about c or the result.
void dgk_compare_alice(Channel& ch, const AliceKeys& keys, const mpz_class& d, int l, Rng& rng,
                       DgkAliceView* view = nullptr);
he::Ciphertext dgk_compare_bob(Channel& ch, const AlicePublicKeys& keys, const mpz_class& c, int l,
                               Rng& rng);

struct SecureCompareAliceView {
  mpz_class z;
};

// Bob's encrypted operands are produced once Alice's public keys arrive.
using CompareInputs = std::function<std::pair<he::Ciphertext, he::Ciphertext>(const AlicePublicKeys&)>;

// Alice obtains t = (a <= b) for Bob's encrypted a, b in [0, 2^l).
bool secure_compare_alice(Channel& ch, const AliceKeys& keys, const ComparisonParams& params,
                          Rng& rng, SecureCompareAliceView* view = nullptr);
void secure_compare_bob(Channel& ch, const ComparisonParams& params, const CompareInputs& inputs,
                        Rng& rng);

}  // namespace privver::protocols

#endif  // PRIVVER_PROTOCOLS_COMPARE_H_
