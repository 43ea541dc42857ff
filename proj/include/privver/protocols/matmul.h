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

#ifndef PRIVVER_PROTOCOLS_MATMUL_H_
#define PRIVVER_PROTOCOLS_MATMUL_H_

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

#include "privver/common/rng.h"
#include "privver/he/he.h"
#include "privver/kernels/kernels.h"
#include "privver/protocols/channel.h"

namespace privver::protocols {

using kernels::IntMatrix;

// Row-major encrypted matrix under Alice's key.
struct EncryptedMatrix {
  he::PublicKey pk;
  size_t rows = 0;
  size_t cols = 0;
  std::vector<he::Ciphertext> values;

  const he::Ciphertext& at(size_t r, size_t c) const { return values[r * cols + c]; }
};

// Alice sends her public key and [X]; Bob acknowledges once [XY] is formed.
void secure_mat_mul_alice(Channel& ch, const he::KeyPair& keys, const IntMatrix& x, int x_scale_exp,
                          Rng& rng);
// x_abs_bound bounds |X_ij| so Bob can reject products outside the plaintext
// range before computing them.
EncryptedMatrix secure_mat_mul_bob(Channel& ch, const IntMatrix& y, int y_scale_exp,
                                   const mpz_class& x_abs_bound);

// Bob holds [v] and [y] under Alice's additive key and ends with [y^T v].
// The result scale is the sum of the two input scales.
void blinded_inner_product_alice(Channel& ch, const he::KeyPair& keys, std::span<const int64_t> y,
                                 int y_scale_exp, Rng& rng);
he::Ciphertext blinded_inner_product_bob(Channel& ch, const he::PublicKey& pk,
                                         std::span<const he::Ciphertext> v,
                                         std::span<const he::Ciphertext> y, Rng& rng);

}  // namespace privver::protocols

#endif  // PRIVVER_PROTOCOLS_MATMUL_H_
