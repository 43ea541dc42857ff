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

#ifndef PRIVVER_KERNELS_KERNELS_H_
#define PRIVVER_KERNELS_KERNELS_H_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "privver/common/rng.h"
#include "privver/he/he.h"

// Batch homomorphic kernels. The serial namespace is the reference; the
// parallel namespace has identical signatures and results. Element i always
// draws from fork i of one split of the caller's RNG, so outputs do not depend
// on the thread count or schedule.
namespace privver::kernels {

// Row-major integer matrix.
struct IntMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<int64_t> values;

  int64_t at(size_t r, size_t c) const { return values[r * cols + c]; }
};

namespace serial {

std::vector<he::Ciphertext> EncryptBatch(const he::PublicKey& pk, std::span<const mpz_class> values,
                                         int scale_exp, Rng& rng);
std::vector<mpz_class> DecryptBatch(const he::SecretKey& sk, std::span<const he::Ciphertext> cts);
// out[r] = sum_c m(r, c) * cts[c].
std::vector<he::Ciphertext> MatVecPlain(const he::PublicKey& pk, const IntMatrix& m,
                                        std::span<const he::Ciphertext> cts, int m_scale_exp);
std::vector<he::Ciphertext> RerandomizeBatch(const he::PublicKey& pk,
                                             std::span<const he::Ciphertext> cts, Rng& rng);

}  // namespace serial

namespace parallel {

std::vector<he::Ciphertext> EncryptBatch(const he::PublicKey& pk, std::span<const mpz_class> values,
                                         int scale_exp, Rng& rng);
std::vector<mpz_class> DecryptBatch(const he::SecretKey& sk, std::span<const he::Ciphertext> cts);
std::vector<he::Ciphertext> MatVecPlain(const he::PublicKey& pk, const IntMatrix& m,
                                        std::span<const he::Ciphertext> cts, int m_scale_exp);
std::vector<he::Ciphertext> RerandomizeBatch(const he::PublicKey& pk,
                                             std::span<const he::Ciphertext> cts, Rng& rng);

}  // namespace parallel

std::vector<mpz_class> ToMpz(std::span<const int64_t> values);

}  // namespace privver::kernels

#endif  // PRIVVER_KERNELS_KERNELS_H_
