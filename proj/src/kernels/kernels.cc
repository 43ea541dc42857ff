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

#include "privver/kernels/kernels.h"

#include <exception>

#include "privver/common/error.h"

namespace privver::kernels {
namespace {

std::vector<const he::Ciphertext*> Pointers(std::span<const he::Ciphertext> cts) {
  std::vector<const he::Ciphertext*> out;
  out.reserve(cts.size());
  for (const auto& c : cts) out.push_back(&c);
  return out;
}

void CheckShape(const IntMatrix& m, size_t n) {
  if (m.cols != n || m.values.size() != m.rows * m.cols) {
    Fail(ErrorCode::kDimensionMismatch, "matrix columns do not match the ciphertext vector");
  }
}

he::Ciphertext Row(const he::PublicKey& pk, const IntMatrix& m, size_t r,
                   const std::vector<const he::Ciphertext*>& ptrs, int m_scale_exp) {
  std::span<const int64_t> weights(m.values.data() + r * m.cols, m.cols);
  return he::he_dot_plain(pk, ptrs, weights, m_scale_exp);
}

// Runs body(i) for i in [0, n) across threads; the first exception is rethrown.
template <typename Body>
void ParallelFor(size_t n, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(privver_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<mpz_class> ToMpz(std::span<const int64_t> values) {
  std::vector<mpz_class> out;
  out.reserve(values.size());
  for (int64_t v : values) out.emplace_back(static_cast<long>(v));
  return out;
}

namespace serial {

std::vector<he::Ciphertext> EncryptBatch(const he::PublicKey& pk, std::span<const mpz_class> values,
                                         int scale_exp, Rng& rng) {
  Rng base = rng.Split();
  std::vector<he::Ciphertext> out;
  out.reserve(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    Rng local = base.Fork(i);
    out.push_back(he::encrypt(pk, values[i], local, scale_exp));
  }
  return out;
}

std::vector<mpz_class> DecryptBatch(const he::SecretKey& sk, std::span<const he::Ciphertext> cts) {
  std::vector<mpz_class> out;
  out.reserve(cts.size());
  for (const auto& c : cts) out.push_back(he::decrypt(sk, c));
  return out;
}

std::vector<he::Ciphertext> MatVecPlain(const he::PublicKey& pk, const IntMatrix& m,
                                        std::span<const he::Ciphertext> cts, int m_scale_exp) {
  CheckShape(m, cts.size());
  auto ptrs = Pointers(cts);
  std::vector<he::Ciphertext> out;
  out.reserve(m.rows);
  for (size_t r = 0; r < m.rows; ++r) out.push_back(Row(pk, m, r, ptrs, m_scale_exp));
  return out;
}

std::vector<he::Ciphertext> RerandomizeBatch(const he::PublicKey& pk,
                                             std::span<const he::Ciphertext> cts, Rng& rng) {
  Rng base = rng.Split();
  std::vector<he::Ciphertext> out;
  out.reserve(cts.size());
  for (size_t i = 0; i < cts.size(); ++i) {
    Rng local = base.Fork(i);
    out.push_back(he::rerandomize(pk, cts[i], local));
  }
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<he::Ciphertext> EncryptBatch(const he::PublicKey& pk, std::span<const mpz_class> values,
                                         int scale_exp, Rng& rng) {
  Rng base = rng.Split();
  std::vector<he::Ciphertext> out(values.size());
  ParallelFor(values.size(), [&](size_t i) {
    Rng local = base.Fork(i);
    out[i] = he::encrypt(pk, values[i], local, scale_exp);
  });
  return out;
}

std::vector<mpz_class> DecryptBatch(const he::SecretKey& sk, std::span<const he::Ciphertext> cts) {
  std::vector<mpz_class> out(cts.size());
  ParallelFor(cts.size(), [&](size_t i) { out[i] = he::decrypt(sk, cts[i]); });
  return out;
}

std::vector<he::Ciphertext> MatVecPlain(const he::PublicKey& pk, const IntMatrix& m,
                                        std::span<const he::Ciphertext> cts, int m_scale_exp) {
  CheckShape(m, cts.size());
  auto ptrs = Pointers(cts);
  std::vector<he::Ciphertext> out(m.rows);
  ParallelFor(m.rows, [&](size_t r) { out[r] = Row(pk, m, r, ptrs, m_scale_exp); });
  return out;
}

std::vector<he::Ciphertext> RerandomizeBatch(const he::PublicKey& pk,
                                             std::span<const he::Ciphertext> cts, Rng& rng) {
  Rng base = rng.Split();
  std::vector<he::Ciphertext> out(cts.size());
  ParallelFor(cts.size(), [&](size_t i) {
    Rng local = base.Fork(i);
    out[i] = he::rerandomize(pk, cts[i], local);
  });
  return out;
}

}  // namespace parallel
}  // namespace privver::kernels
