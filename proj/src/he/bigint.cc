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

#include "privver/he/bigint.h"

#include "privver/common/error.h"

namespace privver::he {

mpz_class RandomPrime(int bits, Rng& rng) {
  if (bits < 8) Fail(ErrorCode::kBadParams, "prime size too small");
  while (true) {
    mpz_class cand = rng.RandomBits(bits);
    mpz_setbit(cand.get_mpz_t(), bits - 1);
    mpz_setbit(cand.get_mpz_t(), 0);
    if (mpz_probab_prime_p(cand.get_mpz_t(), 40) != 0) return cand;
  }
}

mpz_class RandomUnit(const mpz_class& n, Rng& rng) {
  while (true) {
    mpz_class r = rng.UniformMpz(n);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
    if (r != 0 && g == 1) return r;
  }
}

mpz_class Crt(const mpz_class& a, const mpz_class& m1, const mpz_class& b,
              const mpz_class& m2) {
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), m1.get_mpz_t(), m2.get_mpz_t()) == 0) {
    Fail(ErrorCode::kBadParams, "CRT moduli are not coprime");
  }
  mpz_class diff = b - a;
  mpz_class k = diff * inv;
  mpz_fdiv_r(k.get_mpz_t(), k.get_mpz_t(), m2.get_mpz_t());
  mpz_class out = a + k * m1;
  mpz_class mod = m1 * m2;
  mpz_fdiv_r(out.get_mpz_t(), out.get_mpz_t(), mod.get_mpz_t());
  return out;
}

mpz_class PowMod(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  mpz_class out;
  if (exp < 0) {
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), base.get_mpz_t(), mod.get_mpz_t()) == 0) {
      Fail(ErrorCode::kBadParams, "base is not invertible");
    }
    mpz_class pos = -exp;
    mpz_powm(out.get_mpz_t(), inv.get_mpz_t(), pos.get_mpz_t(), mod.get_mpz_t());
  } else {
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  }
  return out;
}

FixedBaseTable::FixedBaseTable(const mpz_class& base, const mpz_class& modulus,
                               int max_exp_bits, int window)
    : base_(base), modulus_(modulus), max_exp_bits_(max_exp_bits), window_(window) {
  const int rows = (max_exp_bits + window - 1) / window;
  const size_t width = size_t{1} << window;
  rows_.resize(rows);
  mpz_class row_base = base % modulus;
  for (int i = 0; i < rows; ++i) {
    auto& row = rows_[i];
    row.resize(width);
    row[0] = 1;
    for (size_t j = 1; j < width; ++j) row[j] = row[j - 1] * row_base % modulus;
    row_base = row[width - 1] * row_base % modulus;
  }
}

mpz_class FixedBaseTable::Pow(const mpz_class& exp) const {
  if (exp < 0 || mpz_sizeinbase(exp.get_mpz_t(), 2) > static_cast<size_t>(max_exp_bits_)) {
    return PowMod(base_, exp, modulus_);
  }
  mpz_class acc = 1;
  const size_t bits = mpz_sizeinbase(exp.get_mpz_t(), 2);
  for (size_t i = 0; i * window_ < bits; ++i) {
    unsigned long digit = 0;
    for (int b = window_ - 1; b >= 0; --b) {
      digit = (digit << 1) | mpz_tstbit(exp.get_mpz_t(), i * window_ + b);
    }
    if (digit != 0) {
      acc *= rows_[i][digit];
      acc %= modulus_;
    }
  }
  return acc;
}

}  // namespace privver::he
