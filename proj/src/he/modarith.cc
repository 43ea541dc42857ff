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

#include "privver/he/modarith.h"

#include <gmpxx.h>

#include <algorithm>

#include "privver/common/error.h"

namespace privver::he {
namespace {

size_t BitReverse(size_t x, int bits) {
  size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

}  // namespace

Modulus::Modulus(uint64_t value) : value_(value) {
  if (value < 2 || value >= (uint64_t{1} << 62)) {
    Fail(ErrorCode::kBadParams, "modulus must lie in [2, 2^62)");
  }
  // floor(2^128 / q), split into two words.
  u128 hi_part = (~static_cast<u128>(0)) / value;
  // (2^128 - 1) / q equals floor(2^128 / q) unless q divides 2^128, which
  // cannot happen for odd q; even q is rejected by the callers needing it.
  ratio_hi_ = static_cast<uint64_t>(hi_part >> 64);
  ratio_lo_ = static_cast<uint64_t>(hi_part);
}

uint64_t Modulus::Pow(uint64_t base, uint64_t exp) const {
  uint64_t result = 1 % value_;
  base %= value_;
  while (exp > 0) {
    if (exp & 1) result = Mul(result, base);
    base = Mul(base, base);
    exp >>= 1;
  }
  return result;
}

uint64_t Modulus::Inverse(uint64_t a) const {
  mpz_class x(static_cast<unsigned long>(a % value_));
  mpz_class m(static_cast<unsigned long>(value_));
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()) == 0) {
    Fail(ErrorCode::kBadParams, "value has no modular inverse");
  }
  return inv.get_ui();
}

NttTables::NttTables(size_t n, const Modulus& q) : n_(n), q_(q) {
  if (n < 2 || (n & (n - 1)) != 0) Fail(ErrorCode::kBadParams, "ring degree must be a power of two");
  const uint64_t p = q.value();
  if ((p - 1) % (2 * n) != 0) Fail(ErrorCode::kBadParams, "modulus is not NTT friendly");
  int log_n = 0;
  while ((size_t{1} << log_n) < n) ++log_n;
  // Primitive 2n-th root of unity: psi^n == -1.
  uint64_t psi = 0;
  for (uint64_t g = 2; g < p; ++g) {
    uint64_t cand = q.Pow(g, (p - 1) / (2 * n));
    if (q.Pow(cand, n) == p - 1) {
      psi = cand;
      break;
    }
  }
  if (psi == 0) Fail(ErrorCode::kBadParams, "no primitive root found");
  uint64_t inv_psi = q.Inverse(psi);
  psi_rev_.resize(n);
  inv_psi_rev_.resize(n);
  uint64_t pw = 1;
  uint64_t ipw = 1;
  for (size_t i = 0; i < n; ++i) {
    size_t r = BitReverse(i, log_n);
    psi_rev_[r] = MulConst(pw, p);
    inv_psi_rev_[r] = MulConst(ipw, p);
    pw = q.Mul(pw, psi);
    ipw = q.Mul(ipw, inv_psi);
  }
  n_inv_ = MulConst(q.Inverse(n), p);
}

void NttTables::Forward(uint64_t* a) const {
  const uint64_t p = q_.value();
  size_t t = n_;
  for (size_t m = 1; m < n_; m <<= 1) {
    t >>= 1;
    for (size_t i = 0; i < m; ++i) {
      const MulConst& w = psi_rev_[m + i];
      uint64_t* x = a + 2 * i * t;
      uint64_t* y = x + t;
      for (size_t j = 0; j < t; ++j) {
        uint64_t u = x[j];
        uint64_t v = w.Apply(y[j], p);
        uint64_t s = u + v;
        x[j] = s >= p ? s - p : s;
        y[j] = u >= v ? u - v : u + p - v;
      }
    }
  }
}

void NttTables::Inverse(uint64_t* a) const {
  const uint64_t p = q_.value();
  size_t t = 1;
  for (size_t m = n_; m > 1; m >>= 1) {
    size_t h = m >> 1;
    for (size_t i = 0; i < h; ++i) {
      const MulConst& w = inv_psi_rev_[h + i];
      uint64_t* x = a + 2 * i * t;
      uint64_t* y = x + t;
      for (size_t j = 0; j < t; ++j) {
        uint64_t u = x[j];
        uint64_t v = y[j];
        uint64_t s = u + v;
        x[j] = s >= p ? s - p : s;
        y[j] = w.Apply(u >= v ? u - v : u + p - v, p);
      }
    }
    t <<= 1;
  }
  for (size_t j = 0; j < n_; ++j) a[j] = n_inv_.Apply(a[j], p);
}

bool IsPrime(uint64_t v) {
  mpz_class z(std::to_string(v));
  return mpz_probab_prime_p(z.get_mpz_t(), 40) > 0;
}

std::vector<uint64_t> FindNttPrimes(int bits, size_t n, size_t count,
                                    const std::vector<uint64_t>& exclude) {
  if (bits < 20 || bits > 62) Fail(ErrorCode::kBadParams, "prime size must be 20..62 bits");
  const uint64_t step = 2 * n;
  uint64_t top = uint64_t{1} << bits;
  uint64_t cand = top - step + 1;
  std::vector<uint64_t> out;
  while (out.size() < count) {
    if (cand < step) Fail(ErrorCode::kBadParams, "ran out of NTT primes");
    if (IsPrime(cand) && std::find(exclude.begin(), exclude.end(), cand) == exclude.end()) {
      out.push_back(cand);
    }
    cand -= step;
  }
  return out;
}

uint64_t LargestPrimeBelow(int bits) {
  uint64_t cand = (uint64_t{1} << bits) - 1;
  while (!IsPrime(cand)) cand -= 2;
  return cand;
}

}  // namespace privver::he
