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

#ifndef PRIVVER_HE_MODARITH_H_
#define PRIVVER_HE_MODARITH_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace privver::he {

using u128 = unsigned __int128;

// Word-size prime modulus (< 2^62) with a Barrett constant for reducing
// 128-bit products.
class Modulus {
 public:
  Modulus() = default;
  explicit Modulus(uint64_t value);

  uint64_t value() const { return value_; }

  uint64_t Reduce(u128 x) const {
    uint64_t x0 = static_cast<uint64_t>(x);
    uint64_t x1 = static_cast<uint64_t>(x >> 64);
    // floor(x * ratio / 2^128) underestimates the quotient by at most 3.
    u128 a = (static_cast<u128>(x0) * ratio_lo_) >> 64;
    u128 b = static_cast<u128>(x0) * ratio_hi_;
    u128 c = static_cast<u128>(x1) * ratio_lo_;
    u128 mid = a + static_cast<uint64_t>(b) + static_cast<uint64_t>(c);
    u128 quot = static_cast<u128>(x1) * ratio_hi_ + (b >> 64) + (c >> 64) + (mid >> 64);
    uint64_t r = x0 - static_cast<uint64_t>(quot) * value_;
    while (r >= value_) r -= value_;
    return r;
  }
  uint64_t Reduce(uint64_t x) const { return x % value_; }
  uint64_t Mul(uint64_t a, uint64_t b) const { return Reduce(static_cast<u128>(a) * b); }
  uint64_t Add(uint64_t a, uint64_t b) const {
    uint64_t s = a + b;
    return s >= value_ ? s - value_ : s;
  }
  uint64_t Sub(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + value_ - b; }
  uint64_t Neg(uint64_t a) const { return a == 0 ? 0 : value_ - a; }
  uint64_t FromSigned(int64_t v) const {
    int64_t r = v % static_cast<int64_t>(value_);
    return r < 0 ? static_cast<uint64_t>(r + static_cast<int64_t>(value_))
                 : static_cast<uint64_t>(r);
  }
  uint64_t Pow(uint64_t base, uint64_t exp) const;
  uint64_t Inverse(uint64_t a) const;

 private:
  uint64_t value_ = 0;
  uint64_t ratio_hi_ = 0;
  uint64_t ratio_lo_ = 0;
};

// Shoup's precomputed-quotient multiplication by a fixed operand w < q.
inline uint64_t ShoupPrecompute(uint64_t w, uint64_t q) {
  return static_cast<uint64_t>((static_cast<u128>(w) << 64) / q);
}

inline uint64_t MulShoup(uint64_t a, uint64_t w, uint64_t w_shoup, uint64_t q) {
  uint64_t hi = static_cast<uint64_t>((static_cast<u128>(a) * w_shoup) >> 64);
  uint64_t r = a * w - hi * q;
  return r >= q ? r - q : r;
}

struct MulConst {
  uint64_t w = 0;
  uint64_t w_shoup = 0;

  MulConst() = default;
  MulConst(uint64_t value, uint64_t q) : w(value), w_shoup(ShoupPrecompute(value, q)) {}
  uint64_t Apply(uint64_t a, uint64_t q) const { return MulShoup(a, w, w_shoup, q); }
};

// Negacyclic NTT over Z_q[X]/(X^n + 1). Forward maps natural-order
// coefficients to bit-reversed evaluations; Inverse undoes it, including the
// 1/n factor.
class NttTables {
 public:
  NttTables(size_t n, const Modulus& q);

  size_t n() const { return n_; }
  const Modulus& modulus() const { return q_; }
  void Forward(uint64_t* a) const;
  void Inverse(uint64_t* a) const;

 private:
  size_t n_;
  Modulus q_;
  std::vector<MulConst> psi_rev_;
  std::vector<MulConst> inv_psi_rev_;
  MulConst n_inv_;
};

bool IsPrime(uint64_t v);

// Largest primes below 2^bits that are 1 mod 2n, skipping any in exclude.
std::vector<uint64_t> FindNttPrimes(int bits, size_t n, size_t count,
                                    const std::vector<uint64_t>& exclude = {});

// Largest prime strictly below 2^bits.
uint64_t LargestPrimeBelow(int bits);

}  // namespace privver::he

#endif  // PRIVVER_HE_MODARITH_H_
