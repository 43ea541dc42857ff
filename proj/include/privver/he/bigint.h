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

#ifndef PRIVVER_HE_BIGINT_H_
#define PRIVVER_HE_BIGINT_H_

#include <gmpxx.h>

#include <cstddef>
#include <vector>

#include "privver/common/rng.h"

namespace privver::he {

// Probable prime with exactly `bits` bits.
mpz_class RandomPrime(int bits, Rng& rng);

// Uniform element of Z_n^*.
mpz_class RandomUnit(const mpz_class& n, Rng& rng);

// x with x = a mod m1 and x = b mod m2, for coprime m1, m2.
mpz_class Crt(const mpz_class& a, const mpz_class& m1, const mpz_class& b,
              const mpz_class& m2);

mpz_class PowMod(const mpz_class& base, const mpz_class& exp, const mpz_class& mod);

// Windowed table for repeated exponentiation of one base to non-negative
// exponents of bounded length.
class FixedBaseTable {
 public:
  FixedBaseTable(const mpz_class& base, const mpz_class& modulus, int max_exp_bits,
                 int window = 6);

  int max_exp_bits() const { return max_exp_bits_; }
  // Falls back to PowMod for exponents longer than the table.
  mpz_class Pow(const mpz_class& exp) const;

 private:
  mpz_class base_;
  mpz_class modulus_;
  int max_exp_bits_;
  int window_;
  // rows_[i][j] = base^(j * 2^(window * i)) for j in [1, 2^window).
  std::vector<std::vector<mpz_class>> rows_;
};

}  // namespace privver::he

#endif  // PRIVVER_HE_BIGINT_H_
