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

#ifndef PRIVVER_COMMON_RNG_H_
#define PRIVVER_COMMON_RNG_H_

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string_view>

namespace privver {

// ChaCha20 keystream generator. Seeded instances are deterministic and are
// used for reproducible transcripts in test mode; Secure() draws its key from
// the operating system.
class Rng {
 public:
  using result_type = uint64_t;

  static Rng Secure();
  static Rng FromSeed(uint64_t seed, std::string_view label = {});
  // Seeded only when a seed is given and test mode is on; otherwise secure.
  static Rng ForSession(std::optional<uint64_t> seed, std::string_view label);

  Rng(Rng&&) noexcept;
  Rng& operator=(Rng&&) noexcept;
  ~Rng();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return NextU64(); }

  uint64_t NextU64();
  void Fill(uint8_t* out, size_t n);
  // Uniform in [0, bound); bound must be positive.
  uint64_t Uniform(uint64_t bound);
  // Uniform double in [0, 1).
  double UniformReal();
  double Normal(double mean = 0.0, double stddev = 1.0);

  mpz_class RandomBits(size_t bits);
  // Uniform in [0, bound).
  mpz_class UniformMpz(const mpz_class& bound);

  // Independent child stream derived from this generator's key and the given
  // index; the parent stream is not advanced. Parallel loops use one fork per
  // element so results do not depend on the thread schedule.
  Rng Fork(uint64_t stream) const;
  // Child stream keyed from fresh output of this generator.
  Rng Split();

 private:
  explicit Rng(const std::array<uint8_t, 32>& key);
  void Refill();

  struct Cipher;
  std::array<uint8_t, 32> key_{};
  std::unique_ptr<Cipher> cipher_;
  std::array<uint8_t, 4096> buf_{};
  size_t pos_ = 0;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace privver

#endif  // PRIVVER_COMMON_RNG_H_
