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

#include "privver/common/rng.h"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "privver/common/digest.h"
#include "privver/common/error.h"
#include "privver/common/test_mode.h"

namespace privver {

struct Rng::Cipher {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Cipher() { EVP_CIPHER_CTX_free(ctx); }
};

namespace {

std::array<uint8_t, 32> DeriveKey(std::span<const uint8_t> material) {
  Digest d = Sha256(material);
  std::array<uint8_t, 32> key;
  std::memcpy(key.data(), d.data(), key.size());
  return key;
}

}  // namespace

Rng::Rng(const std::array<uint8_t, 32>& key)
    : key_(key), cipher_(std::make_unique<Cipher>()) {
  cipher_->ctx = EVP_CIPHER_CTX_new();
  uint8_t iv[16] = {0};
  if (cipher_->ctx == nullptr ||
      EVP_EncryptInit_ex(cipher_->ctx, EVP_chacha20(), nullptr, key_.data(), iv) != 1) {
    Fail(ErrorCode::kBadParams, "chacha20 init failed");
  }
  pos_ = buf_.size();
}

Rng::Rng(Rng&&) noexcept = default;
Rng& Rng::operator=(Rng&&) noexcept = default;
Rng::~Rng() = default;

Rng Rng::Secure() {
  std::array<uint8_t, 32> key;
  if (RAND_bytes(key.data(), static_cast<int>(key.size())) != 1) {
    Fail(ErrorCode::kBadParams, "RAND_bytes failed");
  }
  return Rng(key);
}

Rng Rng::FromSeed(uint64_t seed, std::string_view label) {
  std::vector<uint8_t> material;
  const char tag[] = "privver-seed";
  material.insert(material.end(), tag, tag + sizeof(tag) - 1);
  for (int i = 0; i < 8; ++i) material.push_back(static_cast<uint8_t>(seed >> (8 * i)));
  material.insert(material.end(), label.begin(), label.end());
  return Rng(DeriveKey(material));
}

Rng Rng::ForSession(std::optional<uint64_t> seed, std::string_view label) {
  if (seed.has_value() && TestModeEnabled()) return FromSeed(*seed, label);
  return Secure();
}

void Rng::Refill() {
  static const uint8_t kZeros[4096] = {0};
  int outl = 0;
  if (EVP_EncryptUpdate(cipher_->ctx, buf_.data(), &outl, kZeros,
                        static_cast<int>(buf_.size())) != 1) {
    Fail(ErrorCode::kBadParams, "chacha20 keystream failed");
  }
  pos_ = 0;
}

void Rng::Fill(uint8_t* out, size_t n) {
  while (n > 0) {
    if (pos_ == buf_.size()) Refill();
    size_t take = std::min(n, buf_.size() - pos_);
    std::memcpy(out, buf_.data() + pos_, take);
    pos_ += take;
    out += take;
    n -= take;
  }
}

uint64_t Rng::NextU64() {
  uint8_t b[8];
  Fill(b, 8);
  uint64_t v;
  std::memcpy(&v, b, 8);
  return v;
}

uint64_t Rng::Uniform(uint64_t bound) {
  if (bound == 0) Fail(ErrorCode::kBadParams, "uniform bound is zero");
  // Rejection sampling removes modulo bias.
  uint64_t limit = std::numeric_limits<uint64_t>::max() -
                   std::numeric_limits<uint64_t>::max() % bound;
  uint64_t v;
  do {
    v = NextU64();
  } while (v >= limit);
  return v % bound;
}

double Rng::UniformReal() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double Rng::Normal(double mean, double stddev) {
  if (have_spare_normal_) {
    have_spare_normal_ = false;
    return mean + stddev * spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * UniformReal() - 1.0;
    v = 2.0 * UniformReal() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  have_spare_normal_ = true;
  return mean + stddev * u * f;
}

mpz_class Rng::RandomBits(size_t bits) {
  if (bits == 0) return 0;
  size_t bytes = (bits + 7) / 8;
  std::vector<uint8_t> buf(bytes);
  Fill(buf.data(), bytes);
  size_t extra = bytes * 8 - bits;
  buf[0] &= static_cast<uint8_t>(0xFF >> extra);
  mpz_class v;
  mpz_import(v.get_mpz_t(), bytes, 1, 1, 1, 0, buf.data());
  return v;
}

mpz_class Rng::UniformMpz(const mpz_class& bound) {
  if (sgn(bound) <= 0) Fail(ErrorCode::kBadParams, "uniform bound must be positive");
  size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  mpz_class v;
  do {
    v = RandomBits(bits);
  } while (v >= bound);
  return v;
}

Rng Rng::Fork(uint64_t stream) const {
  std::vector<uint8_t> material(key_.begin(), key_.end());
  const char tag[] = "fork";
  material.insert(material.end(), tag, tag + sizeof(tag) - 1);
  for (int i = 0; i < 8; ++i) material.push_back(static_cast<uint8_t>(stream >> (8 * i)));
  return Rng(DeriveKey(material));
}

Rng Rng::Split() {
  std::array<uint8_t, 32> key;
  Fill(key.data(), key.size());
  return Rng(key);
}

}  // namespace privver
