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

#include <gtest/gtest.h>
#include <omp.h>

#include "privver/common/error.h"

namespace privver::kernels {
namespace {

he::KeyPair MakeKeys(he::SchemeId scheme) {
  he::SchemeParams p = he::SchemeParams::Default(scheme);
  p.modulus_bits = 512;
  p.leveled.n = 4096;
  p.leveled.q_bits = {50, 50};
  p.leveled.t = 65537;
  Rng rng = Rng::FromSeed(31, "kernels");
  return he::keygen(p, rng);
}

std::vector<Bytes> Serialized(const std::vector<he::Ciphertext>& cts) {
  std::vector<Bytes> out;
  for (const auto& c : cts) out.push_back(he::SerializeCiphertext(c));
  return out;
}

class KernelsTest : public ::testing::TestWithParam<he::SchemeId> {};

TEST_P(KernelsTest, ParallelMatchesSerialBitForBit) {
  omp_set_num_threads(4);
  he::KeyPair kp = MakeKeys(GetParam());
  std::vector<int64_t> x{3, -1, 4, 1, -5, 9};
  IntMatrix m{4, 6, {}};
  for (size_t i = 0; i < m.rows * m.cols; ++i) m.values.push_back(static_cast<int64_t>(i % 7) - 3);
  auto values = ToMpz(x);

  Rng r1 = Rng::FromSeed(1), r2 = Rng::FromSeed(1);
  auto enc_s = serial::EncryptBatch(kp.pub, values, 8, r1);
  auto enc_p = parallel::EncryptBatch(kp.pub, values, 8, r2);
  EXPECT_EQ(Serialized(enc_s), Serialized(enc_p));

  auto mv_s = serial::MatVecPlain(kp.pub, m, enc_s, 8);
  auto mv_p = parallel::MatVecPlain(kp.pub, m, enc_p, 8);
  EXPECT_EQ(Serialized(mv_s), Serialized(mv_p));
  auto dec_s = serial::DecryptBatch(kp.sec, mv_s);
  auto dec_p = parallel::DecryptBatch(kp.sec, mv_p);
  EXPECT_EQ(dec_s, dec_p);
  for (size_t r = 0; r < m.rows; ++r) {
    long expected = 0;
    for (size_t c = 0; c < m.cols; ++c) expected += m.at(r, c) * x[c];
    EXPECT_EQ(dec_s[r], expected);
    EXPECT_EQ(mv_s[r].scale_exp, 16);
  }

  auto rr_s = serial::RerandomizeBatch(kp.pub, enc_s, r1);
  auto rr_p = parallel::RerandomizeBatch(kp.pub, enc_p, r2);
  EXPECT_EQ(Serialized(rr_s), Serialized(rr_p));
  EXPECT_EQ(parallel::DecryptBatch(kp.sec, rr_p), values);
}

TEST_P(KernelsTest, ParallelPropagatesErrors) {
  he::KeyPair kp = MakeKeys(GetParam());
  Rng rng = Rng::FromSeed(2);
  std::vector<mpz_class> values{1, plaintext_half_range(kp.pub) + 1, 2};
  EXPECT_THROW(parallel::EncryptBatch(kp.pub, values, 0, rng), Error);
  IntMatrix bad{1, 2, {1, 2}};
  auto cts = serial::EncryptBatch(kp.pub, ToMpz(std::vector<int64_t>{1, 2, 3}), 0, rng);
  EXPECT_THROW(parallel::MatVecPlain(kp.pub, bad, cts, 0), Error);
}

INSTANTIATE_TEST_SUITE_P(Schemes, KernelsTest,
                         ::testing::Values(he::SchemeId::kAdditive, he::SchemeId::kLeveled));

}  // namespace
}  // namespace privver::kernels
