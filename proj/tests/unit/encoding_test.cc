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

#include "privver/encoding/fixed_point.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "jb_oracle.h"
#include "privver/common/error.h"
#include "privver/common/rng.h"

namespace privver::encoding {
namespace {

TEST(EncodeTest, Examples) {
  FixedPointCodec c{8, 1 << 20};
  EXPECT_EQ(encode(c, 0.0).value, 0);
  EXPECT_EQ(encode(c, 1.5).value, 384);
  EXPECT_EQ(decode(c, {384, 8}), 1.5);
  EXPECT_EQ(decode(c, {-256, 8}), -1.0);
}

TEST(EncodeTest, RoundsHalfToEven) {
  FixedPointCodec c{0, 100};
  EXPECT_EQ(encode(c, 0.5).value, 0);
  EXPECT_EQ(encode(c, 1.5).value, 2);
  EXPECT_EQ(encode(c, 2.5).value, 2);
  EXPECT_EQ(encode(c, -2.5).value, -2);
}

TEST(EncodeTest, RoundTripWithinHalfUlp) {
  FixedPointCodec c{8, int64_t{1} << 40};
  Rng rng = Rng::FromSeed(1);
  for (int i = 0; i < 1000; ++i) {
    double x = -100.0 + 200.0 * rng.UniformReal();
    EXPECT_LE(std::abs(decode(c, encode(c, x)) - x), std::ldexp(1.0, -9));
  }
}

TEST(EncodeTest, Overflow) {
  FixedPointCodec c{8, 2049};
  EXPECT_EQ(encode(c, 8.0).value, 2048);
  EXPECT_THROW(encode(c, 8.01), Error);
  EXPECT_THROW(encode(c, std::nan("")), Error);
}

TEST(QuadraticScaleTest, Examples) {
  std::vector<ScaleOp> add{{ScaleOpKind::kAdd, 8}};
  EXPECT_EQ(quadratic_scale(8, add), 8);
  std::vector<ScaleOp> xax{{ScaleOpKind::kMulPlain, 8}, {ScaleOpKind::kMul, 8}};
  EXPECT_EQ(quadratic_scale(8, xax), 24);
  std::vector<ScaleOp> bad{{ScaleOpKind::kMul, 8}, {ScaleOpKind::kAdd, 8}};
  EXPECT_THROW(quadratic_scale(8, bad), Error);
}

TEST(QuadraticScaleTest, FullLikelihoodRatioExpression) {
  // x'Ax, y'Ay and -2 y'Gx each reach 2 s_f + s_m before they are summed.
  const int sf = 8, sm = 8;
  std::vector<ScaleOp> quad{{ScaleOpKind::kMulPlain, sm}, {ScaleOpKind::kMul, sf}};
  std::vector<ScaleOp> cross{{ScaleOpKind::kMulPlain, sm},
                             {ScaleOpKind::kMul, sf},
                             {ScaleOpKind::kMulPlain, 0}};
  int t1 = quadratic_scale(sf, quad);
  int t2 = quadratic_scale(sf, quad);
  int t3 = quadratic_scale(sf, cross);
  EXPECT_EQ(t1, 24);
  EXPECT_EQ(t3, 24);
  std::vector<ScaleOp> sum{{ScaleOpKind::kAdd, t2}, {ScaleOpKind::kAdd, t3}};
  EXPECT_EQ(quadratic_scale(t1, sum), LrScales{}.result());
}

TEST(LrEncodingTest, KroneckerIdentity) {
  std::vector<int64_t> x{1, 2};
  EXPECT_EQ(KroneckerSelf(x), (std::vector<int64_t>{1, 2, 2, 4}));
  jointbayes::VerifierMatrices v{jointbayes::Matrix::Identity(2, 2),
                                 jointbayes::Matrix::Zero(2, 2), 0.0};
  EncodedVerifier ev = EncodeVerifier(v, {0, 0});
  auto k = KroneckerSelf(x);
  int64_t dot = 0;
  for (size_t i = 0; i < k.size(); ++i) dot += k[i] * ev.a[i];
  EXPECT_EQ(dot, 5);
  EXPECT_EQ(EncodedQuadratic(ev, x), 5);
}

TEST(LrEncodingTest, WorstCaseFitsFiftyBits) {
  EXPECT_LT(WorstCaseEncodedLr(160), std::ldexp(1.0, 50));
}

TEST(LrEncodingTest, QuantizationWithinBound) {
  Rng rng = Rng::FromSeed(2);
  for (int trial = 0; trial < 50; ++trial) {
    int d = 16;
    jointbayes::JbParams p{privver::testing::RandomSpdMatrix(d, rng, 0.5, 1.5),
                           privver::testing::RandomSpdMatrix(d, rng, 0.1, 0.3)};
    auto v = jointbayes::derive_verifier(p, 0.0);
    jointbayes::Vector x = privver::testing::RandomVector(d, rng);
    jointbayes::Vector y = privver::testing::RandomVector(d, rng);
    EncodedVerifier ev = EncodeVerifier(v);
    auto xe = EncodeVector(ev.scales.feature_codec(), x);
    auto ye = EncodeVector(ev.scales.feature_codec(), y);
    double lr = jointbayes::log_likelihood_ratio(v, x, y);
    double enc = std::ldexp(static_cast<double>(EncodedLr(ev, xe, ye)), -24);
    EXPECT_LE(std::abs(lr - enc), LrQuantizationBound(v, x, y));
    EXPECT_LE(std::abs(lr - enc), 0.01 * (1.0 + std::abs(lr)));
  }
}

}  // namespace
}  // namespace privver::encoding
