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

#include "privver/jointbayes/io.h"

#include <gtest/gtest.h>

#include "privver/common/error.h"
#include "privver/jointbayes/synth.h"

namespace privver::jointbayes {
namespace {

TEST(FeatureCsvTest, RoundTripIsExact) {
  SynthConfig config{.d = 5, .n_identities = 7, .images_per_identity = 3, .seed = 9};
  SynthData data = Synthesize(config);
  std::string text = FormatFeatureCsv(data.rows);
  auto parsed = ParseFeatureCsv(text);
  ASSERT_EQ(parsed.size(), data.rows.size());
  for (size_t i = 0; i < parsed.size(); ++i) {
    EXPECT_EQ(parsed[i].identity_id, data.rows[i].identity_id);
    EXPECT_EQ(parsed[i].values, data.rows[i].values);
  }
  auto groups = GroupRows(parsed);
  ASSERT_EQ(groups.size(), 7u);
  EXPECT_EQ(groups[3].m(), 3);
}

TEST(FeatureCsvTest, InfersDimensionAndToleratesCrlf) {
  auto rows = ParseFeatureCsv("identity_id,f0,f1\r\nalice,1.5,-2\r\nbob,0,3e2\r\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].values.size(), 2);
  EXPECT_EQ(rows[1].values[1], 300.0);
}

TEST(FeatureCsvTest, RejectsMalformedInput) {
  EXPECT_THROW(ParseFeatureCsv("id,f0\nx,1\n"), Error);
  EXPECT_THROW(ParseFeatureCsv("identity_id,f0,f2\nx,1,2\n"), Error);
  EXPECT_THROW(ParseFeatureCsv("identity_id,f0\nx,abc\n"), Error);
  EXPECT_THROW(ParseFeatureCsv("identity_id,f0\nx,1,2\n"), Error);
  EXPECT_THROW(ParseFeatureCsv("identity_id,f0\nx,nan\n"), Error);
}

TEST(ModelFileTest, RoundTripIsBitIdentical) {
  SynthData data = Synthesize({.d = 4, .n_identities = 30, .images_per_identity = 4});
  EmResult fit = fit_em(GroupRows(data.rows));
  Model model{fit.params, derive_verifier(fit.params, -1.25)};
  Bytes bytes = SerializeModel(model);
  EXPECT_EQ(bytes.size(), 4u + 4u + 4u * 16u * 8u + 8u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "JBM1");
  Model back = ParseModel(bytes);
  EXPECT_EQ(back.params.s_mu, model.params.s_mu);
  EXPECT_EQ(back.verifier.g, model.verifier.g);
  EXPECT_EQ(back.verifier.threshold, -1.25);
  EXPECT_EQ(SerializeModel(back), bytes);
  bytes.pop_back();
  EXPECT_THROW(ParseModel(bytes), Error);
}

TEST(SynthTest, ZeroIntraVarianceGivesIdenticalImages) {
  SynthConfig config{.d = 3, .n_identities = 4, .images_per_identity = 3};
  config.s_eps.scale = 0.0;
  auto groups = GroupRows(Synthesize(config).rows);
  for (const IdentityGroup& g : groups) {
    for (const Vector& x : g.images) EXPECT_EQ(x, g.images.front());
  }
}

TEST(SynthTest, SeedDeterminesOutput) {
  SynthConfig config{.d = 6, .n_identities = 10, .images_per_identity = 2, .seed = 42};
  EXPECT_EQ(FormatFeatureCsv(Synthesize(config).rows), FormatFeatureCsv(Synthesize(config).rows));
  SynthConfig other = config;
  other.seed = 43;
  EXPECT_NE(FormatFeatureCsv(Synthesize(config).rows), FormatFeatureCsv(Synthesize(other).rows));
}

TEST(SynthTest, IdentityMeansApproachSMu) {
  SynthConfig config{.d = 8, .n_identities = 5000, .images_per_identity = 1};
  config.s_mu = {CovarianceSpec::Kind::kRandomSpd, 1.0, 0.7, 5};
  config.s_eps.scale = 0.0;
  SynthData data = Synthesize(config);
  Matrix cov = Matrix::Zero(8, 8);
  for (const FeatureRow& r : data.rows) cov += r.values * r.values.transpose();
  cov /= 5000.0;
  EXPECT_LE((cov - data.s_mu).norm() / data.s_mu.norm(), 0.1);
}

}  // namespace
}  // namespace privver::jointbayes
