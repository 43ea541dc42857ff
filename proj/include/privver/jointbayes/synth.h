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

#ifndef PRIVVER_JOINTBAYES_SYNTH_H_
#define PRIVVER_JOINTBAYES_SYNTH_H_

#include <cstdint>
#include <vector>

#include "privver/common/rng.h"
#include "privver/jointbayes/io.h"
#include "privver/jointbayes/jointbayes.h"

namespace privver::jointbayes {

// Covariance for one latent component. kDiagonal yields scale * I; kRandomSpd
// yields a random rotation of a geometric spectrum with trace scale * d.
struct CovarianceSpec {
  enum class Kind { kDiagonal, kRandomSpd };
  Kind kind = Kind::kDiagonal;
  double scale = 1.0;
  double decay = 0.8;
  uint64_t seed = 0;
};

struct SynthConfig {
  int d = 160;
  int n_identities = 500;
  int images_per_identity = 5;
  CovarianceSpec s_mu{CovarianceSpec::Kind::kDiagonal, 1.0};
  CovarianceSpec s_eps{CovarianceSpec::Kind::kDiagonal, 0.1};
  uint64_t seed = 1;
};

Matrix BuildCovariance(const CovarianceSpec& spec, int d);
Matrix RandomSpd(int d, double trace, double decay, Rng& rng);

// Symmetric square root used to draw N(0, cov) samples; tolerates PSD input.
Matrix CovarianceFactor(const Matrix& cov);
Vector SampleGaussian(const Matrix& factor, Rng& rng);

struct SynthData {
  std::vector<FeatureRow> rows;
  Matrix s_mu;
  Matrix s_eps;
};

// Per identity: mu ~ N(0, S_mu) once, then x = mu + eps with eps ~ N(0, S_eps).
SynthData Synthesize(const SynthConfig& config);

// Fresh identities from the same model: positives share one mu, negatives
// draw two independent identities.
std::vector<LabeledPair> SamplePairs(const Matrix& s_mu, const Matrix& s_eps, int positives,
                                     int negatives, Rng& rng);

}  // namespace privver::jointbayes

#endif  // PRIVVER_JOINTBAYES_SYNTH_H_
