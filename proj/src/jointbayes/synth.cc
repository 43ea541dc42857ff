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

#include "privver/jointbayes/synth.h"

#include <cmath>
#include <cstdio>

#include "privver/common/error.h"

namespace privver::jointbayes {

Matrix RandomSpd(int d, double trace, double decay, Rng& rng) {
  Matrix gauss(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) gauss(i, j) = rng.Normal();
  }
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  Vector spectrum(d);
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    spectrum[i] = std::pow(decay, i);
    sum += spectrum[i];
  }
  spectrum *= trace / sum;
  Matrix out = q * spectrum.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix BuildCovariance(const CovarianceSpec& spec, int d) {
  if (d < 1) Fail(ErrorCode::kBadParams, "dimension must be positive");
  if (!(spec.scale >= 0.0)) Fail(ErrorCode::kBadParams, "covariance scale must be >= 0");
  if (spec.kind == CovarianceSpec::Kind::kDiagonal) {
    return spec.scale * Matrix::Identity(d, d);
  }
  Rng rng = Rng::FromSeed(spec.seed, "random-spd");
  return RandomSpd(d, spec.scale * d, spec.decay, rng);
}

Matrix CovarianceFactor(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

Vector SampleGaussian(const Matrix& factor, Rng& rng) {
  Vector z(factor.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.Normal();
  return factor * z;
}

SynthData Synthesize(const SynthConfig& config) {
  if (config.n_identities < 1 || config.images_per_identity < 1) {
    Fail(ErrorCode::kBadParams, "identity and image counts must be >= 1");
  }
  SynthData out;
  out.s_mu = BuildCovariance(config.s_mu, config.d);
  out.s_eps = BuildCovariance(config.s_eps, config.d);
  Matrix mu_factor = CovarianceFactor(out.s_mu);
  Matrix eps_factor = CovarianceFactor(out.s_eps);
  Rng rng = Rng::FromSeed(config.seed, "synth");
  out.rows.reserve(static_cast<size_t>(config.n_identities) * config.images_per_identity);
  char name[32];
  for (int i = 0; i < config.n_identities; ++i) {
    std::snprintf(name, sizeof(name), "id%05d", i);
    Vector mu = SampleGaussian(mu_factor, rng);
    for (int j = 0; j < config.images_per_identity; ++j) {
      out.rows.push_back({name, mu + SampleGaussian(eps_factor, rng)});
    }
  }
  return out;
}

std::vector<LabeledPair> SamplePairs(const Matrix& s_mu, const Matrix& s_eps, int positives,
                                     int negatives, Rng& rng) {
  Matrix mu_factor = CovarianceFactor(s_mu);
  Matrix eps_factor = CovarianceFactor(s_eps);
  std::vector<LabeledPair> pairs;
  pairs.reserve(static_cast<size_t>(positives + negatives));
  for (int i = 0; i < positives; ++i) {
    Vector mu = SampleGaussian(mu_factor, rng);
    pairs.push_back({mu + SampleGaussian(eps_factor, rng), mu + SampleGaussian(eps_factor, rng),
                     true});
  }
  for (int i = 0; i < negatives; ++i) {
    Vector mu1 = SampleGaussian(mu_factor, rng);
    Vector mu2 = SampleGaussian(mu_factor, rng);
    pairs.push_back({mu1 + SampleGaussian(eps_factor, rng),
                     mu2 + SampleGaussian(eps_factor, rng), false});
  }
  return pairs;
}

}  // namespace privver::jointbayes
