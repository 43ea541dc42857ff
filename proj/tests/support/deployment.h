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

#ifndef PRIVVER_TESTS_SUPPORT_DEPLOYMENT_H_
#define PRIVVER_TESTS_SUPPORT_DEPLOYMENT_H_

#include <cmath>
#include <memory>

#include "privver/common/rng.h"
#include "privver/encoding/fixed_point.h"
#include "privver/jointbayes/jointbayes.h"
#include "privver/jointbayes/synth.h"
#include "privver/scenarios/scenarios.h"

namespace privver::testing {

// Keys small enough for fast tests. The leveled parameters stay at their
// defaults because the plaintext modulus must hold the encoded LR.
inline scenarios::KeySizes SmallKeySizes() {
  scenarios::KeySizes sizes;
  sizes.additive_bits = 512;
  sizes.comparison_bits = 512;
  return sizes;
}

// Verifier built from known covariances; features drawn from the same model.
struct Deployment {
  jointbayes::JbParams params;
  jointbayes::VerifierMatrices verifier;
  encoding::EncodedVerifier encoded;
  scenarios::ServerKeys server_keys;
  scenarios::ClientKeys clients[3];

  const scenarios::ClientKeys& client(scenarios::ScenarioId s) const {
    return clients[static_cast<int>(s) - 1];
  }

  std::unique_ptr<scenarios::Server> MakeServer(scenarios::ScenarioId s, scenarios::Database* db) const {
    scenarios::ServerConfig config{s, encoded, {}};
    return std::make_unique<scenarios::Server>(config, server_keys, db);
  }

  // Draws a vector x = mu + eps, clipped to the supported input range.
  jointbayes::Vector Sample(const jointbayes::Vector& mu, Rng& rng) const {
    jointbayes::Vector x = mu + jointbayes::SampleGaussian(jointbayes::CovarianceFactor(params.s_eps), rng);
    return x.cwiseMax(-encoding::kInputRange).cwiseMin(encoding::kInputRange);
  }
  jointbayes::Vector Identity(Rng& rng) const {
    jointbayes::Vector mu = jointbayes::SampleGaussian(jointbayes::CovarianceFactor(params.s_mu), rng);
    return mu.cwiseMax(-encoding::kInputRange / 2).cwiseMin(encoding::kInputRange / 2);
  }
};

inline Deployment MakeDeployment(int d, double threshold, uint64_t seed,
                                 const scenarios::KeySizes& sizes = SmallKeySizes()) {
  Deployment dep;
  dep.params.s_mu = jointbayes::Matrix::Identity(d, d);
  dep.params.s_eps = 0.1 * jointbayes::Matrix::Identity(d, d);
  dep.verifier = jointbayes::derive_verifier(dep.params, threshold);
  dep.encoded = encoding::EncodeVerifier(dep.verifier);
  Rng rng = Rng::FromSeed(seed, "deployment");
  dep.server_keys = scenarios::GenerateServerKeys(rng, sizes);
  dep.clients[0] = scenarios::GenerateClientKeys(scenarios::ScenarioId::kS1Plaintext, rng, sizes);
  dep.clients[1] = scenarios::GenerateClientKeys(scenarios::ScenarioId::kS2Additive, rng, sizes);
  dep.clients[2] = scenarios::GenerateClientKeys(scenarios::ScenarioId::kS3Leveled, rng, sizes);
  return dep;
}

}  // namespace privver::testing

#endif  // PRIVVER_TESTS_SUPPORT_DEPLOYMENT_H_
