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

// Prints one PASS/FAIL line per acceptance criterion. Arguments select a
// subset by number; with none, all run. Exit status is non-zero if any
// selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "deployment.h"
#include "jb_oracle.h"
#include "privver/cli/bench.h"
#include "privver/common/test_mode.h"
#include "privver/encoding/fixed_point.h"
#include "privver/he/he.h"
#include "privver/jointbayes/io.h"
#include "privver/jointbayes/jointbayes.h"
#include "privver/jointbayes/synth.h"
#include "privver/protocols/compare.h"
#include "privver/scenarios/scenarios.h"

namespace privver {
namespace {

using jointbayes::Matrix;
using jointbayes::Vector;
using scenarios::ScenarioId;
using testing::InfNorm;
using testing::RandomSpdMatrix;
using testing::RandomVector;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double RelFrob(const Matrix& got, const Matrix& want) { return (got - want).norm() / want.norm(); }

Vector Clip(const Vector& v) { return v.cwiseMax(-encoding::kInputRange).cwiseMin(encoding::kInputRange); }

Outcome StructuredInverseOracle() {
  Rng rng = Rng::FromSeed(1001, "acceptance-1");
  const auto start = std::chrono::steady_clock::now();
  double worst = 0;
  const int dims[] = {2, 4, 8};
  for (int i = 0; i < 100; ++i) {
    const int d = dims[i % 3];
    const int m = 1 + (i / 3) % 5;
    const Matrix s_mu = RandomSpdMatrix(d, rng);
    const Matrix s_eps = RandomSpdMatrix(d, rng);
    const jointbayes::StructuredInverse inv = jointbayes::structured_inverse(s_mu, s_eps, m);
    const Matrix full = testing::SigmaX(s_mu, s_eps, m).inverse();
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) {
        const Matrix want = r == c ? Matrix(inv.f + inv.g) : inv.g;
        worst = std::max(worst, InfNorm(full.block(r * d, c * d, d, d) - want));
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-7 && secs < 10, Fmt("100 instances, max block error %.3g, %.2f s", worst, secs)};
}

Outcome EStepOracle() {
  Rng rng = Rng::FromSeed(1002, "acceptance-2");
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const int d = 1 + i % 4;
    const int m = 1 + (i / 4) % 4;
    jointbayes::JbParams p{RandomSpdMatrix(d, rng), RandomSpdMatrix(d, rng)};
    jointbayes::IdentityGroup g;
    for (int k = 0; k < m; ++k) g.images.push_back(RandomVector(d, rng, 2.0));
    const jointbayes::LatentEstimates got = jointbayes::e_step(p, g);
    const Vector want = testing::PosteriorMean(p.s_mu, p.s_eps, g.images);
    worst = std::max(worst, (got.mu - want.head(d)).cwiseAbs().maxCoeff());
    for (int k = 0; k < m; ++k) {
      worst = std::max(worst, (got.eps[k] - want.segment((k + 1) * d, d)).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-7, Fmt("100 instances, max deviation %.3g", worst)};
}

Outcome EmRecovery() {
  jointbayes::SynthConfig config;
  config.d = 8;
  config.n_identities = 500;
  config.images_per_identity = 5;
  config.s_mu = {jointbayes::CovarianceSpec::Kind::kRandomSpd, 1.0, 0.8, 31};
  config.s_eps = {jointbayes::CovarianceSpec::Kind::kRandomSpd, 0.3, 0.8, 32};
  config.seed = 33;
  const jointbayes::SynthData data = jointbayes::Synthesize(config);
  const auto start = std::chrono::steady_clock::now();
  jointbayes::EmConfig em;
  em.track_log_likelihood = true;
  const jointbayes::EmResult fit = jointbayes::fit_em(jointbayes::GroupRows(data.rows), em);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double e_mu = RelFrob(fit.params.s_mu, data.s_mu);
  const double e_eps = RelFrob(fit.params.s_eps, data.s_eps);
  double worst_drop = 0;
  for (size_t i = 1; i < fit.log_likelihood.size(); ++i) {
    worst_drop = std::max(worst_drop, fit.log_likelihood[i - 1] - fit.log_likelihood[i]);
  }
  // Allow float noise relative to the log-likelihood magnitude.
  const double slack = 1e-9 * std::abs(fit.log_likelihood.empty() ? 1.0 : fit.log_likelihood.back());
  const bool ok = e_mu <= 0.15 && e_eps <= 0.15 && worst_drop <= slack && secs < 60 && fit.log_likelihood.size() > 1;
  return {ok, Fmt("S_mu err %.4f, S_eps err %.4f, %d iterations, largest log-likelihood drop %.3g, %.2f s", e_mu,
                  e_eps, fit.iterations, worst_drop, secs)};
}

Outcome LrEquivalence() {
  Rng rng = Rng::FromSeed(1004, "acceptance-4");
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const int d = 1 + i % 8;
    const jointbayes::JbParams p{RandomSpdMatrix(d, rng), RandomSpdMatrix(d, rng)};
    const jointbayes::VerifierMatrices v = jointbayes::derive_verifier(p, 0.0);
    const Vector x1 = RandomVector(d, rng), x2 = RandomVector(d, rng);
    const double direct = testing::DirectLlr(p.s_mu, p.s_eps, x1, x2);
    const double got = jointbayes::log_likelihood_ratio(v, x1, x2);
    worst = std::max(worst, std::abs(got - direct) / std::max(1.0, std::abs(direct)));
  }
  return {worst <= 1e-6, Fmt("100 instances, max relative error %.3g", worst)};
}

// Uniform in [-bound, bound].
mpz_class Centered(Rng& rng, const mpz_class& bound) { return rng.UniformMpz(2 * bound + 1) - bound; }

Outcome HomomorphicProperties() {
  constexpr int kTrials = 10000;
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  long errors = 0;
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  for (he::SchemeId scheme : {he::SchemeId::kAdditive, he::SchemeId::kLeveled}) {
    Rng rng = Rng::FromSeed(1005 + static_cast<int>(scheme), "acceptance-5");
    const he::KeyPair kp = he::keygen(he::SchemeParams::Default(scheme), rng);
    const mpz_class half = he::plaintext_half_range(kp.pub);
    const mpz_class add_bound = half / 2;
    const mpz_class k_bound = mpz_class(1) << 32;
    const mpz_class m_bound = half / k_bound;
    long scheme_errors = 0;
    for (int t = 0; t < kTrials; ++t) {
      try {
        const mpz_class a = Centered(rng, add_bound), b = Centered(rng, add_bound);
        const he::Ciphertext ca = he::encrypt(kp.pub, a, rng), cb = he::encrypt(kp.pub, b, rng);
        if (he::decrypt(kp.sec, he::he_add(kp.pub, ca, cb)) != a + b) ++scheme_errors;
        const mpz_class k = Centered(rng, k_bound);
        const mpz_class small = Centered(rng, m_bound);
        const he::Ciphertext cs = he::encrypt(kp.pub, small, rng);
        if (he::decrypt(kp.sec, he::he_mul_plain(kp.pub, cs, k)) != k * small) ++scheme_errors;
      } catch (const std::exception&) {
        ++scheme_errors;
      }
    }
    errors += scheme_errors;
    detail += Fmt("%s add/scalar errors %ld (at %.0f s); ", he::SchemeName(scheme), scheme_errors, elapsed());
    if (scheme == he::SchemeId::kLeveled) {
      // Products stay below the plaintext half range.
      const mpz_class f_bound = mpz_class(1) << ((mpz_sizeinbase(half.get_mpz_t(), 2) - 2) / 2);
      long mul_errors = 0;
      for (int t = 0; t < kTrials; ++t) {
        try {
          const mpz_class a = Centered(rng, f_bound), b = Centered(rng, f_bound);
          const he::Ciphertext prod =
              he::he_mul(kp.pub, he::encrypt(kp.pub, a, rng), he::encrypt(kp.pub, b, rng));
          if (he::decrypt(kp.sec, prod) != a * b) ++mul_errors;
        } catch (const std::exception&) {
          ++mul_errors;
        }
      }
      errors += mul_errors;
      detail += Fmt("LEVELED depth-1 product errors %ld (at %.0f s); ", mul_errors, elapsed());
    }
  }
  const double secs = elapsed();
  detail += Fmt("total %.1f s against a 300 s budget", secs);
  return {errors == 0 && secs < 300, detail};
}

bool RunCompare(const protocols::AliceKeys& keys, const mpz_class& a, const mpz_class& b,
                const protocols::ComparisonParams& params, uint64_t seed) {
  bool t = false;
  protocols::TwoPartyRun run = protocols::RunInProcess(
      [&](protocols::Channel& ch) {
        Rng rng = Rng::FromSeed(seed, "alice");
        t = protocols::secure_compare_alice(ch, keys, params, rng);
      },
      [&](protocols::Channel& ch) {
        Rng rng = Rng::FromSeed(seed, "bob");
        protocols::secure_compare_bob(
            ch, params,
            [&](const protocols::AlicePublicKeys& pk) {
              return std::make_pair(he::encrypt(pk.additive, a, rng), he::encrypt(pk.additive, b, rng));
            },
            rng);
      });
  run.Rethrow();
  return t;
}

Outcome SecureComparison() {
  Rng key_rng = Rng::FromSeed(1006, "acceptance-6");
  const protocols::AliceKeys keys = protocols::MakeAliceKeys(key_rng, 1024, 1024);
  uint64_t seed = 1;
  long small_errors = 0;
  for (int blinding = 0; blinding < 10; ++blinding) {
    for (int a = 0; a < 16; ++a) {
      for (int b = 0; b < 16; ++b) {
        if (RunCompare(keys, a, b, {4, protocols::kDefaultKappa}, seed++) != (a <= b)) ++small_errors;
      }
    }
  }
  Rng rng = Rng::FromSeed(1007, "acceptance-6-values");
  const mpz_class top = mpz_class(1) << 60;
  long large_errors = 0;
  for (int t = 0; t < 10000; ++t) {
    const mpz_class a = rng.UniformMpz(top);
    mpz_class b = rng.UniformMpz(top);
    // Every tenth pair is equal and every tenth adjacent, to hit the boundary.
    if (t % 10 == 0) b = a;
    if (t % 10 == 1) b = a + 1 < top ? mpz_class(a + 1) : mpz_class(a - 1);
    if (RunCompare(keys, a, b, {60, protocols::kDefaultKappa}, seed++) != (a <= b)) ++large_errors;
  }
  return {small_errors == 0 && large_errors == 0,
          Fmt("l=4: %ld errors in 2560 runs; l=60: %ld errors in 10000 runs (1024-bit keys)", small_errors,
              large_errors)};
}

// A model trained on synthetic data, with the calibrated threshold.
struct Trained {
  jointbayes::Model model;
  jointbayes::Matrix s_mu;
  jointbayes::Matrix s_eps;
};

Trained TrainModel(int d, uint64_t seed) {
  jointbayes::SynthConfig config;
  config.d = d;
  config.n_identities = 500;
  config.images_per_identity = 5;
  config.s_mu = {jointbayes::CovarianceSpec::Kind::kDiagonal, 1.0};
  config.s_eps = {jointbayes::CovarianceSpec::Kind::kDiagonal, 0.1};
  config.seed = seed;
  const jointbayes::SynthData data = jointbayes::Synthesize(config);
  Trained t;
  t.s_mu = data.s_mu;
  t.s_eps = data.s_eps;
  t.model.params = jointbayes::fit_em(jointbayes::GroupRows(data.rows)).params;
  t.model.verifier = jointbayes::derive_verifier(t.model.params, 0.0);
  Rng rng = Rng::FromSeed(seed, "calibration");
  const auto pairs = jointbayes::SamplePairs(t.s_mu, t.s_eps, 1000, 1000, rng);
  t.model.verifier.threshold = jointbayes::calibrate_threshold(t.model.verifier, pairs).threshold;
  return t;
}

struct PipelineFixture {
  Trained trained;
  encoding::EncodedVerifier encoded;
  scenarios::ServerKeys server_keys;
  scenarios::ClientKeys clients[3];
  std::unique_ptr<scenarios::Database> dbs[3];
  std::unique_ptr<scenarios::Server> servers[3];

  explicit PipelineFixture(int d) : trained(TrainModel(d, 1107)) {
    encoded = encoding::EncodeVerifier(trained.model.verifier);
    const scenarios::KeySizes sizes = testing::SmallKeySizes();
    Rng rng = Rng::FromSeed(1108, "acceptance-keys");
    server_keys = scenarios::GenerateServerKeys(rng, sizes);
    for (int k = 0; k < 3; ++k) {
      const auto s = static_cast<ScenarioId>(k + 1);
      clients[k] = scenarios::GenerateClientKeys(s, rng, sizes);
      dbs[k] = scenarios::Database::InMemory();
      servers[k] = std::make_unique<scenarios::Server>(scenarios::ServerConfig{s, encoded, {}}, server_keys,
                                                       dbs[k].get());
    }
  }

  // Draws a pair from the generating model; same identity when same is set.
  std::pair<Vector, Vector> Pair(bool same, Rng& rng) const {
    const Matrix fm = jointbayes::CovarianceFactor(trained.s_mu);
    const Matrix fe = jointbayes::CovarianceFactor(trained.s_eps);
    const Vector mu = jointbayes::SampleGaussian(fm, rng);
    const Vector mu2 = same ? mu : Vector(jointbayes::SampleGaussian(fm, rng));
    return {Clip(mu + jointbayes::SampleGaussian(fe, rng)), Clip(mu2 + jointbayes::SampleGaussian(fe, rng))};
  }
};

PipelineFixture& Pipeline() {
  static PipelineFixture fixture(16);
  return fixture;
}

Outcome PipelineFidelity() {
  PipelineFixture& f = Pipeline();
  Rng rng = Rng::FromSeed(1109, "acceptance-7");
  Rng client_rng = Rng::FromSeed(1110, "client"), server_rng = Rng::FromSeed(1111, "server");
  const auto codec = f.encoded.scales.feature_codec();
  const double result_scale = std::ldexp(1.0, f.encoded.scales.result());
  // Observed error against the contract, and against the rigorous bound.
  double worst_contract = 0;
  double worst_vs_bound = 0;
  double loosest_bound = 0;
  long exact_mismatches = 0;
  for (int t = 0; t < 100; ++t) {
    const auto [x, y] = f.Pair(t % 2 == 0, rng);
    const double lr = jointbayes::log_likelihood_ratio(f.trained.model.verifier, x, y);
    const double budget = 0.01 * (1 + std::abs(lr));
    const double bound = encoding::LrQuantizationBound(f.trained.model.verifier, x, y);
    loosest_bound = std::max(loosest_bound, bound / budget);
    const __int128 exact = encoding::EncodedLr(f.encoded, encoding::EncodeVector(codec, x), encoding::EncodeVector(codec, y));
    for (int k = 1; k < 3; ++k) {
      const scenarios::ClientKeys& keys = f.clients[k];
      auto reg = scenarios::RegisterInProcess(*f.servers[k], keys, x, client_rng, server_rng);
      auto ver = scenarios::VerifyInProcess(*f.servers[k], keys, reg.client.card, y, client_rng, server_rng);
      const mpz_class got = he::decrypt(keys.compare.additive.sec, *ver.server.lr);
      if (got.get_d() != static_cast<double>(exact)) ++exact_mismatches;
      const double err = std::abs(got.get_d() / result_scale - lr);
      worst_contract = std::max(worst_contract, err / budget);
      worst_vs_bound = std::max(worst_vs_bound, err / bound);
    }
  }
  // Not part of the verdict: the same draws through the integer pipeline with
  // 12 fractional bits, which the encrypted paths reproduce exactly.
  Rng again = Rng::FromSeed(1109, "acceptance-7");
  encoding::LrScales fine;
  fine.feature = 12;
  fine.matrix = 12;
  const encoding::EncodedVerifier fine_v = encoding::EncodeVerifier(f.trained.model.verifier, fine);
  double worst_fine = 0;
  for (int t = 0; t < 100; ++t) {
    const auto [x, y] = f.Pair(t % 2 == 0, again);
    const double lr = jointbayes::log_likelihood_ratio(f.trained.model.verifier, x, y);
    const __int128 v = encoding::EncodedLr(fine_v, encoding::EncodeVector(fine.feature_codec(), x),
                                           encoding::EncodeVector(fine.feature_codec(), y));
    const double decoded = static_cast<double>(v) / std::ldexp(1.0, fine.result());
    worst_fine = std::max(worst_fine, std::abs(decoded - lr) / (0.01 * (1 + std::abs(lr))));
  }
  return {worst_contract <= 1.0 && worst_vs_bound <= 1.0 && exact_mismatches == 0,
          Fmt("d=16, 8+8 fractional bits, 100 pairs x {S2,S3}: max |error|/(0.01(1+|LR|)) %.4f, max |error|/rigorous "
              "bound %.4f, %ld integer mismatches; rigorous bound up to %.1fx the budget; with 12+12 bits the "
              "integer pipeline gives %.4f",
              worst_contract, worst_vs_bound, exact_mismatches, loosest_bound, worst_fine)};
}

Outcome DecisionAgreement() {
  PipelineFixture& f = Pipeline();
  Rng rng = Rng::FromSeed(1112, "acceptance-8");
  Rng client_rng = Rng::FromSeed(1113, "client"), server_rng = Rng::FromSeed(1114, "server");
  const double threshold = f.trained.model.verifier.threshold;
  int trials = 0, skipped = 0, disagreements = 0, granted = 0, wrong_vs_plain = 0;
  while (trials < 200) {
    const auto [x, y] = f.Pair((trials + skipped) % 2 == 0, rng);
    const double lr = jointbayes::log_likelihood_ratio(f.trained.model.verifier, x, y);
    const double band = 2 * encoding::LrQuantizationBound(f.trained.model.verifier, x, y);
    if (std::abs(lr - threshold) <= band) {
      ++skipped;
      continue;
    }
    bool decisions[3];
    for (int k = 0; k < 3; ++k) {
      ScenarioId s = static_cast<ScenarioId>(k + 1);
      scenarios::ClientKeys keys = f.clients[k];
      if (s == ScenarioId::kS1Plaintext) keys.compare = scenarios::GenerateEphemeralKeys(client_rng, testing::SmallKeySizes());
      auto reg = scenarios::RegisterInProcess(*f.servers[k], keys, x, client_rng, server_rng);
      auto ver = scenarios::VerifyInProcess(*f.servers[k], keys, reg.client.card, y, client_rng, server_rng);
      decisions[k] = ver.client.granted;
    }
    if (decisions[0] != decisions[1] || decisions[1] != decisions[2]) ++disagreements;
    if (decisions[0] != (lr >= threshold)) ++wrong_vs_plain;
    granted += decisions[0] ? 1 : 0;
    ++trials;
  }
  return {disagreements == 0 && wrong_vs_plain == 0,
          Fmt("200 trials (%d marginal skipped, %d granted): %d disagreements, %d differ from plaintext LR", skipped,
              granted, disagreements, wrong_vs_plain)};
}

Outcome SyntheticAccuracy() {
  constexpr int kD = 32;
  jointbayes::SynthConfig config;
  config.d = kD;
  config.n_identities = 500;
  config.images_per_identity = 5;
  config.s_mu = {jointbayes::CovarianceSpec::Kind::kRandomSpd, 1.0, 0.9, 41};
  config.s_eps = {jointbayes::CovarianceSpec::Kind::kRandomSpd, 0.1, 0.9, 42};
  config.seed = 43;
  const jointbayes::SynthData data = jointbayes::Synthesize(config);
  const double ratio = data.s_mu.trace() / data.s_eps.trace();
  const jointbayes::JbParams params = jointbayes::fit_em(jointbayes::GroupRows(data.rows)).params;
  jointbayes::VerifierMatrices v = jointbayes::derive_verifier(params, 0.0);
  Rng cal_rng = Rng::FromSeed(44, "calibration");
  v.threshold = jointbayes::calibrate_threshold(v, jointbayes::SamplePairs(data.s_mu, data.s_eps, 3000, 3000, cal_rng))
                    .threshold;
  Rng test_rng = Rng::FromSeed(45, "held-out");
  const auto held_out = jointbayes::SamplePairs(data.s_mu, data.s_eps, 3000, 3000, test_rng);
  int correct = 0;
  for (const auto& p : held_out) {
    correct += (jointbayes::log_likelihood_ratio(v, p.x1, p.x2) >= v.threshold) == p.same ? 1 : 0;
  }
  const double accuracy = static_cast<double>(correct) / static_cast<double>(held_out.size());
  return {ratio >= 10 && accuracy >= 0.95,
          Fmt("d=%d, trace ratio %.2f, held-out accuracy %.4f on 6000 pairs", kD, ratio, accuracy)};
}

Outcome TimingStructure() {
  const Trained t = TrainModel(32, 1201);
  cli::BenchConfig config;
  config.runs = 5;
  config.in_process = true;
  config.seed = 1202;
  const cli::BenchReport report = cli::RunBench(t.model, config);
  std::fputs(cli::FormatBenchTable(report).c_str(), stdout);
  const auto violations = report.OrderingViolations();
  std::string which;
  for (const auto& [stage, party] : violations) {
    which += std::string(" ") + cli::StageName(stage) + "/" + cli::PartyName(party);
  }
  return {report.populated() == 12 && violations.empty(),
          Fmt("d=32, 2048-bit keys, %zu of 12 cells populated; ordering violations:%s", report.populated(),
              which.empty() ? " none" : which.c_str())};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace privver

int main(int argc, char** argv) {
  using namespace privver;
  SetTestModeForTesting(true);
  const std::vector<Criterion> all = {
      {1, "structured inverse oracle", StructuredInverseOracle},
      {2, "E-step oracle", EStepOracle},
      {3, "EM recovery", EmRecovery},
      {4, "LR equivalence", LrEquivalence},
      {5, "homomorphic properties", HomomorphicProperties},
      {6, "secure comparison", SecureComparison},
      {7, "encrypted-pipeline fidelity", PipelineFidelity},
      {8, "cross-scenario decision agreement", DecisionAgreement},
      {9, "synthetic verification accuracy", SyntheticAccuracy},
      {10, "timing structure", TimingStructure},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && selected.count(c.id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
