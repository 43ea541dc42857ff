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

#ifndef PRIVVER_JOINTBAYES_JOINTBAYES_H_
#define PRIVVER_JOINTBAYES_JOINTBAYES_H_

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace privver::jointbayes {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct IdentityGroup {
  std::string identity_id;
  std::vector<Vector> images;

  int m() const { return static_cast<int>(images.size()); }
};

struct JbParams {
  Matrix s_mu;
  Matrix s_eps;

  int d() const { return static_cast<int>(s_mu.rows()); }
};

struct StructuredInverse {
  Matrix f;
  Matrix g;
  int m = 1;
  // (m S_mu + S_eps)^-1, kept for the cancellation-free posterior forms.
  Matrix big_inv;
};

// Posterior means of the latent identity and per-image variation. The
// covariance fields are filled by e_step and used by the exact M-step; they
// are the same for every image of a group, so one matrix is kept.
struct LatentEstimates {
  Vector mu;
  std::vector<Vector> eps;
  std::optional<Matrix> mu_cov;
  std::optional<Matrix> eps_cov;
};

struct VerifierMatrices {
  Matrix a;
  Matrix g;
  double threshold = 0.0;

  int d() const { return static_cast<int>(a.rows()); }
};

struct InverseOptions {
  // Retry with lambda*I added (lambda = 1e-9 * reference trace) when the
  // unregularized factorization fails the condition guard.
  bool regularize = true;
};

inline constexpr double kConditionLimit = 1e12;
inline constexpr double kRegularization = 1e-9;

// Inverse of a symmetric positive-definite matrix via Cholesky; raises
// kSingularMatrix when the reciprocal condition estimate is below
// 1/kConditionLimit. reg_trace is the trace used to size the ridge.
Matrix InverseSpd(const Matrix& m, double reg_trace, InverseOptions options = {});

StructuredInverse structured_inverse(const Matrix& s_mu, const Matrix& s_eps, int m,
                                     InverseOptions options = {});

// Keeps one StructuredInverse per distinct group size.
class InverseCache {
 public:
  InverseCache(const JbParams& params, InverseOptions options = {})
      : params_(params), options_(options) {}

  const StructuredInverse& Get(int m);
  // Computes entries for every size up front so Get is read-only afterwards.
  void Prepare(const std::vector<IdentityGroup>& groups);
  const StructuredInverse& Find(int m) const;

 private:
  const JbParams& params_;
  InverseOptions options_;
  std::map<int, StructuredInverse> cache_;
};

LatentEstimates e_step(const JbParams& params, const IdentityGroup& group);
LatentEstimates e_step(const JbParams& params, const StructuredInverse& inv,
                       const IdentityGroup& group);

JbParams m_step(const std::vector<LatentEstimates>& latents);

// Gaussian log-density of the stacked group under N(0, Sigma_x).
double group_log_likelihood(const JbParams& params, const StructuredInverse& inv,
                            const IdentityGroup& group);
double total_log_likelihood(const JbParams& params, const std::vector<IdentityGroup>& groups);

struct EmConfig {
  double tol = 1e-5;
  int max_iters = 200;
  // Use the M-step on posterior means only, without posterior covariances.
  bool point_estimate_mstep = false;
  bool track_log_likelihood = false;
  bool parallel = true;
};

struct EmResult {
  JbParams params;
  int iterations = 0;
  bool converged = false;
  std::vector<double> log_likelihood;
};

JbParams initial_params(const std::vector<IdentityGroup>& groups);

EmResult fit_em(const std::vector<IdentityGroup>& groups, const EmConfig& config = {});

VerifierMatrices derive_verifier(const JbParams& params, double threshold);

double log_likelihood_ratio(const VerifierMatrices& verifier, const Vector& x1,
                            const Vector& x2);

struct LabeledPair {
  Vector x1;
  Vector x2;
  bool same = false;
};

struct Calibration {
  double threshold = 0.0;
  double accuracy = 0.0;
};

Calibration calibrate_scores(const std::vector<double>& scores,
                             const std::vector<bool>& same);
Calibration calibrate_threshold(const VerifierMatrices& verifier,
                                const std::vector<LabeledPair>& pairs);

}  // namespace privver::jointbayes

#endif  // PRIVVER_JOINTBAYES_JOINTBAYES_H_
