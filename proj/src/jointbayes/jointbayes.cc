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

#include "privver/jointbayes/jointbayes.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "privver/common/error.h"

namespace privver::jointbayes {
namespace {

Matrix Symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool TryInverse(const Matrix& m, Matrix* out) {
  if (!m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return false;
  double rcond = llt.rcond();
  if (!(rcond >= 1.0 / kConditionLimit)) return false;
  *out = Symmetrized(llt.solve(Matrix::Identity(m.rows(), m.cols())));
  return out->allFinite();
}

void CheckSquare(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    Fail(ErrorCode::kDimensionMismatch, std::string(what) + " must be square and non-empty");
  }
}

void CheckGroup(const JbParams& params, const IdentityGroup& group) {
  if (group.images.empty()) {
    Fail(ErrorCode::kEmptyInput, "identity group " + group.identity_id + " has no images");
  }
  for (const Vector& x : group.images) {
    if (x.size() != params.s_mu.rows()) {
      Fail(ErrorCode::kDimensionMismatch, "feature dimension does not match model");
    }
  }
}

Vector GroupSum(const IdentityGroup& group) {
  Vector sum = Vector::Zero(group.images.front().size());
  for (const Vector& x : group.images) sum += x;
  return sum;
}

double RelativeChange(const Matrix& next, const Matrix& prev, double floor) {
  return (next - prev).norm() / std::max(next.norm(), floor);
}

}  // namespace

Matrix InverseSpd(const Matrix& m, double reg_trace, InverseOptions options) {
  CheckSquare(m, "matrix");
  Matrix out;
  if (TryInverse(m, &out)) return out;
  if (options.regularize) {
    double lambda = kRegularization * reg_trace;
    if (lambda > 0 && std::isfinite(lambda)) {
      Matrix ridge = m;
      ridge.diagonal().array() += lambda;
      if (TryInverse(ridge, &out)) return out;
    }
  }
  Fail(ErrorCode::kSingularMatrix, "matrix is not numerically positive definite");
}

StructuredInverse structured_inverse(const Matrix& s_mu, const Matrix& s_eps, int m,
                                     InverseOptions options) {
  CheckSquare(s_mu, "s_mu");
  if (s_eps.rows() != s_mu.rows() || s_eps.cols() != s_mu.cols()) {
    Fail(ErrorCode::kDimensionMismatch, "s_mu and s_eps differ in shape");
  }
  if (m < 1) Fail(ErrorCode::kBadParams, "group size must be at least 1");
  double ref = s_mu.trace() + s_eps.trace();
  StructuredInverse inv;
  inv.m = m;
  inv.f = InverseSpd(s_eps, ref, options);
  Matrix big = static_cast<double>(m) * s_mu + s_eps;
  inv.big_inv = InverseSpd(big, ref, options);
  inv.g = -inv.big_inv * s_mu * inv.f;
  return inv;
}

const StructuredInverse& InverseCache::Get(int m) {
  auto it = cache_.find(m);
  if (it == cache_.end()) {
    it = cache_.emplace(m, structured_inverse(params_.s_mu, params_.s_eps, m, options_)).first;
  }
  return it->second;
}

void InverseCache::Prepare(const std::vector<IdentityGroup>& groups) {
  for (const IdentityGroup& g : groups) Get(g.m());
}

const StructuredInverse& InverseCache::Find(int m) const {
  auto it = cache_.find(m);
  if (it == cache_.end()) Fail(ErrorCode::kBadParams, "group size not prepared");
  return it->second;
}

LatentEstimates e_step(const JbParams& params, const IdentityGroup& group) {
  CheckGroup(params, group);
  StructuredInverse inv = structured_inverse(params.s_mu, params.s_eps, group.m());
  return e_step(params, inv, group);
}

LatentEstimates e_step(const JbParams& params, const StructuredInverse& inv,
                       const IdentityGroup& group) {
  CheckGroup(params, group);
  if (inv.m != group.m()) Fail(ErrorCode::kBadParams, "inverse prepared for another group size");
  Vector sum = GroupSum(group);
  // S_mu (F + mG) = S_mu M^-1 and x_j + S_eps G sum = x_j - mu with
  // M = m S_mu + S_eps. The rearranged forms avoid the cancellation between F
  // and mG that destroys precision once S_eps becomes small.
  LatentEstimates out;
  out.mu = params.s_mu * (inv.big_inv * sum);
  out.eps.reserve(group.images.size());
  for (const Vector& x : group.images) out.eps.push_back(x - out.mu);
  // Cov(mu|x) = S_mu - S_mu (mF + m^2 G) S_mu and
  // Cov(eps_j|x) = S_eps - S_eps (F + G) S_eps both reduce to S_mu M^-1 S_eps.
  Matrix cov = Symmetrized(params.s_mu * inv.big_inv * params.s_eps);
  out.mu_cov = cov;
  out.eps_cov = std::move(cov);
  return out;
}

JbParams m_step(const std::vector<LatentEstimates>& latents) {
  if (latents.empty()) Fail(ErrorCode::kEmptyInput, "m_step needs at least one identity");
  const Eigen::Index d = latents.front().mu.size();
  Matrix s_mu = Matrix::Zero(d, d);
  Matrix s_eps = Matrix::Zero(d, d);
  size_t images = 0;
  for (const LatentEstimates& l : latents) {
    if (l.mu.size() != d) Fail(ErrorCode::kDimensionMismatch, "latent dimension mismatch");
    s_mu.noalias() += l.mu * l.mu.transpose();
    if (l.mu_cov) s_mu += *l.mu_cov;
    for (const Vector& e : l.eps) {
      if (e.size() != d) Fail(ErrorCode::kDimensionMismatch, "latent dimension mismatch");
      s_eps.noalias() += e * e.transpose();
      if (l.eps_cov) s_eps += *l.eps_cov;
    }
    images += l.eps.size();
  }
  JbParams out;
  out.s_mu = Symmetrized(s_mu / static_cast<double>(latents.size()));
  out.s_eps = images > 0 ? Matrix(Symmetrized(s_eps / static_cast<double>(images)))
                         : Matrix(Matrix::Zero(d, d));
  return out;
}

double group_log_likelihood(const JbParams& params, const StructuredInverse& inv,
                            const IdentityGroup& group) {
  CheckGroup(params, group);
  const int m = group.m();
  const double d = static_cast<double>(params.s_mu.rows());
  // log det Sigma_x = (m-1) log det S_eps + log det(S_eps + m S_mu).
  Eigen::LLT<Matrix> eps_llt(params.s_eps);
  Eigen::LLT<Matrix> big_llt(params.s_eps + static_cast<double>(m) * params.s_mu);
  if (eps_llt.info() != Eigen::Success || big_llt.info() != Eigen::Success) {
    Fail(ErrorCode::kSingularMatrix, "log-likelihood needs positive definite covariances");
  }
  auto log_det = [](const Eigen::LLT<Matrix>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  };
  double logdet = (m - 1) * log_det(eps_llt) + log_det(big_llt);
  Vector sum = GroupSum(group);
  double quad = sum.dot(inv.g * sum);
  for (const Vector& x : group.images) quad += x.dot(inv.f * x);
  return -0.5 * (m * d * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

double total_log_likelihood(const JbParams& params, const std::vector<IdentityGroup>& groups) {
  InverseCache cache(params);
  double total = 0.0;
  for (const IdentityGroup& g : groups) total += group_log_likelihood(params, cache.Get(g.m()), g);
  return total;
}

JbParams initial_params(const std::vector<IdentityGroup>& groups) {
  if (groups.empty()) Fail(ErrorCode::kEmptyInput, "no identities");
  const Eigen::Index d = groups.front().images.at(0).size();
  Vector mean = Vector::Zero(d);
  size_t n = 0;
  for (const IdentityGroup& g : groups) {
    for (const Vector& x : g.images) {
      if (x.size() != d) Fail(ErrorCode::kDimensionMismatch, "inconsistent feature dimension");
      if (!x.allFinite()) Fail(ErrorCode::kBadParams, "non-finite feature value");
      mean += x;
      ++n;
    }
  }
  mean /= static_cast<double>(n);
  Matrix cov = Matrix::Zero(d, d);
  for (const IdentityGroup& g : groups) {
    for (const Vector& x : g.images) {
      Vector c = x - mean;
      cov.noalias() += c * c.transpose();
    }
  }
  cov /= static_cast<double>(n);
  double trace = cov.trace();
  double ridge = trace > 0 ? 1e-6 * trace : 1e-6;
  Matrix start = Symmetrized(cov / 2.0);
  start.diagonal().array() += ridge;
  return {start, start};
}

EmResult fit_em(const std::vector<IdentityGroup>& groups, const EmConfig& config) {
  if (groups.size() < 2) Fail(ErrorCode::kEmptyInput, "EM needs at least two identities");
  bool has_repeat = std::any_of(groups.begin(), groups.end(),
                                [](const IdentityGroup& g) { return g.m() >= 2; });
  if (!has_repeat) {
    Fail(ErrorCode::kBadParams, "at least one identity needs two or more images");
  }
  EmResult result;
  result.params = initial_params(groups);
  for (const IdentityGroup& g : groups) CheckGroup(result.params, g);

  std::vector<LatentEstimates> latents(groups.size());
  for (int iter = 0; iter < config.max_iters; ++iter) {
    InverseCache cache(result.params);
    cache.Prepare(groups);
    const JbParams& params = result.params;
    if (config.track_log_likelihood) {
      double ll = 0.0;
      for (const IdentityGroup& g : groups) ll += group_log_likelihood(params, cache.Find(g.m()), g);
      result.log_likelihood.push_back(ll);
    }
    const long n = static_cast<long>(groups.size());
#pragma omp parallel for schedule(dynamic, 16) if (config.parallel)
    for (long i = 0; i < n; ++i) {
      latents[i] = e_step(params, cache.Find(groups[i].m()), groups[i]);
      if (config.point_estimate_mstep) {
        latents[i].mu_cov.reset();
        latents[i].eps_cov.reset();
      }
    }
    JbParams next = m_step(latents);
    double floor = 1e-12 * (next.s_mu.norm() + next.s_eps.norm()) +
                   std::numeric_limits<double>::min();
    double d_mu = RelativeChange(next.s_mu, params.s_mu, floor);
    double d_eps = RelativeChange(next.s_eps, params.s_eps, floor);
    result.params = std::move(next);
    result.iterations = iter + 1;
    if (d_mu < config.tol && d_eps < config.tol) {
      result.converged = true;
      break;
    }
  }
  if (config.track_log_likelihood) {
    result.log_likelihood.push_back(total_log_likelihood(result.params, groups));
  }
  return result;
}

VerifierMatrices derive_verifier(const JbParams& params, double threshold) {
  if (!std::isfinite(threshold)) Fail(ErrorCode::kBadParams, "threshold must be finite");
  StructuredInverse inv = structured_inverse(params.s_mu, params.s_eps, 2);
  Matrix total = params.s_mu + params.s_eps;
  Matrix total_inv = InverseSpd(total, total.trace());
  VerifierMatrices v;
  v.a = Symmetrized(total_inv - (inv.f + inv.g));
  v.g = inv.g;
  v.threshold = threshold;
  return v;
}

double log_likelihood_ratio(const VerifierMatrices& verifier, const Vector& x1,
                            const Vector& x2) {
  if (x1.size() != verifier.a.rows() || x2.size() != verifier.a.rows()) {
    Fail(ErrorCode::kDimensionMismatch, "feature dimension does not match verifier");
  }
  // The cross term is averaged over both orders so r(x1,x2) == r(x2,x1) holds
  // exactly even when G carries rounding asymmetry.
  double cross = 0.5 * (x1.dot(verifier.g * x2) + x2.dot(verifier.g * x1));
  return x1.dot(verifier.a * x1) + x2.dot(verifier.a * x2) - 2.0 * cross;
}

Calibration calibrate_scores(const std::vector<double>& scores,
                             const std::vector<bool>& same) {
  if (scores.size() != same.size()) Fail(ErrorCode::kDimensionMismatch, "labels and scores differ");
  size_t positives = std::count(same.begin(), same.end(), true);
  size_t negatives = same.size() - positives;
  if (positives == 0 || negatives == 0) {
    Fail(ErrorCode::kDegenerateLabels, "calibration needs both classes");
  }
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) Fail(ErrorCode::kBadParams, "non-finite score");
    sorted.emplace_back(scores[i], same[i]);
  }
  std::sort(sorted.begin(), sorted.end());

  // Candidate k accepts every score >= the k-th distinct value; k == number of
  // distinct values rejects everything. Correct = accepted positives plus
  // rejected negatives.
  std::vector<double> distinct;
  size_t correct = positives;  // k = 0: accept all.
  size_t best_correct = correct;
  size_t best_k = 0;
  size_t i = 0;
  size_t k = 0;
  while (i < sorted.size()) {
    double value = sorted[i].first;
    distinct.push_back(value);
    while (i < sorted.size() && sorted[i].first == value) {
      if (sorted[i].second) {
        --correct;
      } else {
        ++correct;
      }
      ++i;
    }
    ++k;
    if (correct >= best_correct) {
      best_correct = correct;
      best_k = k;
    }
  }
  Calibration out;
  out.accuracy = static_cast<double>(best_correct) / static_cast<double>(sorted.size());
  if (best_k == 0) {
    out.threshold = distinct.front();
  } else if (best_k == distinct.size()) {
    out.threshold = std::nextafter(distinct.back(), std::numeric_limits<double>::infinity());
  } else {
    double lo = distinct[best_k - 1];
    double hi = distinct[best_k];
    double mid = lo + 0.5 * (hi - lo);
    out.threshold = mid > lo ? mid : hi;
  }
  return out;
}

Calibration calibrate_threshold(const VerifierMatrices& verifier,
                                const std::vector<LabeledPair>& pairs) {
  std::vector<double> scores;
  std::vector<bool> same;
  scores.reserve(pairs.size());
  for (const LabeledPair& p : pairs) {
    scores.push_back(log_likelihood_ratio(verifier, p.x1, p.x2));
    same.push_back(p.same);
  }
  return calibrate_scores(scores, same);
}

}  // namespace privver::jointbayes
