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

// Brute-force references for the joint Bayesian model. Everything here builds
// the full stacked covariance and inverts it numerically, independent of the
// closed forms in the library.

#ifndef PRIVVER_TESTS_SUPPORT_JB_ORACLE_H_
#define PRIVVER_TESTS_SUPPORT_JB_ORACLE_H_

#include <Eigen/Dense>

#include <vector>

#include "privver/common/rng.h"

namespace privver::testing {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Random SPD matrix with eigenvalues in [lo, hi].
inline Matrix RandomSpdMatrix(int d, Rng& rng, double lo = 0.2, double hi = 3.0) {
  Matrix gauss(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) gauss(i, j) = rng.Normal();
  }
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  Vector ev(d);
  for (int i = 0; i < d; ++i) ev[i] = lo + (hi - lo) * rng.UniformReal();
  Matrix out = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

inline Vector RandomVector(int d, Rng& rng, double scale = 1.0) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * rng.Normal();
  return v;
}

// h = [mu, eps_1, ..., eps_m]; x = P h with x_i = mu + eps_i.
inline Matrix SigmaH(const Matrix& s_mu, const Matrix& s_eps, int m) {
  const int d = static_cast<int>(s_mu.rows());
  Matrix out = Matrix::Zero((m + 1) * d, (m + 1) * d);
  out.topLeftCorner(d, d) = s_mu;
  for (int j = 1; j <= m; ++j) out.block(j * d, j * d, d, d) = s_eps;
  return out;
}

inline Matrix Projection(int d, int m) {
  Matrix p = Matrix::Zero(m * d, (m + 1) * d);
  for (int i = 0; i < m; ++i) {
    p.block(i * d, 0, d, d) = Matrix::Identity(d, d);
    p.block(i * d, (i + 1) * d, d, d) = Matrix::Identity(d, d);
  }
  return p;
}

inline Matrix SigmaX(const Matrix& s_mu, const Matrix& s_eps, int m) {
  Matrix p = Projection(static_cast<int>(s_mu.rows()), m);
  return p * SigmaH(s_mu, s_eps, m) * p.transpose();
}

inline Vector Stack(const std::vector<Vector>& xs) {
  const Eigen::Index d = xs.front().size();
  Vector out(d * static_cast<Eigen::Index>(xs.size()));
  for (size_t i = 0; i < xs.size(); ++i) out.segment(static_cast<Eigen::Index>(i) * d, d) = xs[i];
  return out;
}

// E(h | x) = Sigma_h P^T Sigma_x^{-1} x.
inline Vector PosteriorMean(const Matrix& s_mu, const Matrix& s_eps,
                            const std::vector<Vector>& xs) {
  const int m = static_cast<int>(xs.size());
  const int d = static_cast<int>(s_mu.rows());
  Matrix sx_inv = SigmaX(s_mu, s_eps, m).inverse();
  return SigmaH(s_mu, s_eps, m) * Projection(d, m).transpose() * sx_inv * Stack(xs);
}

// Cov(h | x) = Sigma_h - Sigma_h P^T Sigma_x^{-1} P Sigma_h.
inline Matrix PosteriorCov(const Matrix& s_mu, const Matrix& s_eps, int m) {
  const int d = static_cast<int>(s_mu.rows());
  Matrix sh = SigmaH(s_mu, s_eps, m);
  Matrix p = Projection(d, m);
  return sh - sh * p.transpose() * SigmaX(s_mu, s_eps, m).inverse() * p * sh;
}

// -[x1;x2]' Sigma_I^{-1} [x1;x2] + [x1;x2]' Sigma_E^{-1} [x1;x2].
inline double DirectLlr(const Matrix& s_mu, const Matrix& s_eps, const Vector& x1,
                        const Vector& x2) {
  const int d = static_cast<int>(s_mu.rows());
  Matrix sigma_i(2 * d, 2 * d);
  sigma_i << s_mu + s_eps, s_mu, s_mu, s_mu + s_eps;
  Matrix sigma_e = Matrix::Zero(2 * d, 2 * d);
  sigma_e.topLeftCorner(d, d) = s_mu + s_eps;
  sigma_e.bottomRightCorner(d, d) = s_mu + s_eps;
  Vector x(2 * d);
  x << x1, x2;
  return -x.dot(sigma_i.inverse() * x) + x.dot(sigma_e.inverse() * x);
}

inline double GaussianLogDensity(const Matrix& cov, const Vector& x) {
  Eigen::LLT<Matrix> llt(cov);
  double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * (x.size() * std::log(2.0 * 3.14159265358979323846) + logdet +
                 x.dot(llt.solve(x)));
}

inline double InfNorm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace privver::testing

#endif  // PRIVVER_TESTS_SUPPORT_JB_ORACLE_H_
