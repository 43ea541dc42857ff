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

#include <cmath>
#include <string>

#include "privver/common/error.h"

namespace privver::encoding {

ScaledInteger encode(const FixedPointCodec& codec, double x) {
  if (codec.scale_exp < 0) Fail(ErrorCode::kBadParams, "negative scale exponent");
  if (!std::isfinite(x)) Fail(ErrorCode::kOverflow, "cannot encode a non-finite value");
  // nearbyint honours the default round-to-nearest-even mode.
  double scaled = std::nearbyint(std::ldexp(x, codec.scale_exp));
  if (!(std::abs(scaled) < static_cast<double>(codec.plaintext_bound))) {
    Fail(ErrorCode::kOverflow, "value " + std::to_string(x) + " exceeds the plaintext bound");
  }
  return {static_cast<int64_t>(scaled), codec.scale_exp};
}

double decode(const FixedPointCodec&, const ScaledInteger& v) { return decode(v); }

double decode(const ScaledInteger& v) {
  return std::ldexp(static_cast<double>(v.value), -v.scale_exp);
}

int quadratic_scale(int initial_scale, std::span<const ScaleOp> ops) {
  int scale = initial_scale;
  for (const ScaleOp& op : ops) {
    switch (op.kind) {
      case ScaleOpKind::kAdd:
        if (op.operand_scale != scale) {
          Fail(ErrorCode::kScaleMismatch, "adding scale " + std::to_string(op.operand_scale) +
                                              " to scale " + std::to_string(scale));
        }
        break;
      case ScaleOpKind::kMulPlain:
      case ScaleOpKind::kMul:
        scale += op.operand_scale;
        break;
    }
  }
  return scale;
}

namespace {

int64_t RangeBound(int scale) {
  return static_cast<int64_t>(std::ldexp(kInputRange, scale)) + 1;
}

}  // namespace

FixedPointCodec LrScales::feature_codec() const { return {feature, RangeBound(feature)}; }
FixedPointCodec LrScales::matrix_codec() const { return {matrix, RangeBound(matrix)}; }
FixedPointCodec LrScales::result_codec() const { return {result(), int64_t{1} << 62}; }

std::vector<int64_t> EncodeVector(const FixedPointCodec& codec, const jointbayes::Vector& x) {
  std::vector<int64_t> out(static_cast<size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = encode(codec, x[i]).value;
  return out;
}

EncodedVerifier EncodeVerifier(const jointbayes::VerifierMatrices& v, LrScales scales) {
  EncodedVerifier out;
  out.d = v.d();
  out.scales = scales;
  FixedPointCodec mc = scales.matrix_codec();
  out.a.reserve(static_cast<size_t>(out.d) * out.d);
  out.g.reserve(static_cast<size_t>(out.d) * out.d);
  for (int i = 0; i < out.d; ++i) {
    for (int j = 0; j < out.d; ++j) {
      out.a.push_back(encode(mc, v.a(i, j)).value);
      out.g.push_back(encode(mc, v.g(i, j)).value);
    }
  }
  out.threshold = encode(scales.result_codec(), v.threshold).value;
  return out;
}

double WorstCaseEncodedLr(int d, LrScales scales) {
  double f = static_cast<double>(scales.feature_codec().plaintext_bound - 1);
  double m = static_cast<double>(scales.matrix_codec().plaintext_bound - 1);
  // Two quadratic terms plus twice the cross term, each at most d^2 f^2 m.
  return 4.0 * static_cast<double>(d) * d * f * f * m;
}

__int128 EncodedQuadratic(const EncodedVerifier& v, std::span<const int64_t> x) {
  if (static_cast<int>(x.size()) != v.d) Fail(ErrorCode::kDimensionMismatch, "feature length");
  __int128 total = 0;
  for (int i = 0; i < v.d; ++i) {
    __int128 row = 0;
    for (int j = 0; j < v.d; ++j) row += static_cast<__int128>(v.a_at(i, j)) * x[j];
    total += row * x[i];
  }
  return total;
}

__int128 EncodedCross(const EncodedVerifier& v, std::span<const int64_t> x,
                      std::span<const int64_t> y) {
  if (static_cast<int>(x.size()) != v.d || static_cast<int>(y.size()) != v.d) {
    Fail(ErrorCode::kDimensionMismatch, "feature length");
  }
  __int128 total = 0;
  for (int i = 0; i < v.d; ++i) {
    __int128 row = 0;
    for (int j = 0; j < v.d; ++j) row += static_cast<__int128>(v.g_at(i, j)) * x[j];
    total += row * y[i];
  }
  return total;
}

__int128 EncodedLr(const EncodedVerifier& v, std::span<const int64_t> x,
                   std::span<const int64_t> y) {
  return EncodedQuadratic(v, x) + EncodedQuadratic(v, y) - 2 * EncodedCross(v, x, y);
}

double LrQuantizationBound(const jointbayes::VerifierMatrices& v, const jointbayes::Vector& x,
                           const jointbayes::Vector& y, LrScales scales) {
  const double ux = std::ldexp(0.5, -scales.feature);
  const double um = std::ldexp(0.5, -scales.matrix);
  // |q'Mp - x'Ny| <= sum_ij |M_ij| (|x_i| u + |y_j| u + u^2) + um |x_i||y_j|
  // where q, p, M are the rounded operands and N the exact matrix.
  auto term = [&](const jointbayes::Matrix& m, const jointbayes::Vector& l,
                  const jointbayes::Vector& r) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double mq = std::abs(m(i, j)) + um;
        total += mq * (std::abs(l[i]) * ux + std::abs(r[j]) * ux + ux * ux) +
                 um * std::abs(l[i]) * std::abs(r[j]);
      }
    }
    return total;
  };
  double threshold_error = std::ldexp(0.5, -scales.result());
  return term(v.a, x, x) + term(v.a, y, y) + 2.0 * term(v.g, y, x) + threshold_error;
}

std::vector<int64_t> KroneckerSelf(std::span<const int64_t> x) {
  std::vector<int64_t> out;
  out.reserve(x.size() * x.size());
  for (int64_t a : x) {
    for (int64_t b : x) out.push_back(a * b);
  }
  return out;
}

}  // namespace privver::encoding
