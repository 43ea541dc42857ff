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

#ifndef PRIVVER_ENCODING_FIXED_POINT_H_
#define PRIVVER_ENCODING_FIXED_POINT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "privver/jointbayes/jointbayes.h"

namespace privver::encoding {

// value ~= integer / 2^scale_exp, with |integer| < plaintext_bound.
struct FixedPointCodec {
  int scale_exp = 8;
  int64_t plaintext_bound = int64_t{1} << 62;
};

struct ScaledInteger {
  int64_t value = 0;
  int scale_exp = 0;

  bool operator==(const ScaledInteger&) const = default;
};

inline constexpr int kDefaultScaleBits = 8;
// Features and model entries are expected to lie in [-kInputRange, kInputRange].
inline constexpr double kInputRange = 8.0;

// Round-half-even of x * 2^scale_exp; raises kOverflow outside the bound.
ScaledInteger encode(const FixedPointCodec& codec, double x);
double decode(const FixedPointCodec& codec, const ScaledInteger& v);
double decode(const ScaledInteger& v);

enum class ScaleOpKind { kAdd, kMulPlain, kMul };

struct ScaleOp {
  ScaleOpKind kind;
  int operand_scale;
};

// Scale after applying ops left to right to a value at initial_scale.
// Additions require the operand to share the running scale (kScaleMismatch).
int quadratic_scale(int initial_scale, std::span<const ScaleOp> ops);

// Scales used by the likelihood-ratio pipeline.
struct LrScales {
  int feature = kDefaultScaleBits;
  int matrix = kDefaultScaleBits;

  int result() const { return 2 * feature + matrix; }
  FixedPointCodec feature_codec() const;
  FixedPointCodec matrix_codec() const;
  FixedPointCodec result_codec() const;
};

// Integer form of the verifier: A and G row-major at the matrix scale, the
// threshold at the result scale.
struct EncodedVerifier {
  int d = 0;
  LrScales scales;
  std::vector<int64_t> a;
  std::vector<int64_t> g;
  int64_t threshold = 0;

  int64_t a_at(int i, int j) const { return a[static_cast<size_t>(i) * d + j]; }
  int64_t g_at(int i, int j) const { return g[static_cast<size_t>(i) * d + j]; }
};

std::vector<int64_t> EncodeVector(const FixedPointCodec& codec, const jointbayes::Vector& x);
EncodedVerifier EncodeVerifier(const jointbayes::VerifierMatrices& v, LrScales scales = {});

// Largest |encoded LR| any in-range input can produce; callers compare this
// with the plaintext space of the scheme that will carry the value.
double WorstCaseEncodedLr(int d, LrScales scales = {});

// Exact integer pipeline: x'Ax + y'Ay - 2 y'Gx on encoded operands. Every
// encrypted path must decrypt to exactly this value.
__int128 EncodedQuadratic(const EncodedVerifier& v, std::span<const int64_t> x);
__int128 EncodedCross(const EncodedVerifier& v, std::span<const int64_t> x,
                      std::span<const int64_t> y);
__int128 EncodedLr(const EncodedVerifier& v, std::span<const int64_t> x,
                   std::span<const int64_t> y);

// Rigorous bound on |LR(x, y) - decode(EncodedLr(...))| for this instance,
// accounting for rounding of x, y, A and G.
double LrQuantizationBound(const jointbayes::VerifierMatrices& v, const jointbayes::Vector& x,
                           const jointbayes::Vector& y, LrScales scales = {});

// Kronecker product x (x) x as a length d*d vector, row-major: entry i*d+j is
// x_i x_j, matching vec(A) in row-major order.
std::vector<int64_t> KroneckerSelf(std::span<const int64_t> x);

}  // namespace privver::encoding

#endif  // PRIVVER_ENCODING_FIXED_POINT_H_
