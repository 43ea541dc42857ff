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

#include "privver/protocols/matmul.h"

#include <string>

#include "privver/common/error.h"
#include "privver/protocols/codec.h"

namespace privver::protocols {
namespace {

enum MatMulStep : uint8_t { kMatrix = 1, kMatAck = 2 };
enum InnerStep : uint8_t { kBlindedVector = 1, kInnerResult = 2 };

constexpr size_t kMaxEntries = size_t{1} << 24;

mpz_class CenteredMod(const mpz_class& v, const mpz_class& n) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  if (2 * r > n) r -= n;
  return r;
}

// Modulus of the plaintext space: n for the additive scheme, t for leveled.
mpz_class PlaintextModulus(const he::PublicKey& pk) { return 2 * he::plaintext_half_range(pk) + 1; }

}  // namespace

void secure_mat_mul_alice(Channel& ch, const he::KeyPair& keys, const IntMatrix& x, int x_scale_exp,
                          Rng& rng) {
  if (x.rows == 0 || x.cols == 0) Fail(ErrorCode::kEmptyInput, "empty matrix");
  if (x.values.size() != x.rows * x.cols) Fail(ErrorCode::kDimensionMismatch, "matrix storage size");
  std::vector<mpz_class> plain = kernels::ToMpz(x.values);
  std::vector<he::Ciphertext> cts = kernels::parallel::EncryptBatch(keys.pub, plain, x_scale_exp, rng);
  ByteWriter w;
  WritePublicKey(w, keys.pub);
  w.U32Be(static_cast<uint32_t>(x.rows));
  w.U32Be(static_cast<uint32_t>(x.cols));
  WriteCiphertexts(w, cts);
  SendStep(ch, ProtocolId::kSecureMatMul, kMatrix, w.Take());
  ReceiveStep(ch, ProtocolId::kSecureMatMul, kMatAck);
}

EncryptedMatrix secure_mat_mul_bob(Channel& ch, const IntMatrix& y, int y_scale_exp,
                                   const mpz_class& x_abs_bound) {
  if (y.values.size() != y.rows * y.cols) Fail(ErrorCode::kDimensionMismatch, "matrix storage size");
  Bytes body = ReceiveStep(ch, ProtocolId::kSecureMatMul, kMatrix);
  EncryptedMatrix x = AbortOnMalformed([&] {
    ByteReader r(body);
    EncryptedMatrix m;
    m.pk = ReadPublicKey(r);
    m.rows = r.U32Be();
    m.cols = r.U32Be();
    if (m.rows == 0 || m.cols == 0 || m.rows * m.cols > kMaxEntries) {
      Fail(ErrorCode::kParseError, "bad matrix shape");
    }
    m.values = ReadCiphertexts(r, m.rows * m.cols);
    r.ExpectDone();
    if (m.values.size() != m.rows * m.cols) Fail(ErrorCode::kParseError, "matrix entry count");
    for (const auto& ct : m.values) he::ValidateCiphertext(m.pk, ct);
    return m;
  });
  if (x.pk.scheme == he::SchemeId::kComparison) Fail(ErrorCode::kBadParams, "unsupported scheme");
  if (x.cols != y.rows) {
    Fail(ErrorCode::kDimensionMismatch,
         "cannot multiply " + std::to_string(x.rows) + "x" + std::to_string(x.cols) + " by " +
             std::to_string(y.rows) + "x" + std::to_string(y.cols));
  }

  // Worst-case |(XY)_ij| <= bound * max_j sum_r |Y_rj|.
  const mpz_class half = he::plaintext_half_range(x.pk);
  IntMatrix yt{y.cols, y.rows, std::vector<int64_t>(y.values.size())};
  for (size_t j = 0; j < y.cols; ++j) {
    mpz_class col = 0;
    for (size_t r = 0; r < y.rows; ++r) {
      const int64_t v = y.at(r, j);
      yt.values[j * y.rows + r] = v;
      col += abs(mpz_class(static_cast<long>(v)));
    }
    if (col * x_abs_bound > half) Fail(ErrorCode::kOverflow, "matrix product may exceed the plaintext range");
  }

  EncryptedMatrix out{x.pk, x.rows, y.cols, {}};
  out.values.reserve(x.rows * y.cols);
  for (size_t i = 0; i < x.rows; ++i) {
    std::span<const he::Ciphertext> row(x.values.data() + i * x.cols, x.cols);
    auto prod = kernels::parallel::MatVecPlain(x.pk, yt, row, y_scale_exp);
    for (auto& ct : prod) out.values.push_back(std::move(ct));
  }
  SendStep(ch, ProtocolId::kSecureMatMul, kMatAck, {});
  return out;
}

void blinded_inner_product_alice(Channel& ch, const he::KeyPair& keys, std::span<const int64_t> y,
                                 int y_scale_exp, Rng& rng) {
  if (keys.scheme != he::SchemeId::kAdditive) Fail(ErrorCode::kBadParams, "additive key required");
  Bytes body = ReceiveStep(ch, ProtocolId::kBlindedInnerProduct, kBlindedVector);
  std::vector<he::Ciphertext> w_cts = AbortOnMalformed([&] {
    ByteReader r(body);
    auto cts = ReadCiphertexts(r, kMaxEntries);
    r.ExpectDone();
    for (const auto& ct : cts) he::ValidateCiphertext(keys.pub, ct);
    return cts;
  });
  if (w_cts.size() != y.size()) Fail(ErrorCode::kDimensionMismatch, "blinded vector length differs from y");
  if (w_cts.empty()) Fail(ErrorCode::kEmptyInput, "empty vector");
  const int w_scale = w_cts.front().scale_exp;
  for (const auto& ct : w_cts) {
    if (ct.scale_exp != w_scale) Fail(ErrorCode::kScaleMismatch, "blinded vector scales differ");
  }

  std::vector<mpz_class> w = kernels::parallel::DecryptBatch(keys.sec, w_cts);
  mpz_class dot = 0;
  for (size_t i = 0; i < y.size(); ++i) dot += w[i] * static_cast<long>(y[i]);
  const mpz_class n = PlaintextModulus(keys.pub);
  ByteWriter out;
  WriteCiphertext(out, he::encrypt(keys.pub, CenteredMod(dot, n), rng, w_scale + y_scale_exp));
  SendStep(ch, ProtocolId::kBlindedInnerProduct, kInnerResult, out.Take());
}

he::Ciphertext blinded_inner_product_bob(Channel& ch, const he::PublicKey& pk,
                                         std::span<const he::Ciphertext> v,
                                         std::span<const he::Ciphertext> y, Rng& rng) {
  if (pk.scheme != he::SchemeId::kAdditive) Fail(ErrorCode::kBadParams, "additive key required");
  if (v.size() != y.size()) Fail(ErrorCode::kDimensionMismatch, "[v] and [y] lengths differ");
  if (v.empty()) Fail(ErrorCode::kEmptyInput, "empty vector");
  const mpz_class half = he::plaintext_half_range(pk);
  const mpz_class n = 2 * half + 1;

  // r_i uniform over Z_n, so w = v + r reveals nothing about v.
  std::vector<mpz_class> r(v.size());
  for (auto& ri : r) ri = rng.UniformMpz(n) - half;
  std::vector<he::Ciphertext> blinded;
  blinded.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) blinded.push_back(he::he_add_plain(pk, v[i], r[i]));
  blinded = kernels::parallel::RerandomizeBatch(pk, blinded, rng);
  {
    ByteWriter w;
    WriteCiphertexts(w, blinded);
    SendStep(ch, ProtocolId::kBlindedInnerProduct, kBlindedVector, w.Take());
  }

  Bytes body = ReceiveStep(ch, ProtocolId::kBlindedInnerProduct, kInnerResult);
  he::Ciphertext yw = AbortOnMalformed([&] {
    ByteReader rd(body);
    he::Ciphertext ct = ReadCiphertext(rd);
    rd.ExpectDone();
    he::ValidateCiphertext(pk, ct);
    return ct;
  });
  const int v_scale = v.front().scale_exp;
  // y^T v = y^T w - sum_i r_i y_i.
  he::Ciphertext yr = he::he_mul_plain(pk, y[0], r[0], v_scale);
  for (size_t i = 1; i < y.size(); ++i) yr = he::he_add(pk, yr, he::he_mul_plain(pk, y[i], r[i], v_scale));
  if (yr.scale_exp != yw.scale_exp) Fail(ErrorCode::kProtocolAbort, "inner product scale mismatch");
  return he::he_sub(pk, yw, yr);
}

}  // namespace privver::protocols
