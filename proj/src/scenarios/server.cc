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

#include "privver/scenarios/server.h"

#include <cmath>
#include <memory>
#include <thread>
#include <vector>

#include "privver/common/timer.h"
#include "privver/kernels/kernels.h"
#include "privver/protocols/bridge.h"
#include "privver/protocols/codec.h"
#include "privver/protocols/matmul.h"
#include "wire.h"

namespace privver::scenarios {
namespace {

using protocols::Channel;
using protocols::MessageType;

std::vector<const he::Ciphertext*> Pointers(std::span<const he::Ciphertext> cts) {
  std::vector<const he::Ciphertext*> out;
  out.reserve(cts.size());
  for (const auto& ct : cts) out.push_back(&ct);
  return out;
}

// Parses a ciphertext vector and checks count, key, scale and level.
std::vector<he::Ciphertext> ReadFeatureCts(ByteReader& r, const he::PublicKey& pk, size_t count, int scale) {
  std::vector<he::Ciphertext> cts = protocols::ReadCiphertexts(r, count);
  if (cts.size() != count) {
    Fail(ErrorCode::kDimensionMismatch,
         "expected " + std::to_string(count) + " ciphertexts, got " + std::to_string(cts.size()));
  }
  for (const auto& ct : cts) {
    he::ValidateCiphertext(pk, ct);
    if (ct.scale_exp != scale) Fail(ErrorCode::kScaleMismatch, "feature ciphertext has the wrong scale");
    if (ct.level != 0) Fail(ErrorCode::kDepthExceeded, "feature ciphertexts must be fresh");
  }
  return cts;
}

int64_t FeatureBound(const encoding::LrScales& scales) {
  return static_cast<int64_t>(std::ldexp(encoding::kInputRange, scales.feature));
}

he::Ciphertext Lr(const he::PublicKey& pk, const he::Ciphertext& quad_x, const he::Ciphertext& quad_y,
                  const he::Ciphertext& cross) {
  he::Ciphertext lr = he::he_add(pk, quad_x, quad_y);
  lr = he::he_sub(pk, lr, cross);
  return he::he_sub(pk, lr, cross);
}

}  // namespace

Server::Server(ServerConfig config, ServerKeys keys, Database* db)
    : config_(std::move(config)), keys_(std::move(keys)), db_(db) {
  if (db_ == nullptr) Fail(ErrorCode::kBadParams, "server needs a database");
  if (keys_.additive.scheme != he::SchemeId::kAdditive) Fail(ErrorCode::kBadParams, "server key must be additive");
  const auto& v = config_.verifier;
  if (v.d < 1 || v.a.size() != static_cast<size_t>(v.d) * v.d || v.g.size() != v.a.size()) {
    Fail(ErrorCode::kDimensionMismatch, "encoded verifier has inconsistent dimensions");
  }
  shift_ = 1;
  shift_ <<= config_.compare.l - 1;
  // Shifted LR and threshold must land in [0, 2^l).
  if (encoding::WorstCaseEncodedLr(v.d, v.scales) >= shift_.get_d() ||
      std::abs(static_cast<double>(v.threshold)) >= shift_.get_d()) {
    Fail(ErrorCode::kOverflow, "comparison bit length too small for the encoded likelihood ratio");
  }
}

SessionOutcome Server::HandleSession(Channel& ch, Rng& rng) {
  Stopwatch wall;
  SessionOutcome out;
  try {
    wire::ClientHello hello = wire::DecodeClientHello(wire::Expect(ch, MessageType::kHello));
    if (hello.scenario != config_.scenario) {
      Fail(ErrorCode::kBadParams, std::string("server runs scenario ") + ScenarioName(config_.scenario));
    }
    wire::ServerHello reply{config_.scenario, config_.verifier.d, config_.verifier.scales, config_.compare,
                            keys_.additive.pub};
    wire::Send(ch, MessageType::kHello, wire::EncodeServerHello(reply));
    if (hello.op == wire::Op::kRegister) {
      Register(ch, rng, &out);
    } else {
      Verify(ch, rng, &out);
    }
  } catch (const Error& e) {
    out.kind = SessionOutcome::Kind::kFailed;
    out.error_code = e.code();
    out.error = e.message();
  } catch (const std::exception& e) {
    out.kind = SessionOutcome::Kind::kFailed;
    out.error_code = ErrorCode::kProtocolAbort;
    out.error = e.what();
  }
  if (out.kind == SessionOutcome::Kind::kFailed) {
    try {
      protocols::SendError(ch, out.error);
    } catch (const std::exception&) {
      // The peer is already gone.
    }
  }
  out.transcript = ch.transcript();
  out.stats = StatsFor(ch, wall.Seconds());
  return out;
}

void Server::Register(Channel& ch, Rng& rng, SessionOutcome* out) {
  const auto& v = config_.verifier;
  const auto& sc = v.scales;
  const size_t d = static_cast<size_t>(v.d);
  Bytes req = wire::Expect(ch, MessageType::kRegisterReq);
  std::vector<he::PublicKey> client_keys = protocols::AbortOnMalformed([&] {
    ByteReader r(req);
    auto keys = wire::ReadKeys(r);
    r.ExpectDone();
    return keys;
  });
  Bytes features = wire::Expect(ch, MessageType::kRegisterFeatures);
  ByteReader r(features);

  RegistrationRecord rec;
  rec.scenario = config_.scenario;
  rec.quad_scale = sc.result();
  rec.gx_scale = sc.feature + sc.matrix;
  kernels::IntMatrix a{d, d, v.a};
  kernels::IntMatrix g{d, d, v.g};

  switch (config_.scenario) {
    case ScenarioId::kS1Plaintext: {
      if (!client_keys.empty()) Fail(ErrorCode::kProtocolAbort, "S1 registration carries no client key");
      auto cts = protocols::AbortOnMalformed(
          [&] { return ReadFeatureCts(r, keys_.additive.pub, d, sc.feature); });
      r.ExpectDone();
      std::vector<mpz_class> x = kernels::parallel::DecryptBatch(keys_.additive.sec, cts);
      std::vector<int64_t> xi(d);
      const int64_t bound = FeatureBound(sc);
      for (size_t i = 0; i < d; ++i) {
        if (abs(x[i]) > bound) Fail(ErrorCode::kOverflow, "feature outside the supported range");
        xi[i] = x[i].get_si();
      }
      rec.quad_plain = wire::ToMpz(encoding::EncodedQuadratic(v, xi));
      for (size_t i = 0; i < d; ++i) {
        mpz_class acc = 0;
        for (size_t j = 0; j < d; ++j) acc += mpz_class(static_cast<long>(v.g_at(i, j))) * static_cast<long>(xi[j]);
        rec.gx_plain.push_back(acc);
      }
      break;
    }
    case ScenarioId::kS2Additive: {
      if (client_keys.size() != 1 || client_keys[0].scheme != he::SchemeId::kAdditive) {
        Fail(ErrorCode::kProtocolAbort, "S2 registration needs the client's additive key");
      }
      const he::PublicKey& pk = client_keys[0];
      auto kron = protocols::AbortOnMalformed([&] { return ReadFeatureCts(r, pk, d * d, 2 * sc.feature); });
      r.ExpectDone();
      // [Gx] via the secure matrix product with X = x^T and Y = G^T.
      kernels::IntMatrix gt{d, d, std::vector<int64_t>(d * d)};
      for (size_t i = 0; i < d; ++i) {
        for (size_t j = 0; j < d; ++j) gt.values[j * d + i] = v.g_at(i, j);
      }
      protocols::EncryptedMatrix gx = protocols::secure_mat_mul_bob(ch, gt, sc.matrix, FeatureBound(sc));
      if (gx.pk.key_id != pk.key_id) Fail(ErrorCode::kKeyMismatch, "matrix product used another key");
      if (gx.rows != 1 || gx.cols != d) Fail(ErrorCode::kDimensionMismatch, "x must be a 1 x d matrix");
      for (const auto& ct : gx.values) {
        if (ct.scale_exp != rec.gx_scale) Fail(ErrorCode::kScaleMismatch, "[Gx] has the wrong scale");
      }
      auto ptrs = Pointers(kron);
      rec.quad = he::he_dot_plain(pk, ptrs, v.a, sc.matrix);
      rec.gx = std::move(gx.values);
      rec.client_key_id = pk.key_id;
      break;
    }
    case ScenarioId::kS3Leveled: {
      if (client_keys.size() != 1 || client_keys[0].scheme != he::SchemeId::kLeveled) {
        Fail(ErrorCode::kProtocolAbort, "S3 registration needs the client's leveled key");
      }
      const he::PublicKey& pk = client_keys[0];
      if (encoding::WorstCaseEncodedLr(v.d, sc) >= he::plaintext_half_range(pk).get_d()) {
        Fail(ErrorCode::kOverflow, "client plaintext modulus too small for the encoded likelihood ratio");
      }
      auto x = protocols::AbortOnMalformed([&] { return ReadFeatureCts(r, pk, d, sc.feature); });
      r.ExpectDone();
      // x'Ax = sum_i [x_i] (x) (sum_j A_ij [x_j]): d products, one relinearization.
      std::vector<he::Ciphertext> ax = kernels::parallel::MatVecPlain(pk, a, x, sc.matrix);
      rec.quad = he::he_inner_product(pk, Pointers(x), Pointers(ax));
      rec.gx = kernels::parallel::MatVecPlain(pk, g, x, sc.matrix);
      rec.client_key_id = pk.key_id;
      break;
    }
  }

  const uint64_t index = db_->Append(rec);
  IdCard card{he::encrypt(keys_.additive.pub, mpz_class(static_cast<unsigned long>(index)), rng)};
  wire::Send(ch, MessageType::kIdCard, SerializeIdCard(card));
  out->kind = SessionOutcome::Kind::kRegistered;
  out->index = index;
}

void Server::Verify(Channel& ch, Rng& rng, SessionOutcome* out) {
  const auto& v = config_.verifier;
  const auto& sc = v.scales;
  const size_t d = static_cast<size_t>(v.d);
  const int result_scale = sc.result();

  Bytes req = wire::Expect(ch, MessageType::kVerifyReq);
  IdCard card;
  std::vector<he::PublicKey> client_keys;
  protocols::AbortOnMalformed([&] {
    ByteReader r(req);
    card = ParseIdCard(r.Blob());
    client_keys = wire::ReadKeys(r);
    r.ExpectDone();
    he::ValidateCiphertext(keys_.additive.pub, card.enc_id);
  });
  const mpz_class id = he::decrypt(keys_.additive.sec, card.enc_id);
  if (id < 1 || !id.fits_ulong_p()) Fail(ErrorCode::kUnknownId, "unknown id");
  const uint64_t index = id.get_ui();
  auto lock = db_->LockIndex(index);
  std::optional<RegistrationRecord> found = db_->Lookup(index);
  if (!found || found->scenario != config_.scenario) Fail(ErrorCode::kUnknownId, "unknown id");
  const RegistrationRecord& rec = *found;
  if (rec.d() != d) Fail(ErrorCode::kDimensionMismatch, "record dimension differs from the model");

  // Keys the client will use as Alice; checked again when the comparison starts.
  std::optional<protocols::AlicePublicKeys> alice;
  const he::PublicKey* feature_pk = nullptr;
  const size_t expected_keys = config_.scenario == ScenarioId::kS1Plaintext   ? 0
                               : config_.scenario == ScenarioId::kS2Additive ? 1
                                                                             : 3;
  if (client_keys.size() != expected_keys) Fail(ErrorCode::kProtocolAbort, "wrong number of client keys");
  if (expected_keys > 0) {
    feature_pk = &client_keys[0];
    if (feature_pk->key_id != rec.client_key_id) Fail(ErrorCode::kKeyMismatch, "record belongs to another key");
  }
  if (config_.scenario == ScenarioId::kS3Leveled) {
    if (client_keys[1].scheme != he::SchemeId::kAdditive || client_keys[2].scheme != he::SchemeId::kComparison) {
      Fail(ErrorCode::kProtocolAbort, "S3 verification needs additive and comparison keys");
    }
    alice = protocols::AlicePublicKeys{client_keys[1], client_keys[2]};
  }
  wire::Send(ch, MessageType::kVerifyReq, {});

  Bytes features = wire::Expect(ch, MessageType::kVerifyFeatures);
  ByteReader r(features);
  mpz_class lr_plain;
  std::optional<he::Ciphertext> lr;  // under the client's additive key
  kernels::IntMatrix a{d, d, v.a};

  switch (config_.scenario) {
    case ScenarioId::kS1Plaintext: {
      auto cts = protocols::AbortOnMalformed(
          [&] { return ReadFeatureCts(r, keys_.additive.pub, d, sc.feature); });
      r.ExpectDone();
      std::vector<mpz_class> y = kernels::parallel::DecryptBatch(keys_.additive.sec, cts);
      std::vector<int64_t> yi(d);
      const int64_t bound = FeatureBound(sc);
      for (size_t i = 0; i < d; ++i) {
        if (abs(y[i]) > bound) Fail(ErrorCode::kOverflow, "feature outside the supported range");
        yi[i] = y[i].get_si();
      }
      mpz_class cross = 0;
      for (size_t i = 0; i < d; ++i) cross += rec.gx_plain[i] * static_cast<long>(yi[i]);
      lr_plain = rec.quad_plain + wire::ToMpz(encoding::EncodedQuadratic(v, yi)) - 2 * cross;
      break;
    }
    case ScenarioId::kS2Additive: {
      const he::PublicKey& pk = *feature_pk;
      std::vector<he::Ciphertext> kron;
      std::vector<he::Ciphertext> y;
      protocols::AbortOnMalformed([&] {
        kron = ReadFeatureCts(r, pk, d * d, 2 * sc.feature);
        y = ReadFeatureCts(r, pk, d, sc.feature);
        r.ExpectDone();
      });
      he::Ciphertext quad_y = he::he_dot_plain(pk, Pointers(kron), v.a, sc.matrix);
      he::Ciphertext cross = protocols::blinded_inner_product_bob(ch, pk, rec.gx, y, rng);
      lr = Lr(pk, *rec.quad, quad_y, cross);
      break;
    }
    case ScenarioId::kS3Leveled: {
      const he::PublicKey& pk = *feature_pk;
      auto y = protocols::AbortOnMalformed([&] { return ReadFeatureCts(r, pk, d, sc.feature); });
      r.ExpectDone();
      std::vector<he::Ciphertext> ay = kernels::parallel::MatVecPlain(pk, a, y, sc.matrix);
      he::Ciphertext quad_y = he::he_inner_product(pk, Pointers(y), Pointers(ay));
      he::Ciphertext cross = he::he_inner_product(pk, Pointers(y), Pointers(rec.gx));
      he::Ciphertext lr_leveled = Lr(pk, *rec.quad, quad_y, cross);
      lr = protocols::leveled_to_additive_bob(ch, pk, *alice, lr_leveled, rng);
      break;
    }
  }
  if (lr && lr->scale_exp != result_scale) Fail(ErrorCode::kScaleMismatch, "likelihood ratio has the wrong scale");

  if (lr) {
    out->lr = lr;
  } else {
    out->lr_plain = lr_plain;
  }

  // granted iff threshold <= LR, compared as l-bit values shifted by 2^(l-1).
  const mpz_class top = 2 * shift_ - 1;
  protocols::secure_compare_bob(
      ch, config_.compare,
      [&](const protocols::AlicePublicKeys& keys) {
        if (config_.scenario == ScenarioId::kS2Additive && keys.additive.key_id != feature_pk->key_id) {
          Fail(ErrorCode::kKeyMismatch, "comparison key differs from the registered key");
        }
        if (alice && (keys.additive.key_id != alice->additive.key_id ||
                      keys.comparison.key_id != alice->comparison.key_id)) {
          Fail(ErrorCode::kKeyMismatch, "comparison keys differ from the announced keys");
        }
        he::Ciphertext a_ct = he::encrypt(keys.additive, v.threshold + shift_, rng, result_scale);
        he::Ciphertext b_ct;
        if (lr) {
          b_ct = he::he_add_plain(keys.additive, *lr, shift_);
        } else {
          // S1 knows LR in the clear; saturating keeps the decision exact.
          mpz_class b = lr_plain + shift_;
          if (b < 0) b = 0;
          if (b > top) b = top;
          b_ct = he::encrypt(keys.additive, b, rng, result_scale);
        }
        return std::make_pair(a_ct, b_ct);
      },
      rng);

  Bytes decision = wire::Expect(ch, MessageType::kDecision);
  if (decision.size() != 1 || decision[0] > 1) Fail(ErrorCode::kProtocolAbort, "malformed decision");
  out->kind = SessionOutcome::Kind::kVerified;
  out->index = index;
  out->granted = decision[0] == 1;
}

void Server::Serve(protocols::TcpListener& listener, Rng& rng, const std::atomic<bool>& stop, size_t max_sessions,
                   const std::function<void(const SessionOutcome&)>& on_outcome) {
  std::vector<std::thread> workers;
  std::mutex report_mu;
  Rng base = rng.Split();
  for (size_t n = 0; !stop.load() && (max_sessions == 0 || n < max_sessions); ++n) {
    std::unique_ptr<Channel> ch;
    try {
      ch = listener.Accept();
    } catch (const Error& e) {
      if (stop.load() || e.code() == ErrorCode::kIoFailure) break;
      throw;
    }
    workers.emplace_back([this, &report_mu, &on_outcome, session_rng = base.Fork(n), ch = std::move(ch)]() mutable {
      SessionOutcome outcome = HandleSession(*ch, session_rng);
      if (on_outcome) {
        std::lock_guard lock(report_mu);
        on_outcome(outcome);
      }
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace privver::scenarios
