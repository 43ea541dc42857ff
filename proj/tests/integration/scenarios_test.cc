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

#include <gtest/gtest.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <set>
#include <thread>

#include "deployment.h"
#include "expect_code.h"
#include "privver/common/test_mode.h"
#include "privver/protocols/codec.h"
#include "privver/scenarios/db.h"

namespace privver::scenarios {
namespace {

using jointbayes::Vector;
using privver::testing::Deployment;
using privver::testing::ExpectCode;

constexpr ScenarioId kAll[] = {ScenarioId::kS1Plaintext, ScenarioId::kS2Additive, ScenarioId::kS3Leveled};

const Deployment& Dep() {
  static const Deployment dep = [] {
    SetTestModeForTesting(true);
    return privver::testing::MakeDeployment(4, 0.0, 7);
  }();
  return dep;
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / (name + "-" + std::to_string(::getpid()))).string();
}

class ScenariosTest : public ::testing::Test {
 protected:
  void SetUp() override { SetTestModeForTesting(true); }
  void TearDown() override { SetTestModeForTesting(false); }

  Rng client_rng_ = Rng::FromSeed(1, "client");
  Rng server_rng_ = Rng::FromSeed(1, "server");
};

mpz_class ExpectedQuad(const encoding::EncodedVerifier& v, const Vector& x) {
  auto xi = encoding::EncodeVector(v.scales.feature_codec(), x);
  __int128 q = encoding::EncodedQuadratic(v, xi);
  mpz_class out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(q), 0, 0, &q);
  if (q < 0) {
    __int128 neg = -q;
    mpz_import(out.get_mpz_t(), 1, 1, sizeof(neg), 0, 0, &neg);
    out = -out;
  }
  return out;
}

std::vector<mpz_class> ExpectedGx(const encoding::EncodedVerifier& v, const Vector& x) {
  auto xi = encoding::EncodeVector(v.scales.feature_codec(), x);
  std::vector<mpz_class> out;
  for (int i = 0; i < v.d; ++i) {
    mpz_class acc = 0;
    for (int j = 0; j < v.d; ++j) acc += mpz_class(static_cast<long>(v.g_at(i, j))) * static_cast<long>(xi[j]);
    out.push_back(acc);
  }
  return out;
}

// Decrypts a stored record with the client key (S2/S3) or reads it (S1).
std::pair<mpz_class, std::vector<mpz_class>> Open(const RegistrationRecord& rec, const ClientKeys& keys) {
  if (rec.scenario == ScenarioId::kS1Plaintext) return {rec.quad_plain, rec.gx_plain};
  std::vector<mpz_class> gx;
  for (const auto& ct : rec.gx) gx.push_back(he::decrypt(keys.features->sec, ct));
  return {he::decrypt(keys.features->sec, *rec.quad), gx};
}

TEST_F(ScenariosTest, RegisterZeroVectorStoresZeros) {
  for (ScenarioId s : kAll) {
    auto db = Database::InMemory();
    auto server = Dep().MakeServer(s, db.get());
    RegisterRun run = RegisterInProcess(*server, Dep().client(s), Vector::Zero(4), client_rng_, server_rng_);
    ASSERT_EQ(run.server.kind, SessionOutcome::Kind::kRegistered) << run.server.error;
    auto rec = db->Lookup(run.server.index);
    ASSERT_TRUE(rec);
    auto [quad, gx] = Open(*rec, Dep().client(s));
    EXPECT_EQ(quad, 0) << ScenarioName(s);
    for (const auto& v : gx) EXPECT_EQ(v, 0);
  }
}

TEST_F(ScenariosTest, RegisterStoresPlainOracleValues) {
  Rng rng = Rng::FromSeed(3, "features");
  for (ScenarioId s : kAll) {
    auto db = Database::InMemory();
    auto server = Dep().MakeServer(s, db.get());
    Vector x = Dep().Sample(Dep().Identity(rng), rng);
    RegisterRun run = RegisterInProcess(*server, Dep().client(s), x, client_rng_, server_rng_);
    ASSERT_EQ(run.server.kind, SessionOutcome::Kind::kRegistered) << run.server.error;
    auto rec = db->Lookup(run.server.index);
    ASSERT_TRUE(rec);
    EXPECT_EQ(rec->quad_scale, 24);
    EXPECT_EQ(rec->gx_scale, 16);
    auto [quad, gx] = Open(*rec, Dep().client(s));
    EXPECT_EQ(quad, ExpectedQuad(Dep().encoded, x)) << ScenarioName(s);
    EXPECT_EQ(gx, ExpectedGx(Dep().encoded, x)) << ScenarioName(s);
    if (s == ScenarioId::kS3Leveled) {
      EXPECT_EQ(rec->quad->level, 1);
      for (const auto& ct : rec->gx) EXPECT_EQ(ct.level, 0);
    }
  }
}

TEST_F(ScenariosTest, IdentityMatrixHandWorkedCase) {
  // A = I, x = (1, 2): x'Ax = 5 at the result scale.
  jointbayes::VerifierMatrices v;
  v.a = jointbayes::Matrix::Identity(2, 2);
  v.g = jointbayes::Matrix::Zero(2, 2);
  v.threshold = 0;
  encoding::EncodedVerifier enc = encoding::EncodeVerifier(v);
  for (ScenarioId s : {ScenarioId::kS2Additive, ScenarioId::kS3Leveled}) {
    auto db = Database::InMemory();
    Server server({s, enc, {}}, Dep().server_keys, db.get());
    Vector x(2);
    x << 1, 2;
    RegisterRun run = RegisterInProcess(server, Dep().client(s), x, client_rng_, server_rng_);
    ASSERT_EQ(run.server.kind, SessionOutcome::Kind::kRegistered) << run.server.error;
    auto rec = db->Lookup(run.server.index);
    auto [quad, gx] = Open(*rec, Dep().client(s));
    EXPECT_EQ(quad, mpz_class(5) << 24);
    EXPECT_EQ(encoding::decode({quad.get_si(), rec->quad_scale}), 5.0);
  }
}

TEST_F(ScenariosTest, RegisteringTwiceGivesDistinctIndices) {
  for (ScenarioId s : kAll) {
    auto db = Database::InMemory();
    auto server = Dep().MakeServer(s, db.get());
    Vector x = Vector::Constant(4, 0.5);
    auto first = RegisterInProcess(*server, Dep().client(s), x, client_rng_, server_rng_);
    auto second = RegisterInProcess(*server, Dep().client(s), x, client_rng_, server_rng_);
    EXPECT_NE(first.server.index, second.server.index);
    EXPECT_EQ(db->size(), 2u);
  }
}

TEST_F(ScenariosTest, VerifyDecisionsAgreeWithPlaintextAcrossScenarios) {
  Rng rng = Rng::FromSeed(11, "features");
  std::unique_ptr<Database> dbs[3];
  std::unique_ptr<Server> servers[3];
  for (int k = 0; k < 3; ++k) {
    dbs[k] = Database::InMemory();
    servers[k] = Dep().MakeServer(kAll[k], dbs[k].get());
  }
  int granted = 0;
  int checked = 0;
  for (int trial = 0; trial < 6; ++trial) {
    Vector mu = Dep().Identity(rng);
    Vector x = Dep().Sample(mu, rng);
    Vector y = trial % 2 == 0 ? Dep().Sample(mu, rng) : Dep().Sample(Dep().Identity(rng), rng);
    const double lr = jointbayes::log_likelihood_ratio(Dep().verifier, x, y);
    const double band = 2 * encoding::LrQuantizationBound(Dep().verifier, x, y);
    const __int128 exact = encoding::EncodedLr(Dep().encoded, encoding::EncodeVector(Dep().encoded.scales.feature_codec(), x),
                                               encoding::EncodeVector(Dep().encoded.scales.feature_codec(), y));
    for (int k = 0; k < 3; ++k) {
      const ClientKeys& keys = Dep().client(kAll[k]);
      auto reg = RegisterInProcess(*servers[k], keys, x, client_rng_, server_rng_);
      auto ver = VerifyInProcess(*servers[k], keys, reg.client.card, y, client_rng_, server_rng_);
      ASSERT_EQ(ver.server.kind, SessionOutcome::Kind::kVerified) << ver.server.error;
      EXPECT_EQ(ver.server.granted, ver.client.granted);
      // Every path must reproduce the exact integer pipeline.
      mpz_class got = kAll[k] == ScenarioId::kS1Plaintext ? *ver.server.lr_plain
                                                          : he::decrypt(keys.compare.additive.sec, *ver.server.lr);
      EXPECT_EQ(got.get_d(), static_cast<double>(exact)) << ScenarioName(kAll[k]);
      EXPECT_EQ(ver.client.granted, exact >= Dep().encoded.threshold);
      if (std::abs(lr - Dep().verifier.threshold) > band) {
        EXPECT_EQ(ver.client.granted, lr >= Dep().verifier.threshold) << lr;
        ++checked;
      }
      granted += ver.client.granted ? 1 : 0;
    }
  }
  EXPECT_GT(checked, 0);
  EXPECT_GT(granted, 0);
  EXPECT_LT(granted, 18);
}

TEST_F(ScenariosTest, OwnFeatureRowIsGranted) {
  Rng rng = Rng::FromSeed(12, "features");
  for (ScenarioId s : kAll) {
    auto db = Database::InMemory();
    auto server = Dep().MakeServer(s, db.get());
    Vector x = Dep().Sample(Dep().Identity(rng), rng);
    ASSERT_GT(jointbayes::log_likelihood_ratio(Dep().verifier, x, x), Dep().verifier.threshold);
    auto reg = RegisterInProcess(*server, Dep().client(s), x, client_rng_, server_rng_);
    auto ver = VerifyInProcess(*server, Dep().client(s), reg.client.card, x, client_rng_, server_rng_);
    EXPECT_TRUE(ver.client.granted) << ScenarioName(s);
    // A far-away sample is denied.
    Vector far = -x.normalized() * encoding::kInputRange * 0.9;
    ASSERT_LT(jointbayes::log_likelihood_ratio(Dep().verifier, x, far), Dep().verifier.threshold);
    auto deny = VerifyInProcess(*server, Dep().client(s), reg.client.card, far, client_rng_, server_rng_);
    EXPECT_FALSE(deny.client.granted) << ScenarioName(s);
  }
}

TEST_F(ScenariosTest, UnknownIdAbortsAfterRequest) {
  for (ScenarioId s : kAll) {
    auto db = Database::InMemory();
    auto server = Dep().MakeServer(s, db.get());
    IdCard forged{he::encrypt(Dep().server_keys.additive.pub, 999, client_rng_)};
    SessionOutcome server_side;
    protocols::TwoPartyRun run = protocols::RunInProcess(
        [&](protocols::Channel& ch) { VerifyClient(ch, Dep().client(s), forged, Vector::Zero(4), client_rng_); },
        [&](protocols::Channel& ch) { server_side = server->HandleSession(ch, server_rng_); });
    ASSERT_TRUE(run.alice_error);
    try {
      std::rethrow_exception(run.alice_error);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kProtocolAbort);
      EXPECT_EQ(e.message(), "unknown id");
    }
    EXPECT_EQ(server_side.kind, SessionOutcome::Kind::kFailed);
    EXPECT_EQ(server_side.error_code, ErrorCode::kUnknownId);
    // HELLO, HELLO, VERIFY_REQ, ERROR.
    EXPECT_EQ(run.alice.size(), 4u);
  }
}

TEST_F(ScenariosTest, RevokedRecordIsUnknown) {
  auto db = Database::InMemory();
  auto server = Dep().MakeServer(ScenarioId::kS1Plaintext, db.get());
  const ClientKeys& keys = Dep().client(ScenarioId::kS1Plaintext);
  auto reg = RegisterInProcess(*server, keys, Vector::Zero(4), client_rng_, server_rng_);
  db->Revoke(reg.server.index);
  ExpectCode(ErrorCode::kProtocolAbort,
             [&] { VerifyInProcess(*server, keys, reg.client.card, Vector::Zero(4), client_rng_, server_rng_); });
}

TEST_F(ScenariosTest, ScenarioMismatchAborts) {
  auto db = Database::InMemory();
  auto server = Dep().MakeServer(ScenarioId::kS2Additive, db.get());
  ExpectCode(ErrorCode::kProtocolAbort, [&] {
    RegisterInProcess(*server, Dep().client(ScenarioId::kS1Plaintext), Vector::Zero(4), client_rng_, server_rng_);
  });
  ExpectCode(ErrorCode::kBadParams, [&] {
    s1_register(*server, Dep().client(ScenarioId::kS1Plaintext), Vector::Zero(4), client_rng_, server_rng_);
  });
}

TEST_F(ScenariosTest, ClientRejectsOutOfRangeAndWrongDimension) {
  auto db = Database::InMemory();
  auto server = Dep().MakeServer(ScenarioId::kS2Additive, db.get());
  const ClientKeys& keys = Dep().client(ScenarioId::kS2Additive);
  ExpectCode(ErrorCode::kDimensionMismatch,
             [&] { RegisterInProcess(*server, keys, Vector::Zero(3), client_rng_, server_rng_); });
  ExpectCode(ErrorCode::kOverflow,
             [&] { RegisterInProcess(*server, keys, Vector::Constant(4, 9.0), client_rng_, server_rng_); });
}

TEST_F(ScenariosTest, VerifyWithAnotherClientsKeyIsRejected) {
  auto db = Database::InMemory();
  auto server = Dep().MakeServer(ScenarioId::kS2Additive, db.get());
  const ClientKeys& keys = Dep().client(ScenarioId::kS2Additive);
  auto reg = RegisterInProcess(*server, keys, Vector::Zero(4), client_rng_, server_rng_);
  Rng rng = Rng::FromSeed(99, "other");
  ClientKeys other = GenerateClientKeys(ScenarioId::kS2Additive, rng, privver::testing::SmallKeySizes());
  ExpectCode(ErrorCode::kProtocolAbort,
             [&] { VerifyInProcess(*server, other, reg.client.card, Vector::Zero(4), client_rng_, server_rng_); });
}

// Channel that records every message its endpoint receives.
class RecordingChannel : public protocols::Channel {
 public:
  explicit RecordingChannel(std::unique_ptr<protocols::Channel> inner) : inner_(std::move(inner)) {}
  std::vector<protocols::Message> received;

 protected:
  void SendFrame(Bytes frame) override { inner_->Send(protocols::DecodeFrame(frame)); }
  Bytes ReceiveFrame() override {
    protocols::Message m = inner_->Receive();
    received.push_back(m);
    return protocols::EncodeFrame(m);
  }

 private:
  std::unique_ptr<protocols::Channel> inner_;
};

// Every ciphertext the server receives in S2/S3 must be under a client key.
void ExpectOnlyClientCiphertexts(const std::vector<protocols::Message>& msgs, const ClientKeys& client,
                                 const he::KeyId& server_key, bool* saw_blinded) {
  std::set<he::KeyId> client_ids{client.compare.additive.key_id(), client.compare.comparison.key_id()};
  if (client.features) client_ids.insert(client.features->key_id());
  size_t ciphertexts = 0;
  for (const auto& m : msgs) {
    ByteReader r(m.payload);
    auto check = [&](const he::Ciphertext& ct) {
      EXPECT_NE(ct.key_id, server_key);
      EXPECT_TRUE(client_ids.count(ct.key_id)) << protocols::MessageTypeName(m.type);
      ++ciphertexts;
    };
    using protocols::MessageType;
    if (m.type == MessageType::kRegisterFeatures || m.type == MessageType::kVerifyFeatures) {
      while (!r.done()) {
        for (const auto& ct : protocols::ReadCiphertexts(r, 1 << 20)) check(ct);
      }
    } else if (m.type == MessageType::kSubprotocol) {
      const auto id = static_cast<protocols::ProtocolId>(r.U8());
      const uint8_t step = r.U8();
      if (id == protocols::ProtocolId::kSecureMatMul && step == 1) {
        protocols::ReadPublicKey(r);
        r.U32Be();
        r.U32Be();
        for (const auto& ct : protocols::ReadCiphertexts(r, 1 << 20)) check(ct);
      } else if (id == protocols::ProtocolId::kDgkCompare && step == 1) {
        for (const auto& ct : protocols::ReadCiphertexts(r, 1 << 20)) check(ct);
      } else if (id == protocols::ProtocolId::kSecureCompare && step == 1) {
        EXPECT_TRUE(client_ids.count(protocols::ReadPublicKey(r).key_id));
      } else if (r.remaining() > 0) {
        // Single-ciphertext steps: DGK result, blinded inner product result,
        // the re-encrypted bridge value and the comparison bits.
        check(protocols::ReadCiphertext(r));
        if (id == protocols::ProtocolId::kBlindedInnerProduct || id == protocols::ProtocolId::kLeveledBridge) {
          *saw_blinded = true;
        }
      }
    }
  }
  EXPECT_GT(ciphertexts, 0u);
}

TEST_F(ScenariosTest, ServerSeesOnlyClientCiphertexts) {
  Rng rng = Rng::FromSeed(21, "features");
  for (ScenarioId s : {ScenarioId::kS2Additive, ScenarioId::kS3Leveled}) {
    auto db = Database::InMemory();
    auto server = Dep().MakeServer(s, db.get());
    const ClientKeys& keys = Dep().client(s);
    Vector x = Dep().Sample(Dep().Identity(rng), rng);
    std::vector<protocols::Message> seen;
    IdCard card;
    for (int op = 0; op < 2; ++op) {
      auto [a, b] = protocols::CreateInProcessPair();
      RecordingChannel recorder(std::move(b));
      std::thread worker([&] { server->HandleSession(recorder, server_rng_); });
      if (op == 0) {
        card = RegisterClient(*a, keys, x, client_rng_).card;
      } else {
        VerifyClient(*a, keys, card, x, client_rng_);
      }
      worker.join();
      seen.insert(seen.end(), recorder.received.begin(), recorder.received.end());
    }
    bool saw_blinded = false;
    ExpectOnlyClientCiphertexts(seen, keys, Dep().server_keys.additive.key_id(), &saw_blinded);
    EXPECT_TRUE(saw_blinded) << ScenarioName(s);
  }
}

TEST_F(ScenariosTest, SeededSessionsAreReproducible) {
  auto run_once = [&] {
    auto db = Database::InMemory();
    auto server = Dep().MakeServer(ScenarioId::kS2Additive, db.get());
    Rng c = Rng::FromSeed(5, "client");
    Rng s = Rng::FromSeed(5, "server");
    const ClientKeys& keys = Dep().client(ScenarioId::kS2Additive);
    Vector x = Vector::LinSpaced(4, -1, 1);
    auto reg = RegisterInProcess(*server, keys, x, c, s);
    auto ver = VerifyInProcess(*server, keys, reg.client.card, x, c, s);
    return std::make_pair(ver.client.transcript.Serialize(), ver.server.transcript.Serialize());
  };
  EXPECT_EQ(run_once(), run_once());
}

TEST(DatabaseTest, RecordSerializationRoundTrips) {
  SetTestModeForTesting(true);
  Rng rng = Rng::FromSeed(4, "db");
  std::vector<RegistrationRecord> records;
  RegistrationRecord plain;
  plain.index = 7;
  plain.quad_scale = 24;
  plain.gx_scale = 16;
  plain.quad_plain = mpz_class("-123456789012345678901234567890");
  plain.gx_plain = {1, -2, 0};
  records.push_back(plain);
  for (ScenarioId s : {ScenarioId::kS2Additive, ScenarioId::kS3Leveled}) {
    const he::KeyPair& kp = *Dep().client(s).features;
    RegistrationRecord rec;
    rec.index = 8;
    rec.scenario = s;
    rec.client_key_id = kp.key_id();
    rec.quad_scale = 24;
    rec.gx_scale = 16;
    he::Ciphertext q = he::encrypt(kp.pub, 5, rng, 12);
    rec.quad = s == ScenarioId::kS3Leveled ? he::he_mul(kp.pub, q, q) : he::encrypt(kp.pub, -5, rng, 24);
    for (int i = 0; i < 3; ++i) rec.gx.push_back(he::encrypt(kp.pub, i, rng, 16));
    records.push_back(rec);
  }
  for (const auto& rec : records) {
    Bytes once = SerializeRecord(rec);
    Bytes twice = SerializeRecord(ParseRecord(once));
    EXPECT_EQ(once, twice);
  }
  // Metadata that contradicts the scenario is rejected.
  RegistrationRecord bad = records[1];
  bad.gx_scale = 15;
  ExpectCode(ErrorCode::kParseError, [&] { ParseRecord(SerializeRecord(bad)); });
  SetTestModeForTesting(false);
}

TEST(DatabaseTest, FileSurvivesReopenAndTornTail) {
  const std::string path = TempPath("privver-db");
  std::remove(path.c_str());
  RegistrationRecord rec;
  rec.quad_plain = 42;
  rec.gx_plain = {1, 2};
  {
    auto db = Database::Open(path);
    EXPECT_EQ(db->Append(rec), 1u);
    EXPECT_EQ(db->Append(rec), 2u);
    EXPECT_EQ(db->Append(rec), 3u);
    db->Revoke(2);
    ExpectCode(ErrorCode::kUnknownId, [&] { db->Revoke(2); });
  }
  {
    // Simulate a crash mid-append.
    FILE* f = std::fopen(path.c_str(), "ab");
    const uint8_t partial[] = {0, 0, 1, 0, 1, 9};
    std::fwrite(partial, 1, sizeof(partial), f);
    std::fclose(f);
  }
  {
    auto db = Database::Open(path);
    EXPECT_EQ(db->size(), 2u);
    EXPECT_TRUE(db->Contains(1));
    EXPECT_FALSE(db->Contains(2));
    auto got = db->Lookup(3);
    ASSERT_TRUE(got);
    EXPECT_EQ(got->index, 3u);
    EXPECT_EQ(got->quad_plain, 42);
    // Indices keep increasing past revoked ones.
    EXPECT_EQ(db->Append(rec), 4u);
  }
  EXPECT_EQ(Database::Open(path)->size(), 3u);
  {
    FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("NOTADB", f);
    std::fclose(f);
  }
  ExpectCode(ErrorCode::kParseError, [&] { Database::Open(path); });
  std::remove(path.c_str());
}

TEST(DatabaseTest, ConcurrentAppendsAndLookups) {
  auto db = Database::InMemory();
  RegistrationRecord rec;
  rec.gx_plain = {3};
  std::vector<std::thread> threads;
  std::atomic<int> found{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) {
        uint64_t idx = db->Append(rec);
        auto lock = db->LockIndex(idx);
        if (db->Lookup(idx)) ++found;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(found.load(), 200);
  EXPECT_EQ(db->size(), 200u);
}

TEST(KeyFilesTest, RoundTrip) {
  for (ScenarioId s : kAll) {
    const ClientKeys& keys = Dep().client(s);
    ClientKeys back = ParseClientKeys(SerializeClientKeys(keys));
    EXPECT_EQ(back.scenario, s);
    EXPECT_EQ(back.compare.additive.key_id(), keys.compare.additive.key_id());
    EXPECT_EQ(back.compare.comparison.key_id(), keys.compare.comparison.key_id());
    EXPECT_EQ(back.features.has_value(), keys.features.has_value());
    if (keys.features) {
      EXPECT_EQ(back.features->key_id(), keys.features->key_id());
    }
  }
  ServerKeys server = ParseServerKeys(SerializeServerKeys(Dep().server_keys));
  EXPECT_EQ(server.additive.key_id(), Dep().server_keys.additive.key_id());
  IdCard card{he::encrypt(server.additive.pub, 17, *std::make_unique<Rng>(Rng::FromSeed(1, "card")))};
  IdCard back = ParseIdCard(SerializeIdCard(card));
  EXPECT_EQ(he::decrypt(server.additive.sec, back.enc_id), 17);
  ExpectCode(ErrorCode::kParseError, [] { ParseIdCard(Bytes{'P', 'V', 'I', 'X'}); });
}

TEST(ServeTest, ConcurrentTcpSessions) {
  SetTestModeForTesting(true);
  auto db = Database::InMemory();
  auto server = Dep().MakeServer(ScenarioId::kS1Plaintext, db.get());
  protocols::TcpListener listener("127.0.0.1", 0);
  std::atomic<bool> stop{false};
  std::atomic<int> verified{0};
  Rng server_rng = Rng::FromSeed(8, "serve");
  std::thread serve([&] {
    server->Serve(listener, server_rng, stop, 6, [&](const SessionOutcome& o) {
      if (o.kind == SessionOutcome::Kind::kVerified && o.granted) ++verified;
    });
  });
  std::vector<std::thread> clients;
  std::atomic<int> granted{0};
  for (int c = 0; c < 3; ++c) {
    clients.emplace_back([&, c] {
      Rng rng = Rng::FromSeed(100 + c, "tcp-client");
      const ClientKeys& keys = Dep().client(ScenarioId::kS1Plaintext);
      Vector x = Vector::Constant(4, 0.25 * (c + 1));
      IdCard card;
      {
        auto ch = protocols::ConnectTcp("127.0.0.1", listener.port());
        card = RegisterClient(*ch, keys, x, rng).card;
      }
      auto ch = protocols::ConnectTcp("127.0.0.1", listener.port());
      if (VerifyClient(*ch, keys, card, x, rng).granted) ++granted;
    });
  }
  for (auto& t : clients) t.join();
  serve.join();
  EXPECT_EQ(granted.load(), 3);
  EXPECT_EQ(verified.load(), 3);
  EXPECT_EQ(db->size(), 3u);
  SetTestModeForTesting(false);
}

}  // namespace
}  // namespace privver::scenarios
