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

#include "privver/scenarios/types.h"

#include <algorithm>

#include "privver/common/error.h"

namespace privver::scenarios {
namespace {

constexpr std::string_view kIdCardMagic = "PVID";
constexpr size_t kMaxDimension = 1 << 16;

he::SchemeId SchemeFor(ScenarioId scenario) {
  return scenario == ScenarioId::kS3Leveled ? he::SchemeId::kLeveled : he::SchemeId::kAdditive;
}

void CheckStored(const RegistrationRecord& r, const he::Ciphertext& ct, int scale, int level) {
  if (ct.scheme != SchemeFor(r.scenario)) Fail(ErrorCode::kParseError, "record ciphertext has the wrong scheme");
  if (ct.key_id != r.client_key_id) Fail(ErrorCode::kParseError, "record ciphertext has the wrong key");
  if (ct.scale_exp != scale) Fail(ErrorCode::kParseError, "record ciphertext has the wrong scale");
  if (ct.level != level) Fail(ErrorCode::kParseError, "record ciphertext has the wrong level");
}

}  // namespace

const char* ScenarioName(ScenarioId scenario) {
  switch (scenario) {
    case ScenarioId::kS1Plaintext:
      return "s1";
    case ScenarioId::kS2Additive:
      return "s2";
    case ScenarioId::kS3Leveled:
      return "s3";
  }
  return "?";
}

ScenarioId ParseScenario(std::string_view name) {
  if (name == "s1") return ScenarioId::kS1Plaintext;
  if (name == "s2") return ScenarioId::kS2Additive;
  if (name == "s3") return ScenarioId::kS3Leveled;
  Fail(ErrorCode::kBadParams, "unknown scenario '" + std::string(name) + "' (expected s1, s2 or s3)");
}

ScenarioId ScenarioFromByte(uint8_t v) {
  if (v < 1 || v > 3) Fail(ErrorCode::kParseError, "unknown scenario id " + std::to_string(v));
  return static_cast<ScenarioId>(v);
}

Bytes SerializeIdCard(const IdCard& card) {
  ByteWriter w;
  w.Raw(kIdCardMagic);
  w.Raw(he::SerializeCiphertext(card.enc_id));
  return w.Take();
}

IdCard ParseIdCard(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.Expect(kIdCardMagic);
  IdCard card{he::ParseCiphertext(r.Raw(r.remaining()))};
  if (card.enc_id.scheme != he::SchemeId::kAdditive) Fail(ErrorCode::kParseError, "ID card must be additive");
  return card;
}

void SaveIdCard(const std::string& path, const IdCard& card) { WriteFile(path, SerializeIdCard(card)); }

IdCard LoadIdCard(const std::string& path) { return ParseIdCard(ReadFile(path)); }

Bytes SerializeRecord(const RegistrationRecord& record) {
  ByteWriter w;
  w.U64Le(record.index);
  w.U8(static_cast<uint8_t>(record.scenario));
  w.Raw(record.client_key_id);
  w.I16Le(static_cast<int16_t>(record.quad_scale));
  w.I16Le(static_cast<int16_t>(record.gx_scale));
  if (record.scenario == ScenarioId::kS1Plaintext) {
    w.SignedBigInt(record.quad_plain);
    w.U32Be(static_cast<uint32_t>(record.gx_plain.size()));
    for (const auto& v : record.gx_plain) w.SignedBigInt(v);
  } else {
    if (!record.quad) Fail(ErrorCode::kBadParams, "encrypted record without x'Ax");
    w.Blob(he::SerializeCiphertext(*record.quad));
    w.U32Be(static_cast<uint32_t>(record.gx.size()));
    for (const auto& ct : record.gx) w.Blob(he::SerializeCiphertext(ct));
  }
  return w.Take();
}

RegistrationRecord ParseRecord(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  RegistrationRecord rec;
  rec.index = r.U64Le();
  rec.scenario = ScenarioFromByte(r.U8());
  auto id = r.Raw(rec.client_key_id.size());
  std::copy(id.begin(), id.end(), rec.client_key_id.begin());
  rec.quad_scale = r.I16Le();
  rec.gx_scale = r.I16Le();
  if (rec.scenario == ScenarioId::kS1Plaintext) {
    rec.quad_plain = r.SignedBigInt();
    const uint32_t d = r.U32Be();
    if (d > kMaxDimension) Fail(ErrorCode::kParseError, "record dimension too large");
    for (uint32_t i = 0; i < d; ++i) rec.gx_plain.push_back(r.SignedBigInt());
  } else {
    const int quad_level = rec.scenario == ScenarioId::kS3Leveled ? 1 : 0;
    rec.quad = he::ParseCiphertext(r.Blob());
    CheckStored(rec, *rec.quad, rec.quad_scale, quad_level);
    const uint32_t d = r.U32Be();
    if (d > kMaxDimension) Fail(ErrorCode::kParseError, "record dimension too large");
    for (uint32_t i = 0; i < d; ++i) {
      rec.gx.push_back(he::ParseCiphertext(r.Blob()));
      CheckStored(rec, rec.gx.back(), rec.gx_scale, 0);
    }
  }
  r.ExpectDone();
  return rec;
}

PartyStats StatsFor(const protocols::Channel& ch, double wall_seconds) {
  PartyStats s;
  s.wall_seconds = wall_seconds;
  s.compute_seconds = std::max(0.0, wall_seconds - ch.blocked_seconds());
  s.messages = ch.messages();
  s.bytes = ch.bytes_sent() + ch.bytes_received();
  return s;
}

}  // namespace privver::scenarios
