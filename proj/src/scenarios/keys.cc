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

#include "privver/scenarios/keys.h"

#include "privver/common/error.h"

namespace privver::scenarios {
namespace {

constexpr std::string_view kServerMagic = "PVSK";
constexpr std::string_view kClientMagic = "PVCK";
constexpr uint8_t kKeyFileVersion = 1;

void WritePair(ByteWriter& w, const he::KeyPair& kp) {
  w.Blob(he::SerializePublicKey(kp.pub));
  w.Blob(he::SerializeSecretKey(kp.sec));
}

he::KeyPair ReadPair(ByteReader& r, he::SchemeId expected) {
  he::KeyPair kp;
  kp.pub = he::ParsePublicKey(r.Blob());
  kp.sec = he::ParseSecretKey(r.Blob(), kp.pub);
  if (kp.pub.scheme != expected) Fail(ErrorCode::kParseError, "key file holds a key of the wrong scheme");
  kp.scheme = kp.pub.scheme;
  kp.params = he::SchemeParams::Default(kp.scheme);
  return kp;
}

he::SchemeParams SchemeSizes(he::SchemeId scheme, const KeySizes& sizes) {
  he::SchemeParams p = he::SchemeParams::Default(scheme);
  if (scheme == he::SchemeId::kAdditive) p.modulus_bits = sizes.additive_bits;
  if (scheme == he::SchemeId::kComparison) p.comparison.modulus_bits = sizes.comparison_bits;
  if (scheme == he::SchemeId::kLeveled) p = sizes.leveled;
  return p;
}

}  // namespace

ServerKeys GenerateServerKeys(Rng& rng, const KeySizes& sizes) {
  return {he::keygen(SchemeSizes(he::SchemeId::kAdditive, sizes), rng)};
}

protocols::AliceKeys GenerateEphemeralKeys(Rng& rng, const KeySizes& sizes) {
  return protocols::MakeAliceKeys(rng, sizes.additive_bits, sizes.comparison_bits);
}

ClientKeys GenerateClientKeys(ScenarioId scenario, Rng& rng, const KeySizes& sizes) {
  ClientKeys keys;
  keys.scenario = scenario;
  keys.compare = GenerateEphemeralKeys(rng, sizes);
  if (scenario == ScenarioId::kS2Additive) keys.features = keys.compare.additive;
  if (scenario == ScenarioId::kS3Leveled) keys.features = he::keygen(SchemeSizes(he::SchemeId::kLeveled, sizes), rng);
  return keys;
}

Bytes SerializeServerKeys(const ServerKeys& keys) {
  ByteWriter w;
  w.Raw(kServerMagic);
  w.U8(kKeyFileVersion);
  WritePair(w, keys.additive);
  return w.Take();
}

ServerKeys ParseServerKeys(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.Expect(kServerMagic);
  if (r.U8() != kKeyFileVersion) Fail(ErrorCode::kParseError, "unsupported server key file version");
  ServerKeys keys{ReadPair(r, he::SchemeId::kAdditive)};
  r.ExpectDone();
  return keys;
}

// S2 stores its feature key once; it doubles as the comparison additive key.
Bytes SerializeClientKeys(const ClientKeys& keys) {
  ByteWriter w;
  w.Raw(kClientMagic);
  w.U8(kKeyFileVersion);
  w.U8(static_cast<uint8_t>(keys.scenario));
  WritePair(w, keys.compare.additive);
  WritePair(w, keys.compare.comparison);
  if (keys.scenario == ScenarioId::kS3Leveled) {
    if (!keys.features) Fail(ErrorCode::kBadParams, "S3 client keys need a leveled key");
    WritePair(w, *keys.features);
  }
  return w.Take();
}

ClientKeys ParseClientKeys(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.Expect(kClientMagic);
  if (r.U8() != kKeyFileVersion) Fail(ErrorCode::kParseError, "unsupported client key file version");
  ClientKeys keys;
  keys.scenario = ScenarioFromByte(r.U8());
  keys.compare.additive = ReadPair(r, he::SchemeId::kAdditive);
  keys.compare.comparison = ReadPair(r, he::SchemeId::kComparison);
  if (keys.scenario == ScenarioId::kS2Additive) keys.features = keys.compare.additive;
  if (keys.scenario == ScenarioId::kS3Leveled) keys.features = ReadPair(r, he::SchemeId::kLeveled);
  r.ExpectDone();
  return keys;
}

void SaveServerKeys(const std::string& path, const ServerKeys& keys) { WriteFile(path, SerializeServerKeys(keys)); }
ServerKeys LoadServerKeys(const std::string& path) { return ParseServerKeys(ReadFile(path)); }
void SaveClientKeys(const std::string& path, const ClientKeys& keys) { WriteFile(path, SerializeClientKeys(keys)); }
ClientKeys LoadClientKeys(const std::string& path) { return ParseClientKeys(ReadFile(path)); }

}  // namespace privver::scenarios
