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

#ifndef PRIVVER_SCENARIOS_SERVER_H_
#define PRIVVER_SCENARIOS_SERVER_H_

#include <atomic>
#include <functional>
#include <optional>
#include <string>

#include "privver/common/error.h"
#include "privver/common/rng.h"
#include "privver/encoding/fixed_point.h"
#include "privver/protocols/channel.h"
#include "privver/protocols/compare.h"
#include "privver/scenarios/db.h"
#include "privver/scenarios/keys.h"
#include "privver/scenarios/types.h"

namespace privver::scenarios {

struct ServerConfig {
  ScenarioId scenario = ScenarioId::kS1Plaintext;
  encoding::EncodedVerifier verifier;
  protocols::ComparisonParams compare;
};

struct SessionOutcome {
  enum class Kind { kRegistered, kVerified, kFailed };

  Kind kind = Kind::kFailed;
  uint64_t index = 0;
  bool granted = false;
  ErrorCode error_code = ErrorCode::kProtocolAbort;
  std::string error;
  protocols::SessionTranscript transcript;
  PartyStats stats;
  // The likelihood ratio as the server held it before the comparison: in the
  // clear for S1, otherwise under the client's additive key. Kept for
  // fidelity checks; never sent anywhere.
  std::optional<mpz_class> lr_plain;
  std::optional<he::Ciphertext> lr;
};

// Server role for one deployment scenario. Sessions are independent and may
// run concurrently; each needs its own channel and RNG.
class Server {
 public:
  Server(ServerConfig config, ServerKeys keys, Database* db);

  // Runs one registration or verification. Failures are reported to the
  // client as an ERROR message and returned, not thrown.
  SessionOutcome HandleSession(protocols::Channel& ch, Rng& rng);

  // Accepts connections until stop is set or max_sessions sessions have been
  // handled (0 means no limit). Each connection gets its own thread and an
  // RNG forked from rng.
  void Serve(protocols::TcpListener& listener, Rng& rng, const std::atomic<bool>& stop,
             size_t max_sessions = 0, const std::function<void(const SessionOutcome&)>& on_outcome = {});

  const ServerConfig& config() const { return config_; }
  const ServerKeys& keys() const { return keys_; }

 private:
  void Register(protocols::Channel& ch, Rng& rng, SessionOutcome* out);
  void Verify(protocols::Channel& ch, Rng& rng, SessionOutcome* out);

  ServerConfig config_;
  ServerKeys keys_;
  Database* db_;
  mpz_class shift_;
};

}  // namespace privver::scenarios

#endif  // PRIVVER_SCENARIOS_SERVER_H_
