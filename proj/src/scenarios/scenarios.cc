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

#include "privver/scenarios/scenarios.h"

#include "privver/common/error.h"

namespace privver::scenarios {
namespace {

void CheckScenario(const Server& server, const ClientKeys& keys, ScenarioId expected) {
  if (server.config().scenario != expected || keys.scenario != expected) {
    Fail(ErrorCode::kBadParams, std::string("expected scenario ") + ScenarioName(expected));
  }
}

}  // namespace

RegisterRun RegisterInProcess(Server& server, const ClientKeys& keys, const jointbayes::Vector& x, Rng& client_rng,
                              Rng& server_rng) {
  RegisterRun out;
  protocols::TwoPartyRun run = protocols::RunInProcess(
      [&](protocols::Channel& ch) { out.client = RegisterClient(ch, keys, x, client_rng); },
      [&](protocols::Channel& ch) { out.server = server.HandleSession(ch, server_rng); });
  if (run.alice_error) std::rethrow_exception(run.alice_error);
  run.Rethrow();
  return out;
}

VerifyRun VerifyInProcess(Server& server, const ClientKeys& keys, const IdCard& card, const jointbayes::Vector& y,
                          Rng& client_rng, Rng& server_rng) {
  VerifyRun out;
  protocols::TwoPartyRun run = protocols::RunInProcess(
      [&](protocols::Channel& ch) { out.client = VerifyClient(ch, keys, card, y, client_rng); },
      [&](protocols::Channel& ch) { out.server = server.HandleSession(ch, server_rng); });
  if (run.alice_error) std::rethrow_exception(run.alice_error);
  run.Rethrow();
  return out;
}

#define PRIVVER_SCENARIO_ENTRY(prefix, id)                                                                     \
  RegisterRun prefix##_register(Server& server, const ClientKeys& keys, const jointbayes::Vector& x,          \
                                Rng& client_rng, Rng& server_rng) {                                           \
    CheckScenario(server, keys, id);                                                                           \
    return RegisterInProcess(server, keys, x, client_rng, server_rng);                                         \
  }                                                                                                            \
  VerifyRun prefix##_verify(Server& server, const ClientKeys& keys, const IdCard& card,                       \
                            const jointbayes::Vector& y, Rng& client_rng, Rng& server_rng) {                  \
    CheckScenario(server, keys, id);                                                                           \
    return VerifyInProcess(server, keys, card, y, client_rng, server_rng);                                     \
  }

PRIVVER_SCENARIO_ENTRY(s1, ScenarioId::kS1Plaintext)
PRIVVER_SCENARIO_ENTRY(s2, ScenarioId::kS2Additive)
PRIVVER_SCENARIO_ENTRY(s3, ScenarioId::kS3Leveled)

#undef PRIVVER_SCENARIO_ENTRY

}  // namespace privver::scenarios
