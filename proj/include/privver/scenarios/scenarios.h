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

#ifndef PRIVVER_SCENARIOS_SCENARIOS_H_
#define PRIVVER_SCENARIOS_SCENARIOS_H_

#include "privver/common/rng.h"
#include "privver/jointbayes/jointbayes.h"
#include "privver/scenarios/client.h"
#include "privver/scenarios/server.h"

namespace privver::scenarios {

struct RegisterRun {
  RegistrationResult client;
  SessionOutcome server;
};

struct VerifyRun {
  AccessDecision client;
  SessionOutcome server;
};

// Both roles over an in-process channel. Client-side failures are rethrown;
// a server-side failure surfaces as the client's ProtocolAbort.
RegisterRun RegisterInProcess(Server& server, const ClientKeys& keys, const jointbayes::Vector& x, Rng& client_rng,
                              Rng& server_rng);
VerifyRun VerifyInProcess(Server& server, const ClientKeys& keys, const IdCard& card, const jointbayes::Vector& y,
                          Rng& client_rng, Rng& server_rng);

// Scenario-checked entry points.
RegisterRun s1_register(Server& server, const ClientKeys& keys, const jointbayes::Vector& x, Rng& client_rng,
                        Rng& server_rng);
VerifyRun s1_verify(Server& server, const ClientKeys& keys, const IdCard& card, const jointbayes::Vector& y,
                    Rng& client_rng, Rng& server_rng);
RegisterRun s2_register(Server& server, const ClientKeys& keys, const jointbayes::Vector& x, Rng& client_rng,
                        Rng& server_rng);
VerifyRun s2_verify(Server& server, const ClientKeys& keys, const IdCard& card, const jointbayes::Vector& y,
                    Rng& client_rng, Rng& server_rng);
RegisterRun s3_register(Server& server, const ClientKeys& keys, const jointbayes::Vector& x, Rng& client_rng,
                        Rng& server_rng);
VerifyRun s3_verify(Server& server, const ClientKeys& keys, const IdCard& card, const jointbayes::Vector& y,
                    Rng& client_rng, Rng& server_rng);

}  // namespace privver::scenarios

#endif  // PRIVVER_SCENARIOS_SCENARIOS_H_
