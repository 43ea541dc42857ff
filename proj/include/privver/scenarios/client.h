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

#ifndef PRIVVER_SCENARIOS_CLIENT_H_
#define PRIVVER_SCENARIOS_CLIENT_H_

#include "privver/common/rng.h"
#include "privver/jointbayes/jointbayes.h"
#include "privver/protocols/channel.h"
#include "privver/scenarios/keys.h"
#include "privver/scenarios/types.h"

namespace privver::scenarios {

struct RegistrationResult {
  IdCard card;
  protocols::SessionTranscript transcript;
  PartyStats stats;
};

// Client role. The scenario comes from keys.scenario and must match the
// server's. Features must lie in [-kInputRange, kInputRange].
RegistrationResult RegisterClient(protocols::Channel& ch, const ClientKeys& keys, const jointbayes::Vector& x,
                                  Rng& rng);
AccessDecision VerifyClient(protocols::Channel& ch, const ClientKeys& keys, const IdCard& card,
                            const jointbayes::Vector& y, Rng& rng);

}  // namespace privver::scenarios

#endif  // PRIVVER_SCENARIOS_CLIENT_H_
