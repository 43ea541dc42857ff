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

#ifndef PRIVVER_PROTOCOLS_BRIDGE_H_
#define PRIVVER_PROTOCOLS_BRIDGE_H_

#include "privver/common/rng.h"
#include "privver/he/he.h"
#include "privver/protocols/channel.h"
#include "privver/protocols/compare.h"

namespace privver::protocols {

// Moves a LEVELED ciphertext held by Bob to Alice's additive key. Bob blinds
// with r uniform mod t; Alice decrypts w and re-encrypts it; the wrap bit
// [w < r] comes from dgk_compare so Bob can undo the modular reduction.
// Requires |m| < t/2 for the LEVELED plaintext m.
void leveled_to_additive_alice(Channel& ch, const he::KeyPair& leveled, const AliceKeys& keys, Rng& rng);
he::Ciphertext leveled_to_additive_bob(Channel& ch, const he::PublicKey& leveled,
                                       const AlicePublicKeys& keys, const he::Ciphertext& ct, Rng& rng);

}  // namespace privver::protocols

#endif  // PRIVVER_PROTOCOLS_BRIDGE_H_
