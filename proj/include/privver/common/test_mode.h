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

#ifndef PRIVVER_COMMON_TEST_MODE_H_
#define PRIVVER_COMMON_TEST_MODE_H_

namespace privver {

// True when PRIVVER_TEST_MODE=1 is set in the environment, or when forced by
// SetTestModeForTesting. Enables seeded RNGs and test-only decryption hooks.
bool TestModeEnabled();

void SetTestModeForTesting(bool enabled);

}  // namespace privver

#endif  // PRIVVER_COMMON_TEST_MODE_H_
