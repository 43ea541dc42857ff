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

#ifndef PRIVVER_COMMON_ERROR_H_
#define PRIVVER_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace privver {

enum class ErrorCode {
  kSingularMatrix,
  kEmptyInput,
  kNotConverged,
  kDimensionMismatch,
  kDegenerateLabels,
  kBadParams,
  kPlaintextOutOfRange,
  kKeyMismatch,
  kScaleMismatch,
  kDepthExceeded,
  kNoiseOverflow,
  kOverflow,
  kProtocolAbort,
  kBitLengthExceeded,
  kUnknownId,
  kDbWriteFailure,
  kIoFailure,
  kParseError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type; callers
// that need to branch on the failure kind inspect code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  // The message without the code prefix that what() carries.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace privver

#endif  // PRIVVER_COMMON_ERROR_H_
