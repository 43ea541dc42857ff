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

#include "privver/common/error.h"

namespace privver {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kBadParams: return "BadParams";
    case ErrorCode::kPlaintextOutOfRange: return "PlaintextOutOfRange";
    case ErrorCode::kKeyMismatch: return "KeyMismatch";
    case ErrorCode::kScaleMismatch: return "ScaleMismatch";
    case ErrorCode::kDepthExceeded: return "DepthExceeded";
    case ErrorCode::kNoiseOverflow: return "NoiseOverflow";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kProtocolAbort: return "ProtocolAbort";
    case ErrorCode::kBitLengthExceeded: return "BitLengthExceeded";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kDbWriteFailure: return "DbWriteFailure";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      message_(message) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace privver
