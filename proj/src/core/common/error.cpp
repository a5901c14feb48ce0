// Copyright 2026 The pickcell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "common/error.hpp"

namespace pickcell {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PlacementFailure: return "PlacementFailure";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::BadRoi: return "BadRoi";
    case ErrorCode::BadBox: return "BadBox";
    case ErrorCode::AllHoles: return "AllHoles";
    case ErrorCode::NoFeasibleGrasp: return "NoFeasibleGrasp";
    case ErrorCode::BadDepth: return "BadDepth";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::FrameError: return "FrameError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::MalformedLog: return "MalformedLog";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace pickcell
