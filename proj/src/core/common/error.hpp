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

#pragma once

#include <stdexcept>
#include <string>

namespace pickcell {

enum class ErrorCode {
  InvalidArgument,
  PlacementFailure,
  OutOfBounds,
  BadRoi,
  BadBox,
  AllHoles,
  NoFeasibleGrasp,
  BadDepth,
  SchemaViolation,
  FrameError,
  ParseError,
  UnknownKey,
  ValidationError,
  MalformedLog,
  IoError,
  Internal,
};

const char* to_string(ErrorCode code);

// Every failure raised by the core carries a code so the C boundary can map it
// to a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace pickcell
