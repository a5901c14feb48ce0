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

#include <string>

#include "json.hpp"

namespace pickcell {

using Json = nlohmann::json;

// Compact JSON with sorted keys and no whitespace. Floating point values are
// written with at most `float_digits` significant digits ("%.{n}g"); the bus
// uses 9, golden scene files use fixed 6-decimal formatting instead.
std::string canonical_dump(const Json& value, int float_digits = 9);

// Sorted keys, no whitespace, every float printed with exactly six decimals.
std::string fixed6_dump(const Json& value);

// Round a double to the value the canonical bus encoding would carry.
double canonical_float(double v, int float_digits = 9);

}  // namespace pickcell
