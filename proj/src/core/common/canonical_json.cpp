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

#include "common/canonical_json.hpp"

#include <cmath>
#include <cstdio>

#include "common/error.hpp"

namespace pickcell {
namespace {

std::string format_float(double v, int digits) {
  if (!std::isfinite(v)) fail(ErrorCode::SchemaViolation, "non-finite number");
  if (v == 0.0) return "0";  // folds -0.0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string format_fixed6(double v) {
  if (!std::isfinite(v)) fail(ErrorCode::SchemaViolation, "non-finite number");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

template <typename FloatFmt>
void write(const Json& j, std::string& out, const FloatFmt& fmt) {
  switch (j.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      // nlohmann::json stores objects in a std::map, so iteration is sorted.
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(it.key()).dump(-1, ' ', false, Json::error_handler_t::strict);
        out.push_back(':');
        write(it.value(), out, fmt);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& e : j) {
        if (!first) out.push_back(',');
        first = false;
        write(e, out, fmt);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float:
      out += fmt(j.get<double>());
      break;
    case Json::value_t::discarded:
      fail(ErrorCode::SchemaViolation, "discarded json value");
    default:
      out += j.dump(-1, ' ', false, Json::error_handler_t::strict);
      break;
  }
}

}  // namespace

std::string canonical_dump(const Json& value, int float_digits) {
  std::string out;
  try {
    write(value, out, [float_digits](double v) { return format_float(v, float_digits); });
  } catch (const Json::exception& e) {
    fail(ErrorCode::SchemaViolation, e.what());
  }
  return out;
}

std::string fixed6_dump(const Json& value) {
  std::string out;
  try {
    write(value, out, format_fixed6);
  } catch (const Json::exception& e) {
    fail(ErrorCode::SchemaViolation, e.what());
  }
  return out;
}

double canonical_float(double v, int float_digits) {
  return std::stod(format_float(v, float_digits));
}

}  // namespace pickcell
