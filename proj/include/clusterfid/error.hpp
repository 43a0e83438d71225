// Copyright 2026 The clusterfid Authors
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

namespace clusterfid {

enum class ErrorKind {
  invalid_size,
  invalid_label,
  invalid_probability,
  wrong_kind,
  too_large,
  incomplete_data,
  parse,
  internal,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_size: return "invalid-size";
    case ErrorKind::invalid_label: return "invalid-label";
    case ErrorKind::invalid_probability: return "invalid-probability";
    case ErrorKind::wrong_kind: return "wrong-kind";
    case ErrorKind::too_large: return "too-large";
    case ErrorKind::incomplete_data: return "incomplete-data";
    case ErrorKind::parse: return "parse";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit code) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace clusterfid
