// Copyright 2026 The MoVAE Authors. All Rights Reserved.
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
#include <string_view>

namespace movae {

/// Coarse error families. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
  argument,
  dimension,
  numerical,
  domain,
  format,
  consistency,
  io,
  state,
  config,
};

inline std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::argument: return "argument";
    case ErrorCategory::dimension: return "dimension";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::format: return "format";
    case ErrorCategory::consistency: return "consistency";
    case ErrorCategory::io: return "io";
    case ErrorCategory::state: return "state";
    case ErrorCategory::config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(std::string(category_name(category)) + " error: " + what),
        category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define MOVAE_DEFINE_ERROR(Name, cat)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorCategory::cat, what) {} \
  };

MOVAE_DEFINE_ERROR(ArgumentError, argument)
MOVAE_DEFINE_ERROR(DimensionError, dimension)
MOVAE_DEFINE_ERROR(NumericalError, numerical)
MOVAE_DEFINE_ERROR(DomainError, domain)
MOVAE_DEFINE_ERROR(FormatError, format)
MOVAE_DEFINE_ERROR(ConsistencyError, consistency)
MOVAE_DEFINE_ERROR(IoError, io)
MOVAE_DEFINE_ERROR(StateError, state)
MOVAE_DEFINE_ERROR(ConfigError, config)

#undef MOVAE_DEFINE_ERROR

}  // namespace movae
