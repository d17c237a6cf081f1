// Copyright 2026 The lqmeter Authors.
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

#ifndef LQMETER_ERROR_HPP
#define LQMETER_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace lqmeter {

/// Machine-readable category of an Error.
enum class ErrorCode {
  parse_error,
  validation_error,
  empty_tree,
  unknown_language,
  not_a_leaf,
  proficiency_out_of_range,
  taxonomy_mismatch,
  invalid_policy,
  depth_limit,
  invalid_argument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::validation_error: return "validation_error";
    case ErrorCode::empty_tree: return "empty_tree";
    case ErrorCode::unknown_language: return "unknown_language";
    case ErrorCode::not_a_leaf: return "not_a_leaf";
    case ErrorCode::proficiency_out_of_range: return "proficiency_out_of_range";
    case ErrorCode::taxonomy_mismatch: return "taxonomy_mismatch";
    case ErrorCode::invalid_policy: return "invalid_policy";
    case ErrorCode::depth_limit: return "depth_limit";
    case ErrorCode::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

/// The single exception type thrown by the library.
/**
 * `subject` carries the offending identifier (a language name, a policy
 * string) when there is one, so front ends can echo it back.
 */
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string subject = {})
      : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace lqmeter

#endif  // LQMETER_ERROR_HPP
