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

#ifndef LQMETER_POLICY_HPP
#define LQMETER_POLICY_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include <lqmeter/error.hpp>

namespace lqmeter {

/// Maps a layer rank r >= 1 to the Minkowski order used when combining that layer.
/**
 * The built-in kinds all satisfy f(1) = 1 and are non-decreasing, so every
 * aggregation step is a norm of order >= 1. `custom` exists for experiments
 * (including deliberately incoherent policies fed to the axiom checker) and
 * is only as well-behaved as the function it wraps.
 */
class ExponentPolicy {
 public:
  enum class Kind { sqrt_rank, identity_rank, power_rank, custom };

  ExponentPolicy() = default;

  static ExponentPolicy sqrt_rank() { return ExponentPolicy{Kind::sqrt_rank, 0.5}; }
  static ExponentPolicy identity_rank() { return ExponentPolicy{Kind::identity_rank, 1.0}; }

  static ExponentPolicy power_rank(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      std::ostringstream msg;
      msg << "power policy exponent must be positive, got " << a;
      throw Error(ErrorCode::invalid_policy, msg.str());
    }
    return ExponentPolicy{Kind::power_rank, a};
  }

  static ExponentPolicy custom(std::function<double(std::size_t)> f, std::string label = "custom") {
    ExponentPolicy p{Kind::custom, 0.0};
    p.custom_ = std::move(f);
    p.label_ = std::move(label);
    return p;
  }

  /// Parses `sqrt`, `identity` or `pow:<a>` (long forms `sqrt_rank`, `identity_rank`,
  /// `power_rank:<a>` are accepted too).
  static ExponentPolicy parse(std::string_view text) {
    if (text == "sqrt" || text == "sqrt_rank") {
      return sqrt_rank();
    }
    if (text == "identity" || text == "identity_rank") {
      return identity_rank();
    }
    for (std::string_view prefix : {std::string_view{"pow:"}, std::string_view{"power_rank:"}}) {
      if (text.starts_with(prefix)) {
        const auto arg = text.substr(prefix.size());
        double a = 0.0;
        const auto [end, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), a);
        if (ec != std::errc{} || end != arg.data() + arg.size()) {
          throw Error(ErrorCode::invalid_policy, "bad power policy argument '" + std::string(arg) + "'",
                      std::string(text));
        }
        return power_rank(a);
      }
    }
    throw Error(ErrorCode::invalid_policy,
                "unknown exponent policy '" + std::string(text) + "' (expected sqrt, identity or pow:<a>)",
                std::string(text));
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double parameter() const noexcept { return parameter_; }

  [[nodiscard]] double operator()(std::size_t rank) const {
    const auto r = static_cast<double>(rank);
    switch (kind_) {
      case Kind::sqrt_rank: return std::sqrt(r);
      case Kind::identity_rank: return r;
      case Kind::power_rank: return std::pow(r, parameter_);
      case Kind::custom: return custom_(rank);
    }
    return r;
  }

  /// Round-trips through parse() for the built-in kinds.
  [[nodiscard]] std::string name() const {
    switch (kind_) {
      case Kind::sqrt_rank: return "sqrt";
      case Kind::identity_rank: return "identity";
      case Kind::power_rank: {
        std::ostringstream out;
        out << "pow:" << parameter_;
        return out.str();
      }
      case Kind::custom: return label_;
    }
    return label_;
  }

  /// Throws unless f(1) = 1 and f is finite and non-decreasing on 1..max_rank.
  void validate(std::size_t max_rank) const {
    const double f1 = (*this)(1);
    if (!(std::abs(f1 - 1.0) <= 1e-12)) {
      std::ostringstream msg;
      msg << "exponent policy '" << name() << "' must satisfy f(1) = 1, got " << f1;
      throw Error(ErrorCode::invalid_policy, msg.str(), name());
    }
    double previous = f1;
    for (std::size_t r = 2; r <= max_rank; ++r) {
      const double fr = (*this)(r);
      if (!std::isfinite(fr) || fr < previous) {
        std::ostringstream msg;
        msg << "exponent policy '" << name() << "' must be non-decreasing; f(" << r << ") = " << fr
            << " < f(" << r - 1 << ") = " << previous;
        throw Error(ErrorCode::invalid_policy, msg.str(), name());
      }
      previous = fr;
    }
  }

 private:
  ExponentPolicy(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  Kind kind_{Kind::sqrt_rank};
  double parameter_{0.5};
  std::function<double(std::size_t)> custom_;
  std::string label_{"custom"};
};

}  // namespace lqmeter

#endif  // LQMETER_POLICY_HPP
