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

#ifndef LQMETER_MATRIX_HPP
#define LQMETER_MATRIX_HPP

#include <cmath>
#include <sstream>

#include <lqmeter/error.hpp>

namespace lqmeter {

/// Correlation between two languages (1 minus their distance) and the family exponent.
struct PairCorrelation {
  double rho{0.0};
  double exponent_r{1.0};
};

/// Two-language correlation-matrix measure 2 - rho^r, in [1, 2].
inline double matrix_lq(const PairCorrelation& corr) {
  if (!(corr.rho >= 0.0 && corr.rho <= 1.0)) {
    std::ostringstream msg;
    msg << "rho must lie in [0, 1], got " << corr.rho;
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
  if (!(corr.exponent_r > 0.0) || !std::isfinite(corr.exponent_r)) {
    std::ostringstream msg;
    msg << "r must be positive, got " << corr.exponent_r;
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
  return 2.0 - std::pow(corr.rho, corr.exponent_r);
}

}  // namespace lqmeter

#endif  // LQMETER_MATRIX_HPP
