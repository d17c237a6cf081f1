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

#ifndef LQMETER_LQMETER_HPP
#define LQMETER_LQMETER_HPP

#include <lqmeter/axioms.hpp>
#include <lqmeter/error.hpp>
#include <lqmeter/formats.hpp>
#include <lqmeter/matrix.hpp>
#include <lqmeter/measure.hpp>
#include <lqmeter/optimize.hpp>
#include <lqmeter/policy.hpp>
#include <lqmeter/taxonomy.hpp>

#endif  // LQMETER_LQMETER_HPP
