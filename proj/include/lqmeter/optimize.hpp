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

#ifndef LQMETER_OPTIMIZE_HPP
#define LQMETER_OPTIMIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <lqmeter/error.hpp>
#include <lqmeter/measure.hpp>
#include <lqmeter/policy.hpp>
#include <lqmeter/taxonomy.hpp>

/**
 * \file
 * \brief Working-language bundle selection for a population of portfolios.
 *
 * A bundle B of k candidate languages is scored per member. Under the
 * default `marginal` objective a member's cost is the effort of acquiring
 * the bundle, lq(P u B@1) - lq(P); under `aggregate` it is the resulting
 * lq(P u B@1) itself. The total is the sum over members.
 */

namespace lqmeter {

/// Largest number of k-subsets searched exhaustively.
inline constexpr std::size_t kExhaustiveLimit = 100'000;

enum class BundleObjective { marginal, aggregate };
enum class SearchMethod { exhaustive, greedy };

inline std::string_view to_string(BundleObjective o) noexcept {
  return o == BundleObjective::marginal ? "marginal" : "aggregate";
}

inline std::string_view to_string(SearchMethod m) noexcept {
  return m == SearchMethod::exhaustive ? "exhaustive" : "greedy";
}

struct BundleProblem {
  std::vector<Portfolio> population;
  std::set<std::string> candidates;
  std::size_t bundle_size{1};
  ExponentPolicy policy;
  BundleObjective objective{BundleObjective::marginal};
};

struct BundleSolution {
  std::vector<std::string> bundle;
  double total_cost{0.0};
  std::vector<double> per_member_cost;
  SearchMethod method{SearchMethod::exhaustive};
};

/// Number of k-subsets of n items, saturating at `cap + 1`.
inline std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
  k = std::min(k, n - k);
  long double acc = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) {
    acc = acc * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (acc > static_cast<long double>(cap)) {
      return cap + 1;
    }
  }
  return static_cast<std::size_t>(std::llround(acc));
}

/// Per-member costs of `bundle`. The problem is assumed validated.
inline std::vector<double> bundle_costs(const TaxonomyTree& tree, const BundleProblem& problem,
                                        const std::vector<std::string>& bundle) {
  Portfolio addition;
  for (const auto& language : bundle) {
    addition.entries[language] = 1.0;
  }
  std::vector<double> costs;
  costs.reserve(problem.population.size());
  for (const auto& member : problem.population) {
    const double after = lq(tree, portfolio_union(member, addition), problem.policy).score;
    costs.push_back(problem.objective == BundleObjective::marginal
                        ? after - lq(tree, member, problem.policy).score
                        : after);
  }
  return costs;
}

namespace detail {

inline void validate_problem(const TaxonomyTree& tree, const BundleProblem& problem) {
  if (problem.population.empty()) {
    throw Error(ErrorCode::invalid_argument, "population is empty");
  }
  if (problem.bundle_size == 0) {
    throw Error(ErrorCode::invalid_argument, "bundle size k must be at least 1");
  }
  if (problem.bundle_size > problem.candidates.size()) {
    throw Error(ErrorCode::invalid_argument, "bundle size k = " + std::to_string(problem.bundle_size) +
                                                 " exceeds the " + std::to_string(problem.candidates.size()) +
                                                 " candidates");
  }
  validate_policy(tree, problem.policy);
  for (const auto& member : problem.population) {
    (void)bind(tree, member);
  }
  Portfolio all;
  for (const auto& c : problem.candidates) {
    all.entries[c] = 1.0;
  }
  (void)bind(tree, all);
}

inline bool strictly_better(double cost, double best) {
  if (std::isinf(best)) {
    return !std::isinf(cost);
  }
  return cost < best - 1e-12 * std::max(1.0, std::abs(best));
}

inline double total(const std::vector<double>& costs) { return std::accumulate(costs.begin(), costs.end(), 0.0); }

}  // namespace detail

/// Minimizes total cost over all k-subsets of the candidates; ties go to the
/// lexicographically smallest bundle.
inline BundleSolution optimize_exhaustive(const TaxonomyTree& tree, const BundleProblem& problem) {
  detail::validate_problem(tree, problem);
  const std::vector<std::string> pool(problem.candidates.begin(), problem.candidates.end());
  const auto n = pool.size();
  const auto k = problem.bundle_size;

  // Combinations are visited in lexicographic order of index vectors, which
  // matches lexicographic order of the (sorted) names.
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);

  BundleSolution best;
  best.total_cost = std::numeric_limits<double>::infinity();
  best.method = SearchMethod::exhaustive;
  while (true) {
    std::vector<std::string> bundle;
    for (auto i : idx) {
      bundle.push_back(pool[i]);
    }
    auto costs = bundle_costs(tree, problem, bundle);
    const double cost = detail::total(costs);
    if (detail::strictly_better(cost, best.total_cost)) {
      best.bundle = std::move(bundle);
      best.per_member_cost = std::move(costs);
      best.total_cost = cost;
    }

    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) {
      --pos;
    }
    if (pos == 0) {
      break;
    }
    ++idx[pos - 1];
    for (auto j = pos; j < k; ++j) {
      idx[j] = idx[j - 1] + 1;
    }
  }
  return best;
}

/// Forward selection: adds one candidate at a time, each step taking the
/// cheapest extension (ties by name).
inline BundleSolution optimize_greedy(const TaxonomyTree& tree, const BundleProblem& problem) {
  detail::validate_problem(tree, problem);
  std::vector<std::string> chosen;
  std::set<std::string> remaining = problem.candidates;

  BundleSolution out;
  out.method = SearchMethod::greedy;
  while (chosen.size() < problem.bundle_size) {
    std::string pick;
    std::vector<double> pick_costs;
    double pick_total = std::numeric_limits<double>::infinity();
    for (const auto& c : remaining) {
      auto trial = chosen;
      trial.push_back(c);
      auto costs = bundle_costs(tree, problem, trial);
      const double cost = detail::total(costs);
      if (detail::strictly_better(cost, pick_total)) {
        pick = c;
        pick_total = cost;
        pick_costs = std::move(costs);
      }
    }
    chosen.push_back(pick);
    remaining.erase(pick);
    out.total_cost = pick_total;
    out.per_member_cost = std::move(pick_costs);
  }
  std::sort(chosen.begin(), chosen.end());
  out.bundle = std::move(chosen);
  return out;
}

/// Exhaustive when C(|candidates|, k) <= kExhaustiveLimit, greedy otherwise.
inline BundleSolution optimize_bundle(const TaxonomyTree& tree, const BundleProblem& problem) {
  detail::validate_problem(tree, problem);
  if (binomial_capped(problem.candidates.size(), problem.bundle_size, kExhaustiveLimit) <= kExhaustiveLimit) {
    return optimize_exhaustive(tree, problem);
  }
  return optimize_greedy(tree, problem);
}

}  // namespace lqmeter

#endif  // LQMETER_OPTIMIZE_HPP
