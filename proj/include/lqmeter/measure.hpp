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

#ifndef LQMETER_MEASURE_HPP
#define LQMETER_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <lqmeter/error.hpp>
#include <lqmeter/policy.hpp>
#include <lqmeter/taxonomy.hpp>

/**
 * \file
 * \brief Bottom-up p-norm aggregation of a portfolio over its induced subtree.
 *
 * Leaves start at their proficiency. An internal node v whose children sit at
 * depth r = depth(v) + 1 takes the Minkowski norm of order f(r) of its
 * included children's values:
 *
 *   lambda_v = (sum_c lambda_c^f(r))^(1/f(r))
 *
 * The root combines the families at depth 1 with f(1) = 1, i.e. it sums them.
 * The score of the portfolio is the value at the root.
 */

namespace lqmeter {

/// Largest subtree depth accepted by lq_recursive().
inline constexpr std::size_t kMaxRecursionDepth = 10'000;

struct LqBreakdown {
  std::map<NodeId, double> node_values;
  double score{0.0};
  ExponentPolicy policy;
};

struct BreakdownRow {
  std::string node;
  std::size_t depth{0};
  double lambda{0.0};
};

struct WhatIf {
  double base{0.0};
  double updated{0.0};
  double gain{0.0};
};

struct Suggestion {
  std::string language;
  double gain{0.0};
};

namespace detail {

/// Norm of order `order` of non-negative `values`; a single value passes through unchanged.
inline double minkowski(std::span<const double> values, double order) {
  if (values.empty()) {
    return 0.0;
  }
  if (values.size() == 1) {
    return values.front();
  }
  const double largest = *std::max_element(values.begin(), values.end());
  if (largest == 0.0) {
    return 0.0;
  }
  // Scaled by the largest term so high orders cannot overflow.
  double sum = 0.0;
  for (double v : values) {
    if (v > 0.0) {
      sum += std::pow(v / largest, order);
    }
  }
  return largest * std::pow(sum, 1.0 / order);
}

inline double node_value(const TaxonomyTree& tree, const PortfolioSubtree& sub, const LqBreakdown& partial,
                         NodeId id, const ExponentPolicy& policy) {
  if (auto w = sub.leaf_weights.find(id); w != sub.leaf_weights.end()) {
    return w->second;
  }
  const auto& n = tree.node(id);
  std::vector<double> child_values;
  child_values.reserve(n.children.size());
  for (auto c : n.children) {
    if (sub.contains(c)) {
      child_values.push_back(partial.node_values.at(c));
    }
  }
  return minkowski(child_values, policy(n.depth + 1));
}

/// Layer-by-layer evaluation, deepest layer first. Does not validate the policy.
inline LqBreakdown evaluate_iterative(const TaxonomyTree& tree, const PortfolioSubtree& sub,
                                      const ExponentPolicy& policy) {
  std::size_t deepest = 0;
  for (auto id : sub.included_nodes) {
    deepest = std::max(deepest, tree.node(id).depth);
  }
  std::vector<std::vector<NodeId>> layers(deepest + 1);
  for (auto id : sub.included_nodes) {
    layers[tree.node(id).depth].push_back(id);
  }

  LqBreakdown out;
  out.policy = policy;
  for (auto layer = layers.rbegin(); layer != layers.rend(); ++layer) {
    for (auto id : *layer) {
      out.node_values[id] = node_value(tree, sub, out, id, policy);
    }
  }
  out.score = out.node_values.at(tree.root());
  return out;
}

/// Depth-first evaluation from the root. Does not validate the policy.
inline LqBreakdown evaluate_recursive(const TaxonomyTree& tree, const PortfolioSubtree& sub,
                                      const ExponentPolicy& policy) {
  for (auto id : sub.included_nodes) {
    if (tree.node(id).depth > kMaxRecursionDepth) {
      throw Error(ErrorCode::depth_limit, "portfolio subtree deeper than " +
                                              std::to_string(kMaxRecursionDepth) +
                                              " levels; use the iterative evaluator");
    }
  }

  LqBreakdown out;
  out.policy = policy;
  std::function<double(NodeId)> visit = [&](NodeId id) -> double {
    if (auto w = sub.leaf_weights.find(id); w != sub.leaf_weights.end()) {
      return out.node_values[id] = w->second;
    }
    const auto& n = tree.node(id);
    std::vector<double> child_values;
    for (auto c : n.children) {
      if (sub.contains(c)) {
        child_values.push_back(visit(c));
      }
    }
    return out.node_values[id] = minkowski(child_values, policy(n.depth + 1));
  };
  out.score = visit(tree.root());
  return out;
}

inline void validate_policy(const TaxonomyTree& tree, const ExponentPolicy& policy) {
  policy.validate(std::max<std::size_t>(tree.max_depth(), 1));
}

}  // namespace detail

/// Scores `portfolio` on `tree` by iterating layers bottom-up.
inline LqBreakdown lq(const TaxonomyTree& tree, const Portfolio& portfolio,
                      const ExponentPolicy& policy = ExponentPolicy::sqrt_rank()) {
  detail::validate_policy(tree, policy);
  return detail::evaluate_iterative(tree, induce_subtree(tree, portfolio), policy);
}

/// Same contract as lq(), computed by depth-first recursion.
inline LqBreakdown lq_recursive(const TaxonomyTree& tree, const Portfolio& portfolio,
                                const ExponentPolicy& policy = ExponentPolicy::sqrt_rank()) {
  detail::validate_policy(tree, policy);
  return detail::evaluate_recursive(tree, induce_subtree(tree, portfolio), policy);
}

/// Score before and after adding `language` at `proficiency` (union with the max rule).
inline WhatIf what_if(const TaxonomyTree& tree, const Portfolio& portfolio, std::string_view language,
                      double proficiency, const ExponentPolicy& policy = ExponentPolicy::sqrt_rank()) {
  Portfolio addition;
  addition.entries.emplace(std::string(language), proficiency);
  addition = bind(tree, std::move(addition));

  WhatIf out;
  out.base = lq(tree, portfolio, policy).score;
  out.updated = lq(tree, portfolio_union(portfolio, addition), policy).score;
  out.gain = out.updated - out.base;
  return out;
}

/// LQ increase from adding `language` at `proficiency`. In [0, 1] for fluent additions.
inline double marginal_gain(const TaxonomyTree& tree, const Portfolio& portfolio, std::string_view language,
                            double proficiency,
                            const ExponentPolicy& policy = ExponentPolicy::sqrt_rank()) {
  return what_if(tree, portfolio, language, proficiency, policy).gain;
}

/// Fluent additions ranked by gain (descending, ties by name); at most `top_k` of them.
inline std::vector<Suggestion> suggest_next(const TaxonomyTree& tree, const Portfolio& portfolio,
                                            std::size_t top_k,
                                            const ExponentPolicy& policy = ExponentPolicy::sqrt_rank()) {
  if (top_k == 0) {
    throw Error(ErrorCode::invalid_argument, "top_k must be at least 1");
  }
  detail::validate_policy(tree, policy);
  const auto bound = bind(tree, portfolio);
  const double base = lq(tree, bound, policy).score;

  std::vector<Suggestion> ranked;
  for (auto id : tree.leaves()) {
    const auto& name = tree.node(id).name;
    if (bound.proficiency(name) > 0.0) {
      continue;
    }
    auto extended = bound;
    extended.entries[name] = 1.0;
    ranked.push_back({name, lq(tree, extended, policy).score - base});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Suggestion& a, const Suggestion& b) {
    return a.gain != b.gain ? a.gain > b.gain : a.language < b.language;
  });
  if (ranked.size() > top_k) {
    ranked.resize(top_k);
  }
  return ranked;
}

/// Included nodes in pre-order, siblings sorted by name.
inline std::vector<BreakdownRow> breakdown_rows(const TaxonomyTree& tree, const LqBreakdown& breakdown) {
  std::vector<BreakdownRow> rows;
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    const auto& n = tree.node(id);
    rows.push_back({n.name, n.depth, breakdown.node_values.at(id)});

    std::vector<NodeId> kids;
    for (auto c : n.children) {
      if (breakdown.node_values.contains(c)) {
        kids.push_back(c);
      }
    }
    std::sort(kids.begin(), kids.end(),
              [&](NodeId a, NodeId b) { return tree.node(a).name > tree.node(b).name; });
    stack.insert(stack.end(), kids.begin(), kids.end());
  }
  return rows;
}

}  // namespace lqmeter

#endif  // LQMETER_MEASURE_HPP
