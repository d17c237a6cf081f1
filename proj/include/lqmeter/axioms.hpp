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

#ifndef LQMETER_AXIOMS_HPP
#define LQMETER_AXIOMS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <lqmeter/error.hpp>
#include <lqmeter/measure.hpp>
#include <lqmeter/policy.hpp>
#include <lqmeter/taxonomy.hpp>

/**
 * \file
 * \brief Randomized verification of the coherence axioms of a measure.
 *
 * The checker accepts any ExponentPolicy, including ones that violate the
 * f(1) = 1 / non-decreasing contract, and reports violations as data.
 */

namespace lqmeter {

inline constexpr double kAxiomTolerance = 1e-9;

struct AxiomResult {
  std::string axiom;
  std::string statement;
  bool passed{true};
  std::size_t checks{0};
  std::optional<std::string> counterexample;
};

struct AxiomReport {
  std::vector<AxiomResult> results;
  std::size_t trials{0};
  std::uint64_t seed{0};

  [[nodiscard]] bool all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const AxiomResult& r) { return r.passed; });
  }

  [[nodiscard]] const AxiomResult& at(std::string_view axiom) const {
    for (const auto& r : results) {
      if (r.axiom == axiom) {
        return r;
      }
    }
    throw Error(ErrorCode::invalid_argument, "no axiom named '" + std::string(axiom) + "'");
  }
};

namespace detail {

inline bool within(double a, double b, double tol = kAxiomTolerance) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool at_most(double a, double b, double tol = kAxiomTolerance) {
  return a <= b + tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline std::string describe(const Portfolio& p) {
  std::ostringstream out;
  out.precision(6);
  out << '{';
  bool first = true;
  for (const auto& [language, weight] : p.entries) {
    out << (first ? "" : ", ") << language << ':' << weight;
    first = false;
  }
  out << '}';
  return out.str();
}

inline AxiomResult make_result(std::string axiom, std::string statement) {
  AxiomResult r;
  r.axiom = std::move(axiom);
  r.statement = std::move(statement);
  return r;
}

class AxiomSampler {
 public:
  AxiomSampler(const TaxonomyTree& tree, std::uint64_t seed) : tree_(tree), leaves_(tree.leaves()), rng_(seed) {}

  NodeId leaf() { return leaves_[std::uniform_int_distribution<std::size_t>(0, leaves_.size() - 1)(rng_)]; }

  double weight() {
    if (coin()) {
      return 1.0;
    }
    const double w = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    return w == 0.0 ? 1.0 : w;
  }

  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }

  Portfolio portfolio(bool fluent, std::size_t min_size = 0) {
    const auto cap = std::min<std::size_t>(leaves_.size(), 10);
    const auto size = std::uniform_int_distribution<std::size_t>(std::min(min_size, cap), cap)(rng_);
    auto pool = leaves_;
    Portfolio p;
    for (std::size_t i = 0; i < size; ++i) {
      const auto j = std::uniform_int_distribution<std::size_t>(i, pool.size() - 1)(rng_);
      std::swap(pool[i], pool[j]);
      p.entries[tree_.node(pool[i]).name] = fluent ? 1.0 : weight();
    }
    return p;
  }

  template <class Range>
  std::optional<NodeId> pick(const Range& candidates) {
    if (candidates.empty()) {
      return std::nullopt;
    }
    return candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
  }

 private:
  const TaxonomyTree& tree_;
  std::vector<NodeId> leaves_;
  std::mt19937_64 rng_;
};

}  // namespace detail

/// Samples `trials` random instances per axiom (deterministic in `seed`) and checks
/// Equivalence, Subadditivity, No double-counting, Independence, Positive homogeneity,
/// the sandwich bound lq(P) <= lq(P + l) <= lq(P) + 1, monotonicity and the score range.
inline AxiomReport check_axioms(const TaxonomyTree& tree, const ExponentPolicy& policy, std::size_t trials,
                                std::uint64_t seed) {
  if (trials == 0) {
    throw Error(ErrorCode::invalid_argument, "trials must be at least 1");
  }

  const auto score = [&](const Portfolio& p) {
    return detail::evaluate_iterative(tree, induce_subtree(tree, p), policy).score;
  };
  const auto single = [&](NodeId leaf, double w) {
    Portfolio p;
    p.entries[tree.node(leaf).name] = w;
    return p;
  };

  auto eq = detail::make_result("E", "lq({l@1}) = 1");
  auto sub = detail::make_result("S", "lq(P u Q) <= lq(P) + lq(Q)");
  auto nd = detail::make_result("ND", "l in P => lq(P u l) = lq(P)");
  auto ind = detail::make_result("I", "l independent of P => lq(P u l) = lq(P) + lq(l)");
  auto ph = detail::make_result("PH", "lq({l@c}) = c * lq({l@1})");
  auto sandwich = detail::make_result("sandwich", "lq(P) <= lq(P u l@1) <= lq(P) + 1");
  auto mono = detail::make_result("monotonicity", "raising one proficiency never lowers lq");
  auto range = detail::make_result("range", "fluent: 1 <= lq <= N; weighted: 0 <= lq <= N");

  const auto fail = [](AxiomResult& r, const std::string& what) {
    if (r.passed) {
      r.passed = false;
      r.counterexample = what;
    }
  };

  detail::AxiomSampler rng(tree, seed);
  std::ostringstream msg;
  msg.precision(12);
  const auto text = [&msg]() {
    auto s = msg.str();
    msg.str({});
    return s;
  };

  for (std::size_t t = 0; t < trials; ++t) {
    {
      const auto l = rng.leaf();
      const double v = score(single(l, 1.0));
      ++eq.checks;
      if (!detail::within(v, 1.0)) {
        msg << "lq({" << tree.node(l).name << "@1}) = " << v;
        fail(eq, text());
      }
    }
    {
      const auto p = rng.portfolio(false);
      const auto q = rng.portfolio(false);
      const double lhs = score(portfolio_union(p, q));
      const double a = score(p);
      const double b = score(q);
      ++sub.checks;
      if (!detail::at_most(lhs, a + b)) {
        msg << "lq(P u Q) = " << lhs << " > " << a << " + " << b << " with P = " << detail::describe(p)
            << ", Q = " << detail::describe(q);
        fail(sub, text());
      }
    }
    {
      const auto p = rng.portfolio(false, 1);
      if (!p.empty()) {
        auto it = p.entries.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(rng.unit() * static_cast<double>(p.size() - 1) + 0.5));
        Portfolio again;
        again.entries[it->first] = it->second;
        const double before = score(p);
        const double after = score(portfolio_union(p, again));
        ++nd.checks;
        if (!detail::within(before, after)) {
          msg << "adding " << it->first << '@' << it->second << " to " << detail::describe(p) << " moved lq from "
              << before << " to " << after;
          fail(nd, text());
        }
      }
    }
    {
      const auto p = rng.portfolio(false);
      std::set<NodeId> families;
      for (const auto& [language, weight] : p.entries) {
        if (weight > 0.0) {
          families.insert(tree.family_of(*tree.find(language)));
        }
      }
      std::vector<NodeId> independent;
      for (auto l : tree.leaves()) {
        if (tree.node(l).depth >= 1 && !families.contains(tree.family_of(l))) {
          independent.push_back(l);
        }
      }
      if (const auto l = rng.pick(independent)) {
        const double w = rng.weight();
        const auto extra = single(*l, w);
        const double joint = score(portfolio_union(p, extra));
        const double parts = score(p) + score(extra);
        ++ind.checks;
        if (!detail::within(joint, parts)) {
          msg << "lq(P u " << tree.node(*l).name << '@' << w << ") = " << joint << " != " << parts
              << " with P = " << detail::describe(p);
          fail(ind, text());
        }
      }
    }
    {
      const auto l = rng.leaf();
      const double c = rng.unit();
      const double scaled = score(single(l, c));
      const double full = score(single(l, 1.0));
      ++ph.checks;
      if (!detail::within(scaled, c * full)) {
        msg << "lq({" << tree.node(l).name << '@' << c << "}) = " << scaled << " != " << c << " * " << full;
        fail(ph, text());
      }
    }
    {
      const auto p = rng.portfolio(false);
      const auto l = rng.leaf();
      const double before = score(p);
      const double after = score(portfolio_union(p, single(l, 1.0)));
      ++sandwich.checks;
      if (!(detail::at_most(before, after) && detail::at_most(after, before + 1.0))) {
        msg << "adding " << tree.node(l).name << "@1 to " << detail::describe(p) << " moved lq from " << before
            << " to " << after;
        fail(sandwich, text());
      }
    }
    {
      const auto p = rng.portfolio(false, 1);
      if (!p.empty()) {
        auto raised = p;
        auto it = raised.entries.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(rng.unit() * static_cast<double>(p.size() - 1) + 0.5));
        it->second += rng.unit() * (1.0 - it->second);
        const double before = score(p);
        const double after = score(raised);
        ++mono.checks;
        if (!detail::at_most(before, after)) {
          msg << "raising " << it->first << " in " << detail::describe(p) << " lowered lq from " << before << " to "
              << after;
          fail(mono, text());
        }
      }
    }
    {
      const bool fluent = rng.coin();
      const auto p = rng.portfolio(fluent);
      const double n = static_cast<double>(
          std::count_if(p.entries.begin(), p.entries.end(), [](const auto& e) { return e.second > 0.0; }));
      const double v = score(p);
      const double lower = fluent && n >= 1.0 ? 1.0 : 0.0;
      ++range.checks;
      if (!(detail::at_most(lower, v) && detail::at_most(v, n))) {
        msg << "lq(" << detail::describe(p) << ") = " << v << " outside [" << lower << ", " << n << "]";
        fail(range, text());
      }
    }
  }

  AxiomReport report;
  report.trials = trials;
  report.seed = seed;
  report.results = {eq, sub, nd, ind, ph, sandwich, mono, range};
  return report;
}

}  // namespace lqmeter

#endif  // LQMETER_AXIOMS_HPP
