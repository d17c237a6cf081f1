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

#ifndef LQMETER_FORMATS_HPP
#define LQMETER_FORMATS_HPP

#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "json.hpp"

#include <lqmeter/error.hpp>
#include <lqmeter/measure.hpp>
#include <lqmeter/optimize.hpp>
#include <lqmeter/policy.hpp>
#include <lqmeter/taxonomy.hpp>

// Portfolio and bundle-problem documents, and the JSON shapes of results.
//
//   portfolio: {"languages": {"<leaf name>": <number in [0,1]>, ...}}
//   problem:   {"population": [<portfolio>, ...], "candidates": [<leaf name>, ...], "k": <int>,
//               "objective": "marginal" | "aggregate"   (optional)}

namespace lqmeter {

/// Scores leave the process rounded to 4 decimals.
inline double round4(double x) { return std::round(x * 1e4) / 1e4; }

inline nlohmann::json parse_json_text(const std::string& text, std::string_view what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, "malformed " + std::string(what) + ": " + e.what());
  }
}

inline nlohmann::json read_json_file(const std::string& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::invalid_argument, "cannot open " + std::string(what) + " file '" + path + "'", path);
  }
  return parse_json_text({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}, what);
}

inline Portfolio portfolio_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::parse_error, "portfolio must be an object with a \"languages\" member");
  }
  const auto languages = doc.find("languages");
  if (languages == doc.end() || !languages->is_object()) {
    throw Error(ErrorCode::parse_error, "portfolio must be an object with a \"languages\" member");
  }
  Portfolio p;
  for (const auto& [name, value] : languages->items()) {
    if (!value.is_number()) {
      throw Error(ErrorCode::parse_error, "proficiency of '" + name + "' must be a number", name);
    }
    p.entries[name] = value.get<double>();
  }
  return p;
}

inline nlohmann::json portfolio_to_json(const Portfolio& p) {
  nlohmann::json languages = nlohmann::json::object();
  for (const auto& [name, weight] : p.entries) {
    languages[name] = weight;
  }
  return {{"languages", std::move(languages)}};
}

inline Portfolio load_portfolio_file(const std::string& path) {
  return portfolio_from_json(read_json_file(path, "portfolio"));
}

inline BundleProblem problem_from_json(const nlohmann::json& doc, ExponentPolicy policy = ExponentPolicy::sqrt_rank()) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::parse_error, "problem must be an object");
  }
  BundleProblem problem;
  problem.policy = std::move(policy);

  const auto population = doc.find("population");
  if (population == doc.end() || !population->is_array()) {
    throw Error(ErrorCode::parse_error, "problem needs a \"population\" array");
  }
  for (const auto& member : *population) {
    problem.population.push_back(portfolio_from_json(member));
  }

  const auto candidates = doc.find("candidates");
  if (candidates == doc.end() || !candidates->is_array()) {
    throw Error(ErrorCode::parse_error, "problem needs a \"candidates\" array");
  }
  for (const auto& c : *candidates) {
    if (!c.is_string()) {
      throw Error(ErrorCode::parse_error, "candidates must be language names");
    }
    problem.candidates.insert(c.get<std::string>());
  }

  const auto k = doc.find("k");
  if (k == doc.end() || !k->is_number_integer() || k->get<long long>() < 1) {
    throw Error(ErrorCode::parse_error, "problem needs a positive integer \"k\"");
  }
  problem.bundle_size = k->get<std::size_t>();

  if (const auto objective = doc.find("objective"); objective != doc.end()) {
    if (*objective == "marginal") {
      problem.objective = BundleObjective::marginal;
    } else if (*objective == "aggregate") {
      problem.objective = BundleObjective::aggregate;
    } else {
      throw Error(ErrorCode::parse_error, "objective must be \"marginal\" or \"aggregate\"");
    }
  }
  return problem;
}

inline nlohmann::json breakdown_to_json(const TaxonomyTree& tree, const LqBreakdown& breakdown) {
  auto rows = nlohmann::json::array();
  for (const auto& row : breakdown_rows(tree, breakdown)) {
    rows.push_back({{"node", row.node}, {"depth", row.depth}, {"lambda", round4(row.lambda)}});
  }
  return {{"score", round4(breakdown.score)}, {"policy", breakdown.policy.name()}, {"breakdown", std::move(rows)}};
}

inline nlohmann::json solution_to_json(const BundleSolution& s) {
  auto costs = nlohmann::json::array();
  for (double c : s.per_member_cost) {
    costs.push_back(round4(c));
  }
  return {{"bundle", s.bundle},
          {"total_cost", round4(s.total_cost)},
          {"per_member_cost", std::move(costs)},
          {"method", std::string(to_string(s.method))}};
}

}  // namespace lqmeter

#endif  // LQMETER_FORMATS_HPP
