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

#ifndef LQMETER_TAXONOMY_HPP
#define LQMETER_TAXONOMY_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include <lqmeter/error.hpp>

/**
 * \file
 * \brief Language classification tree, portfolios and induced portfolio subtrees.
 *
 * The tree is rooted at a synthetic "Tower of Babel" node of depth 0. Its
 * children are the language families (depth 1); leaves are languages and may
 * sit at different depths. A portfolio maps leaf names to proficiencies in
 * [0, 1] and induces the parent-closed subgraph covering the root-to-leaf
 * paths of its non-zero entries.
 */

namespace lqmeter {

/// Index of a node inside one TaxonomyTree. Only meaningful for that tree.
struct NodeId {
  std::uint32_t value{0};

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

struct TaxonomyNode {
  NodeId id;
  std::string name;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::size_t depth{0};

  [[nodiscard]] bool is_leaf() const noexcept { return children.empty(); }
};

/// Immutable rooted classification tree. Safe to share between threads.
class TaxonomyTree {
 public:
  /// Builds a tree from the `{"name": ..., "children": [...]}` document.
  static TaxonomyTree from_json(const nlohmann::json& document);

  [[nodiscard]] NodeId root() const noexcept { return NodeId{0}; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::span<const TaxonomyNode> nodes() const noexcept { return nodes_; }
  [[nodiscard]] const TaxonomyNode& node(NodeId id) const { return nodes_.at(id.value); }
  [[nodiscard]] std::size_t max_depth() const noexcept { return max_depth_; }
  [[nodiscard]] std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  [[nodiscard]] std::optional<NodeId> find(std::string_view name) const {
    if (auto it = name_index_.find(name); it != name_index_.end()) {
      return it->second;
    }
    return std::nullopt;
  }

  /// Leaves in pre-order.
  [[nodiscard]] std::vector<NodeId> leaves() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_) {
      if (n.is_leaf()) {
        out.push_back(n.id);
      }
    }
    return out;
  }

  /// The depth-1 ancestor of `id` (the language family), or the root for the root itself.
  [[nodiscard]] NodeId family_of(NodeId id) const {
    while (node(id).depth > 1) {
      id = *node(id).parent;
    }
    return id;
  }

  /// Names from the root down to the parent of `id`.
  [[nodiscard]] std::vector<std::string> ancestors(NodeId id) const {
    std::vector<std::string> chain;
    for (auto p = node(id).parent; p; p = node(*p).parent) {
      chain.push_back(node(*p).name);
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
  }

  /// Re-serializes the tree in the input format, children in input order.
  [[nodiscard]] nlohmann::json to_json() const;

 private:
  explicit TaxonomyTree(std::vector<TaxonomyNode> nodes);

  std::vector<TaxonomyNode> nodes_;
  std::map<std::string, NodeId, std::less<>> name_index_;
  std::size_t max_depth_{0};
  std::uint64_t fingerprint_{0};
};

/// Language name to proficiency in [0, 1].
/**
 * `taxonomy` records the fingerprint of the tree the portfolio was bound to
 * with bind(); unbound portfolios combine freely.
 */
struct Portfolio {
  std::map<std::string, double, std::less<>> entries;
  std::optional<std::uint64_t> taxonomy;

  Portfolio() = default;
  Portfolio(std::initializer_list<std::pair<const std::string, double>> init) : entries(init) {}

  [[nodiscard]] bool empty() const noexcept { return entries.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }

  [[nodiscard]] double proficiency(std::string_view language) const {
    auto it = entries.find(language);
    return it == entries.end() ? 0.0 : it->second;
  }

  friend bool operator==(const Portfolio& a, const Portfolio& b) { return a.entries == b.entries; }
};

/// Parent-closed node set induced by a portfolio.
struct PortfolioSubtree {
  std::uint64_t tree{0};
  std::set<NodeId> included_nodes;
  std::map<NodeId, double> leaf_weights;

  [[nodiscard]] bool contains(NodeId id) const { return included_nodes.contains(id); }
};

struct LanguageEntry {
  std::string name;
  std::vector<std::string> path;

  friend bool operator==(const LanguageEntry&, const LanguageEntry&) = default;
};

// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t fnv1a(std::uint64_t hash, std::string_view bytes) noexcept {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

inline bool iequals_prefix(std::string_view text, std::string_view prefix) noexcept {
  if (prefix.size() > text.size()) {
    return false;
  }
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const auto a = std::tolower(static_cast<unsigned char>(text[i]));
    const auto b = std::tolower(static_cast<unsigned char>(prefix[i]));
    if (a != b) {
      return false;
    }
  }
  return true;
}

inline void check_proficiency(std::string_view language, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream msg;
    msg << "proficiency of '" << language << "' must lie in [0, 1], got " << value;
    throw Error(ErrorCode::proficiency_out_of_range, msg.str(), std::string(language));
  }
}

}  // namespace detail

inline TaxonomyTree::TaxonomyTree(std::vector<TaxonomyNode> nodes) : nodes_(std::move(nodes)) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const auto& n : nodes_) {
    max_depth_ = std::max(max_depth_, n.depth);
    name_index_.emplace(n.name, n.id);
    hash = detail::fnv1a(hash, n.name);
    hash = detail::fnv1a(hash, "\x1f" + std::to_string(n.depth) + "\x1e");
  }
  fingerprint_ = hash;
}

inline TaxonomyTree TaxonomyTree::from_json(const nlohmann::json& document) {
  if (document.is_null() || (document.is_array() && document.empty())) {
    throw Error(ErrorCode::empty_tree, "taxonomy document is empty");
  }
  if (document.is_array()) {
    throw Error(ErrorCode::validation_error,
                "taxonomy has " + std::to_string(document.size()) + " roots; exactly one is required");
  }

  std::vector<TaxonomyNode> nodes;
  std::set<std::string, std::less<>> seen;

  struct Pending {
    const nlohmann::json* doc;
    std::optional<NodeId> parent;
  };
  std::vector<Pending> stack{{&document, std::nullopt}};

  // Iterative pre-order walk so that very deep documents cannot overflow the call stack.
  while (!stack.empty()) {
    const auto [doc, parent] = stack.back();
    stack.pop_back();

    if (!doc->is_object()) {
      throw Error(ErrorCode::parse_error, "taxonomy node must be an object");
    }
    const auto name_it = doc->find("name");
    if (name_it == doc->end() || !name_it->is_string()) {
      throw Error(ErrorCode::parse_error, "taxonomy node is missing a string \"name\"");
    }
    auto name = name_it->get<std::string>();
    if (name.empty()) {
      throw Error(ErrorCode::validation_error, "taxonomy node names must be non-empty");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::validation_error, "duplicate node name '" + name + "'", name);
    }

    TaxonomyNode node;
    node.id = NodeId{static_cast<std::uint32_t>(nodes.size())};
    node.name = std::move(name);
    node.parent = parent;
    node.depth = parent ? nodes[parent->value].depth + 1 : 0;
    if (parent) {
      nodes[parent->value].children.push_back(node.id);
    }

    if (const auto children = doc->find("children"); children != doc->end() && !children->is_null()) {
      if (!children->is_array()) {
        throw Error(ErrorCode::parse_error, "\"children\" of '" + node.name + "' must be an array");
      }
      for (auto it = children->rbegin(); it != children->rend(); ++it) {
        stack.push_back({&*it, node.id});
      }
    }
    nodes.push_back(std::move(node));
  }

  return TaxonomyTree(std::move(nodes));
}

inline nlohmann::json TaxonomyTree::to_json() const {
  // Children always carry larger ids than their parent, so a reverse sweep
  // assembles every subtree before its parent needs it.
  std::vector<nlohmann::json> built(nodes_.size());
  for (auto i = nodes_.size(); i-- > 0;) {
    const auto& n = nodes_[i];
    nlohmann::json doc = nlohmann::json::object();
    doc["name"] = n.name;
    if (!n.is_leaf()) {
      auto children = nlohmann::json::array();
      for (auto c : n.children) {
        children.push_back(std::move(built[c.value]));
      }
      doc["children"] = std::move(children);
    }
    built[i] = std::move(doc);
  }
  return std::move(built.front());
}

/// Parses and validates a taxonomy document.
inline TaxonomyTree load_taxonomy(std::istream& source) {
  const std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw Error(ErrorCode::empty_tree, "taxonomy document is empty");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed taxonomy: ") + e.what());
  }
  return TaxonomyTree::from_json(doc);
}

inline TaxonomyTree load_taxonomy(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_taxonomy(in);
}

inline TaxonomyTree load_taxonomy_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::invalid_argument, "cannot open taxonomy file '" + path + "'", path);
  }
  return load_taxonomy(in);
}

/// Checks every entry of `portfolio` against `tree` and stamps it with the tree's fingerprint.
inline Portfolio bind(const TaxonomyTree& tree, Portfolio portfolio) {
  if (portfolio.taxonomy && *portfolio.taxonomy != tree.fingerprint()) {
    throw Error(ErrorCode::taxonomy_mismatch, "portfolio was validated against a different taxonomy");
  }
  for (const auto& [language, weight] : portfolio.entries) {
    const auto id = tree.find(language);
    if (!id) {
      throw Error(ErrorCode::unknown_language, "unknown language '" + language + "'", language);
    }
    if (!tree.node(*id).is_leaf()) {
      throw Error(ErrorCode::not_a_leaf, "'" + language + "' is a language group, not a language",
                  language);
    }
    detail::check_proficiency(language, weight);
  }
  portfolio.taxonomy = tree.fingerprint();
  return portfolio;
}

/// Root-anchored node set of the non-zero entries of `portfolio`.
inline PortfolioSubtree induce_subtree(const TaxonomyTree& tree, const Portfolio& portfolio) {
  const auto bound = bind(tree, portfolio);

  PortfolioSubtree sub;
  sub.tree = tree.fingerprint();
  sub.included_nodes.insert(tree.root());
  for (const auto& [language, weight] : bound.entries) {
    if (weight == 0.0) {
      continue;
    }
    const auto leaf = *tree.find(language);
    sub.leaf_weights.emplace(leaf, weight);
    for (std::optional<NodeId> n = leaf; n && sub.included_nodes.insert(*n).second;
         n = tree.node(*n).parent) {
    }
  }
  return sub;
}

/// Key-set union; a language present in both keeps the larger proficiency.
inline Portfolio portfolio_union(const Portfolio& a, const Portfolio& b) {
  if (a.taxonomy && b.taxonomy && *a.taxonomy != *b.taxonomy) {
    throw Error(ErrorCode::taxonomy_mismatch, "cannot unite portfolios bound to different taxonomies");
  }
  Portfolio out = a;
  if (!out.taxonomy) {
    out.taxonomy = b.taxonomy;
  }
  for (const auto& [language, weight] : b.entries) {
    auto [it, inserted] = out.entries.emplace(language, weight);
    if (!inserted) {
      it->second = std::max(it->second, weight);
    }
  }
  return out;
}

/// Leaves whose name starts with `query` (ASCII case-insensitive), sorted by name.
inline std::vector<LanguageEntry> list_languages(const TaxonomyTree& tree,
                                                 std::string_view query = {}) {
  std::vector<LanguageEntry> out;
  for (auto id : tree.leaves()) {
    const auto& n = tree.node(id);
    if (detail::iequals_prefix(n.name, query)) {
      out.push_back({n.name, tree.ancestors(id)});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LanguageEntry& x, const LanguageEntry& y) { return x.name < y.name; });
  return out;
}

}  // namespace lqmeter

#endif  // LQMETER_TAXONOMY_HPP
