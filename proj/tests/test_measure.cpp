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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <lqmeter/measure.hpp>

#include "support/oracle.hpp"

namespace {

using lqmeter::ExponentPolicy;
using lqmeter::Portfolio;
using lqmeter::TaxonomyTree;
namespace oracle = lqmeter::testing;

// Reference values evaluated independently at 30 significant digits.
constexpr double kWestern = 1.63446306806199746667;         // 3^(1/sqrt 5)
constexpr double kIndoEuropean = 1.84542112802935598198;    // (0.5^sqrt2 + kWestern^sqrt2)^(1/sqrt2)
constexpr double kExampleScore = 2.84542112802935598198;    // kIndoEuropean + 1
constexpr double kUnionFourLeaves = 2.93861493905951864035;  // {Chinese, Serbian, English, Slovene}
constexpr double kEnglishSlovene = 1.63252691943815284477;  // 2^(1/sqrt 2)
constexpr double kCroatianGain = 0.27105861944097946819;    // 3^(1/sqrt5) - 2^(1/sqrt5)

TaxonomyTree sample() { return lqmeter::load_taxonomy_file(LQMETER_DATA_DIR "/sample.tax"); }

const Portfolio kExample{{"Serbian", 1.0}, {"Slovene", 1.0}, {"Croatian", 1.0}, {"Chinese", 1.0}, {"English", 0.5}};

double value_at(const TaxonomyTree& tree, const lqmeter::LqBreakdown& b, const char* name) {
  return b.node_values.at(*tree.find(name));
}

bool near_rel(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

TEST(Lq, WorkedExample) {
  const auto tree = sample();
  const auto b = lqmeter::lq(tree, kExample);
  EXPECT_NEAR(value_at(tree, b, "Western"), kWestern, 1e-12);
  EXPECT_NEAR(value_at(tree, b, "Indo-European"), kIndoEuropean, 1e-12);
  EXPECT_NEAR(b.score, kExampleScore, 1e-12);
  EXPECT_NEAR(b.score, 2.84, 0.01);
  EXPECT_NEAR(value_at(tree, b, "Western"), 1.63, 0.01);
  EXPECT_NEAR(value_at(tree, b, "Indo-European"), 1.84, 0.01);
  EXPECT_EQ(b.score, b.node_values.at(tree.root()));

  std::map<std::string, double> trace;
  oracle::oracle_value(oracle::sample_tree(), 0.0, {kExample.entries.begin(), kExample.entries.end()},
                       oracle::oracle_sqrt, &trace);
  ASSERT_EQ(trace.size(), b.node_values.size());
  for (const auto& [id, v] : b.node_values) {
    EXPECT_TRUE(near_rel(v, trace.at(tree.node(id).name))) << tree.node(id).name;
  }
}

TEST(Lq, SingleLanguageScoresOne) {
  const auto tree = sample();
  for (auto id : tree.leaves()) {
    for (const auto& policy : {ExponentPolicy::sqrt_rank(), ExponentPolicy::identity_rank(),
                               ExponentPolicy::power_rank(2.0)}) {
      EXPECT_NEAR(lqmeter::lq(tree, Portfolio{{tree.node(id).name, 1.0}}, policy).score, 1.0, 1e-9);
    }
  }
}

TEST(Lq, ThreeWesternSiblings) {
  const auto tree = sample();
  const auto b = lqmeter::lq(tree, Portfolio{{"Serbian", 1.0}, {"Slovene", 1.0}, {"Croatian", 1.0}});
  EXPECT_NEAR(b.score, kWestern, 1e-12);
  EXPECT_NEAR(b.score, 1.63, 0.01);
}

TEST(Lq, DifferentFamiliesAddUp) {
  const auto tree = sample();
  EXPECT_NEAR(lqmeter::lq(tree, Portfolio{{"Serbian", 1.0}, {"Chinese", 1.0}}).score, 2.0, 1e-12);
  EXPECT_NEAR(lqmeter::lq(tree, Portfolio{{"English", 1.0}, {"Chinese", 1.0}}).score, 2.0, 1e-12);
}

TEST(Lq, PartialProficiencySingleton) {
  const auto tree = sample();
  EXPECT_NEAR(lqmeter::lq(tree, Portfolio{{"English", 0.5}}).score, 0.5, 1e-12);
}

TEST(Lq, EmptyPortfolioScoresZero) {
  const auto tree = sample();
  EXPECT_EQ(lqmeter::lq(tree, Portfolio{}).score, 0.0);
  EXPECT_EQ(lqmeter::lq(tree, Portfolio{{"Chinese", 0.0}}).score, 0.0);
  EXPECT_EQ(lqmeter::lq_recursive(tree, Portfolio{}).score, 0.0);
}

TEST(Lq, SubadditivityOnFigureOnePortfolios) {
  const auto tree = sample();
  const Portfolio pi{{"Chinese", 1.0}, {"Serbian", 1.0}};
  const Portfolio phi{{"English", 1.0}, {"Slovene", 1.0}};
  const double joint = lqmeter::lq(tree, lqmeter::portfolio_union(pi, phi)).score;
  const double a = lqmeter::lq(tree, pi).score;
  const double b = lqmeter::lq(tree, phi).score;
  EXPECT_NEAR(joint, kUnionFourLeaves, 1e-12);
  EXPECT_NEAR(a, 2.0, 1e-12);
  EXPECT_NEAR(b, kEnglishSlovene, 1e-12);
  EXPECT_LE(joint, a + b);

  const auto root = oracle::sample_tree();
  EXPECT_NEAR(oracle::oracle_lq(root, {{"Chinese", 1}, {"Serbian", 1}, {"English", 1}, {"Slovene", 1}}), joint, 1e-12);
  EXPECT_NEAR(oracle::oracle_lq(root, {{"English", 1}, {"Slovene", 1}}), b, 1e-12);
}

TEST(Lq, RootOnlyTree) {
  const auto tree = lqmeter::load_taxonomy(R"({"name":"Solo"})");
  EXPECT_NEAR(lqmeter::lq(tree, Portfolio{{"Solo", 0.75}}).score, 0.75, 1e-15);
}

TEST(Lq, RejectsInvalidPolicy) {
  const auto tree = sample();
  const auto decreasing = ExponentPolicy::custom([](std::size_t r) { return r < 5 ? std::sqrt(r) : 0.5; }, "broken");
  const auto off_by_one = ExponentPolicy::custom([](std::size_t r) { return static_cast<double>(r) + 1.0; });
  for (const auto& p : {decreasing, off_by_one}) {
    try {
      (void)lqmeter::lq(tree, kExample, p);
      ADD_FAILURE() << "policy accepted";
    } catch (const lqmeter::Error& e) {
      EXPECT_EQ(e.code(), lqmeter::ErrorCode::invalid_policy);
    }
  }
}

TEST(LqRecursive, MatchesIterativeOnExample) {
  const auto tree = sample();
  const auto it = lqmeter::lq(tree, kExample);
  const auto rec = lqmeter::lq_recursive(tree, kExample);
  ASSERT_EQ(it.node_values.size(), rec.node_values.size());
  for (const auto& [id, v] : it.node_values) {
    EXPECT_TRUE(near_rel(v, rec.node_values.at(id)));
  }
  EXPECT_NEAR(lqmeter::lq_recursive(tree, Portfolio{{"Croatian", 1.0}}).score, 1.0, 1e-12);
}

TEST(LqRecursive, RejectsExcessiveDepth) {
  std::string doc;
  constexpr int depth = 10'050;
  for (int i = 0; i < depth; ++i) {
    doc += R"({"name":"n)" + std::to_string(i) + R"(","children":[)";
  }
  doc += R"({"name":"leaf"})";
  for (int i = 0; i < depth; ++i) {
    doc += "]}";
  }
  const auto tree = lqmeter::load_taxonomy(doc);
  const Portfolio p{{"leaf", 1.0}};
  EXPECT_NEAR(lqmeter::lq(tree, p).score, 1.0, 1e-12);
  try {
    (void)lqmeter::lq_recursive(tree, p);
    ADD_FAILURE() << "deep recursion accepted";
  } catch (const lqmeter::Error& e) {
    EXPECT_EQ(e.code(), lqmeter::ErrorCode::depth_limit);
  }
}

TEST(MarginalGain, Examples) {
  const auto tree = sample();
  EXPECT_NEAR(lqmeter::marginal_gain(tree, Portfolio{{"Serbian", 1.0}}, "Chinese", 1.0), 1.0, 1e-12);
  EXPECT_EQ(lqmeter::marginal_gain(tree, Portfolio{{"Serbian", 1.0}}, "Serbian", 1.0), 0.0);
  EXPECT_EQ(lqmeter::marginal_gain(tree, Portfolio{{"Serbian", 1.0}}, "Serbian", 0.4), 0.0);
  const double g = lqmeter::marginal_gain(tree, Portfolio{{"Serbian", 1.0}, {"Slovene", 1.0}}, "Croatian", 1.0);
  EXPECT_NEAR(g, kCroatianGain, 1e-12);
  EXPECT_NEAR(g, 0.27, 0.005);
}

TEST(MarginalGain, UnknownLanguage) {
  const auto tree = sample();
  try {
    (void)lqmeter::marginal_gain(tree, Portfolio{{"Serbian", 1.0}}, "Klingon", 1.0);
    ADD_FAILURE();
  } catch (const lqmeter::Error& e) {
    EXPECT_EQ(e.code(), lqmeter::ErrorCode::unknown_language);
  }
}

TEST(SuggestNext, RanksCrossFamilyFirst) {
  const auto tree = sample();
  const auto all = lqmeter::suggest_next(tree, Portfolio{{"Serbian", 1.0}}, 10);
  ASSERT_EQ(all.size(), 4U);

  // Independent ranking: evaluate every remaining leaf with the oracle.
  std::vector<std::pair<double, std::string>> expected;
  for (const char* l : {"Chinese", "English", "Slovene", "Croatian"}) {
    const double gain = oracle::oracle_lq(oracle::sample_tree(), {{"Serbian", 1.0}, {l, 1.0}}) - 1.0;
    expected.emplace_back(-gain, l);
  }
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].language, expected[i].second);
    EXPECT_NEAR(all[i].gain, -expected[i].first, 1e-12);
  }
  EXPECT_EQ(all[0].language, "Chinese");
  EXPECT_EQ(all[1].language, "English");
  // Croatian and Slovene tie; the name breaks it.
  EXPECT_EQ(all[2].language, "Croatian");

  const auto top1 = lqmeter::suggest_next(tree, Portfolio{{"Serbian", 1.0}}, 1);
  ASSERT_EQ(top1.size(), 1U);
  EXPECT_EQ(top1[0].language, "Chinese");
  EXPECT_NEAR(top1[0].gain, 1.0, 1e-12);
}

TEST(SuggestNext, EdgeCases) {
  const auto tree = sample();
  Portfolio everything;
  for (auto id : tree.leaves()) {
    everything.entries[tree.node(id).name] = 1.0;
  }
  EXPECT_TRUE(lqmeter::suggest_next(tree, everything, 3).empty());
  EXPECT_EQ(lqmeter::suggest_next(tree, Portfolio{}, 100).size(), 5U);
  EXPECT_THROW((void)lqmeter::suggest_next(tree, Portfolio{}, 0), lqmeter::Error);
}

TEST(ExponentPolicy, ParseAndName) {
  EXPECT_EQ(ExponentPolicy::parse("sqrt").kind(), ExponentPolicy::Kind::sqrt_rank);
  EXPECT_EQ(ExponentPolicy::parse("identity").kind(), ExponentPolicy::Kind::identity_rank);
  const auto p = ExponentPolicy::parse("pow:0.75");
  EXPECT_EQ(p.kind(), ExponentPolicy::Kind::power_rank);
  EXPECT_DOUBLE_EQ(p(16), 8.0);
  EXPECT_EQ(ExponentPolicy::parse(p.name()).parameter(), 0.75);
  EXPECT_DOUBLE_EQ(ExponentPolicy::sqrt_rank()(5), std::sqrt(5.0));
  for (const char* bad : {"cube", "pow:", "pow:-1", "pow:abc", "pow:0"}) {
    EXPECT_THROW((void)ExponentPolicy::parse(bad), lqmeter::Error) << bad;
  }
}

TEST(ExponentPolicy, BuiltinsSatisfyContract) {
  for (const auto& p : {ExponentPolicy::sqrt_rank(), ExponentPolicy::identity_rank(), ExponentPolicy::power_rank(0.1),
                        ExponentPolicy::power_rank(3.0)}) {
    EXPECT_NO_THROW(p.validate(64)) << p.name();
    EXPECT_EQ(p(1), 1.0);
  }
}

// ---------------------------------------------------------------------------
// Properties on random trees.

struct Instance {
  oracle::OracleNode root;
  TaxonomyTree tree;
  std::vector<std::string> leaves;
};

Instance make_instance(std::mt19937_64& rng) {
  auto root = oracle::random_tree(rng);
  auto tree = TaxonomyTree::from_json(oracle::to_document(root));
  std::vector<std::string> leaves;
  oracle::collect_leaves(root, leaves);
  return {std::move(root), std::move(tree), std::move(leaves)};
}

Portfolio random_portfolio(std::mt19937_64& rng, const std::vector<std::string>& leaves, bool fluent) {
  Portfolio p;
  const double density = std::uniform_real_distribution<double>(0.01, 0.3)(rng);
  for (const auto& l : leaves) {
    if (std::bernoulli_distribution(density)(rng)) {
      p.entries[l] = fluent ? 1.0 : std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
  }
  return p;
}

TEST(LqProperties, AgreesWithOracle) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 200; ++i) {
    const auto inst = make_instance(rng);
    const auto p = random_portfolio(rng, inst.leaves, false);
    const oracle::Weights w(p.entries.begin(), p.entries.end());
    EXPECT_TRUE(near_rel(lqmeter::lq(inst.tree, p).score, oracle::oracle_lq(inst.root, w)));
    EXPECT_TRUE(near_rel(lqmeter::lq(inst.tree, p, ExponentPolicy::identity_rank()).score,
                         oracle::oracle_lq(inst.root, w, oracle::oracle_identity)));
  }
}

TEST(LqProperties, Monotonicity) {
  std::mt19937_64 rng(102);
  for (int i = 0; i < 300; ++i) {
    const auto inst = make_instance(rng);
    auto p = random_portfolio(rng, inst.leaves, false);
    if (p.empty()) {
      continue;
    }
    const double before = lqmeter::lq(inst.tree, p).score;
    auto it = p.entries.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, p.size() - 1)(rng));
    it->second += std::uniform_real_distribution<double>(0.0, 1.0)(rng) * (1.0 - it->second);
    EXPECT_GE(lqmeter::lq(inst.tree, p).score, before - 1e-9 * std::max(1.0, before));
  }
}

TEST(LqProperties, SingleChildPassthrough) {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 100; ++i) {
    const auto inst = make_instance(rng);
    const auto p = random_portfolio(rng, inst.leaves, false);
    const auto b = lqmeter::lq(inst.tree, p);
    for (const auto& [id, v] : b.node_values) {
      std::vector<double> included;
      for (auto c : inst.tree.node(id).children) {
        if (b.node_values.contains(c)) {
          included.push_back(b.node_values.at(c));
        }
      }
      if (included.size() == 1) {
        EXPECT_LE(std::abs(v - included.front()), 1e-9);
      }
    }
  }
}

oracle::OracleNode shuffled(oracle::OracleNode node, std::mt19937_64& rng) {
  std::shuffle(node.children.begin(), node.children.end(), rng);
  for (auto& c : node.children) {
    c = shuffled(std::move(c), rng);
  }
  return node;
}

TEST(LqProperties, PermutationInvariance) {
  std::mt19937_64 rng(104);
  for (int i = 0; i < 100; ++i) {
    const auto inst = make_instance(rng);
    const auto p = random_portfolio(rng, inst.leaves, false);
    const auto other = TaxonomyTree::from_json(oracle::to_document(shuffled(inst.root, rng)));
    EXPECT_TRUE(near_rel(lqmeter::lq(inst.tree, p).score, lqmeter::lq(other, p).score));
  }
}

TEST(LqProperties, IterativeRecursiveEquivalence) {
  std::mt19937_64 rng(105);
  for (int i = 0; i < 200; ++i) {
    const auto inst = make_instance(rng);
    const auto p = random_portfolio(rng, inst.leaves, false);
    const auto policy = i % 2 ? ExponentPolicy::sqrt_rank() : ExponentPolicy::identity_rank();
    const auto a = lqmeter::lq(inst.tree, p, policy);
    const auto b = lqmeter::lq_recursive(inst.tree, p, policy);
    ASSERT_EQ(a.node_values.size(), b.node_values.size());
    for (const auto& [id, v] : a.node_values) {
      EXPECT_TRUE(near_rel(v, b.node_values.at(id)));
    }
  }
}

TEST(LqProperties, RangeAndDistinctFamilies) {
  std::mt19937_64 rng(106);
  for (int i = 0; i < 300; ++i) {
    const auto inst = make_instance(rng);
    const auto p = random_portfolio(rng, inst.leaves, true);
    if (p.empty()) {
      continue;
    }
    const double n = static_cast<double>(p.size());
    const double s = lqmeter::lq(inst.tree, p).score;
    EXPECT_GE(s, 1.0 - 1e-9);
    EXPECT_LE(s, n + 1e-9 * n);

    std::set<lqmeter::NodeId> families;
    for (const auto& [l, w] : p.entries) {
      families.insert(inst.tree.family_of(*inst.tree.find(l)));
    }
    if (families.size() == p.size()) {
      EXPECT_TRUE(near_rel(s, n));
    } else {
      EXPECT_LT(s, n - 1e-9);
    }
  }
}

TEST(LqProperties, SiblingClosedForm) {
  for (std::size_t r = 2; r <= 6; ++r) {
    for (std::size_t k = 1; k <= 5; ++k) {
      // A chain down to depth r - 1, whose node carries k leaves at depth r.
      oracle::OracleNode parent{"parent", {}};
      for (std::size_t j = 0; j < k; ++j) {
        parent.children.push_back({"leaf" + std::to_string(j), {}});
      }
      oracle::OracleNode chain = parent;
      for (std::size_t d = r - 1; d-- > 0;) {
        chain = oracle::OracleNode{"up" + std::to_string(d), {chain}};
      }
      const auto tree = TaxonomyTree::from_json(oracle::to_document(chain));
      ASSERT_EQ(tree.node(*tree.find("leaf0")).depth, r);
      Portfolio p;
      for (std::size_t j = 0; j < k; ++j) {
        p.entries["leaf" + std::to_string(j)] = 1.0;
      }
      for (const auto& policy : {ExponentPolicy::sqrt_rank(), ExponentPolicy::identity_rank()}) {
        const auto b = lqmeter::lq(tree, p, policy);
        const double expected = std::pow(static_cast<double>(k), 1.0 / policy(r));
        EXPECT_TRUE(near_rel(value_at(tree, b, "parent"), expected)) << "k=" << k << " r=" << r;
        EXPECT_TRUE(near_rel(b.score, expected));
      }
    }
  }
}

TEST(LqProperties, Subadditivity) {
  std::mt19937_64 rng(107);
  for (int i = 0; i < 300; ++i) {
    const auto inst = make_instance(rng);
    const auto p = random_portfolio(rng, inst.leaves, false);
    const auto q = random_portfolio(rng, inst.leaves, false);
    const double joint = lqmeter::lq(inst.tree, lqmeter::portfolio_union(p, q)).score;
    const double parts = lqmeter::lq(inst.tree, p).score + lqmeter::lq(inst.tree, q).score;
    EXPECT_LE(joint, parts + 1e-9 * std::max(1.0, parts));
  }
}

TEST(BreakdownRows, PreOrderWithSortedSiblings) {
  const auto tree = sample();
  const auto rows = lqmeter::breakdown_rows(tree, lqmeter::lq(tree, kExample));
  std::vector<std::string> order;
  for (const auto& r : rows) {
    order.push_back(r.node);
  }
  EXPECT_EQ(order, (std::vector<std::string>{"ToB", "Indo-European", "Germanic", "West Germanic", "Anglo-Frisian",
                                             "English", "Slavic", "South Slavic", "Western", "Croatian", "Serbian",
                                             "Slovene", "Sino-Tibetan", "Sinitic", "Chinese"}));
}

}  // namespace
