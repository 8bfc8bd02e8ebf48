// Copyright 2026 The stackelsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stackelsim/games.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "stackelsim/error.hpp"
#include "stackelsim/mechanisms.hpp"

namespace stackelsim::games {
namespace {

std::vector<double> utils_of(const GameTree& t, NodeId leaf) {
  const auto u = t.utilities(leaf);
  return {u.begin(), u.end()};
}

std::set<std::vector<double>> utility_set(const GameTree& t, const LeafSet& leaves) {
  std::set<std::vector<double>> out;
  for (NodeId l : leaves) out.insert(utils_of(t, l));
  return out;
}

// Same structure and ids, utilities mapped leaf by leaf.
GameTree map_utilities(const GameTree& t,
                       const std::function<std::vector<double>(std::vector<double>)>& f) {
  GameTree out(t.players());
  for (NodeId id = 0; id < t.size(); ++id) {
    if (t.is_leaf(id)) {
      out.add_leaf(f(utils_of(t, id)));
    } else {
      const auto ch = t.children(id);
      out.add_node(t.owner(id), {ch.begin(), ch.end()});
    }
  }
  out.set_root(t.root());
  return out;
}

// Players 1 and 2 exchanged: owners and utility coordinates.
GameTree swap_players(const GameTree& t) {
  GameTree out(2);
  for (NodeId id = 0; id < t.size(); ++id) {
    if (t.is_leaf(id)) {
      out.add_leaf({t.utility(id, 1), t.utility(id, 0)});
    } else {
      const auto ch = t.children(id);
      out.add_node(1 - t.owner(id), {ch.begin(), ch.end()});
    }
  }
  out.set_root(t.root());
  return out;
}

std::vector<GameTree> random_trees(int count, std::uint64_t seed, int players = 2,
                                   int max_leaves = 8) {
  Rng rng(seed);
  RandomTreeOptions opts;
  opts.players = players;
  opts.max_leaves = max_leaves;
  std::vector<GameTree> out;
  for (int i = 0; i < count; ++i) out.push_back(random_generic_tree(opts, rng));
  return out;
}

TEST(GameTree, BuildAndQuery) {
  GameTree t(2);
  const NodeId a = t.add_leaf({2, 1});
  const NodeId b = t.add_leaf({1, 2});
  const NodeId r = t.add_node(0, {a, b});
  EXPECT_EQ(t.root(), r);
  EXPECT_TRUE(t.is_leaf(a));
  EXPECT_EQ(t.owner(r), 0);
  EXPECT_EQ(t.leaves(), (LeafSet{a, b}));
  EXPECT_TRUE(t.generic());
  EXPECT_TRUE(t.strongly_generic());
  EXPECT_EQ(t.origin(a), a);
  EXPECT_THROW(t.add_leaf({1}), InvalidArgument);
  EXPECT_THROW(t.add_node(2, {a, b}), InvalidArgument);
  EXPECT_THROW(t.add_node(0, {a}), InvalidArgument);
  EXPECT_THROW(t.add_node(0, {a, 17}), InvalidArgument);
  GameTree tie(2);
  tie.add_node(0, {tie.add_leaf({1, 2}), tie.add_leaf({1, 3})});
  EXPECT_TRUE(tie.generic());
  EXPECT_FALSE(tie.strongly_generic());
}

TEST(TextFormat, RoundTrip) {
  const std::string text = "(1 [2 1] (2 [1 0] [3 3]))";
  const auto t = parse_tree(text);
  EXPECT_EQ(t.players(), 2);
  EXPECT_EQ(t.owner(t.root()), 0);
  EXPECT_EQ(to_text(t), text);
  const auto again = parse_tree(to_text(t));
  EXPECT_EQ(to_text(again), text);
  const auto spaced = parse_tree("# comment\n( 1\n  [2.5 -1]   # left\n  [1e2 0] )\n");
  EXPECT_EQ(spaced.utility(0, 0), 2.5);
  EXPECT_EQ(spaced.utility(1, 0), 100.0);
  for (const auto& tree : random_trees(200, 3, 3)) {
    const auto copy = parse_tree(to_text(tree));
    EXPECT_EQ(to_text(copy), to_text(tree));
    EXPECT_EQ(spe(copy).utilities, spe(tree).utilities);
  }
}

void expect_parse_error(const std::string& text, int line, int column) {
  try {
    parse_tree(text);
    ADD_FAILURE() << "no error for: " << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << text << ": " << e.what();
    EXPECT_EQ(e.column(), column) << text << ": " << e.what();
  }
}

TEST(TextFormat, ErrorsCarryPositions) {
  expect_parse_error("", 1, 1);
  expect_parse_error("(1 [1 2])", 1, 1);          // one child
  expect_parse_error("(1 [1 2] [x 2])", 1, 11);   // non-numeric utility
  expect_parse_error("(1 [1 2]\n [1])", 2, 2);    // wrong utility count
  expect_parse_error("(3 [1 2] [2 1])", 1, 2);    // owner out of range
  expect_parse_error("(1 [1 2] [2 1]", 1, 15);    // unterminated
  expect_parse_error("(1 [1 2] [2 1]) [0 0]", 1, 17);
  expect_parse_error("(a [1 2] [2 1])", 1, 2);
}

TEST(Spe, Examples) {
  GameTree single(2);
  single.add_leaf({5, 7});
  EXPECT_EQ(spe(single).utilities, (std::vector<double>{5, 7}));

  const auto two = parse_tree("(2 [2 1] [1 2])");
  EXPECT_EQ(spe(two).utilities, (std::vector<double>{1, 2}));

  // Indifferent owner hurts the other player.
  const auto tie = parse_tree("(1 [1 5] [1 3])");
  EXPECT_EQ(spe(tie).utilities, (std::vector<double>{1, 3}));

  const auto deep = parse_tree("(1 (2 [3 1] [0 2]) (2 [2 2] [1 1]))");
  EXPECT_EQ(spe(deep).utilities, (std::vector<double>{2, 2}));
  EXPECT_THROW(spe(GameTree(2)), InvalidArgument);
}

// Agent 2 bids, agent 3 sees the bid and answers, agent 1 is fixed at 1.
// Leaves carry expected utilities under first price.
TEST(Spe, SequentialFirstPriceEndgame) {
  const double eps = 1.0 / 64;
  const std::vector<double> grid = {0.0, 1.0, 1.0 + eps, 2.0};
  const auto v = stats::ValuationProfile::from_values({1, 2, 3});
  mech::AuctionConfig cfg;
  cfg.n = 3;
  cfg.m = 2;
  cfg.eps = eps;
  cfg.kind = mech::MechanismKind::kFirstPrice;
  auto payoff = [&](double b2, double b3) {
    const auto out = mech::allocate(cfg, v, {{Amount(1.0), Amount(b2), Amount(b3)}}, 0);
    std::vector<double> u;
    for (const auto& x : out.expected_utilities) u.push_back(x.value(eps));
    return u;
  };
  GameTree t(3);
  std::vector<NodeId> agent3_nodes;
  for (double b2 : grid) {
    std::vector<NodeId> leaves;
    for (double b3 : grid) leaves.push_back(t.add_leaf(payoff(b2, b3)));
    agent3_nodes.push_back(t.add_node(2, leaves));
  }
  t.add_node(1, agent3_nodes);
  const auto s = spe(t);
  EXPECT_EQ(s.utilities, (std::vector<double>{0.0, 1.0 - eps, 2.0 - eps}));

  // Strategy enumeration: agent 3 best-responds to each bid of agent 2.
  double best2 = -1.0;
  std::vector<double> outcome;
  for (double b2 : grid) {
    std::vector<double> reply;
    for (double b3 : grid) {
      const auto u = payoff(b2, b3);
      if (reply.empty() || u[2] > reply[2] ||
          (u[2] == reply[2] && u[1] < reply[1])) {
        reply = u;
      }
    }
    if (reply[1] > best2) {
      best2 = reply[1];
      outcome = reply;
    }
  }
  EXPECT_EQ(s.utilities, outcome);
}

TEST(Threaten, Examples) {
  GameTree t(2);
  const NodeId x = t.add_leaf({2, 1});
  const NodeId y = t.add_leaf({1, 0});
  const NodeId z = t.add_leaf({1, 2});
  const NodeId w = t.add_leaf({2, 3});
  t.add_node(0, {x, y, z, w});
  EXPECT_EQ(threaten(t, {x}, {y}), LeafSet{x});
  EXPECT_EQ(threaten(t, {z}, {w}), LeafSet{});
  EXPECT_EQ(threaten(t, {x, z}, {}), LeafSet{});
  EXPECT_EQ(threaten(t, {x, z, w}, {z}), (LeafSet{w}));
}

TEST(InducibleRegion, Examples) {
  GameTree single(2);
  const NodeId only = single.add_leaf({4, 4});
  EXPECT_EQ(inducible_region(single), LeafSet{only});

  const auto t = parse_tree("(2 [2 1] [1 2])");
  EXPECT_EQ(inducible_region(t), LeafSet{1});
  EXPECT_EQ(two_contract_spe(parse_tree("(1 [2 1] [0 0])")).utilities,
            (std::vector<double>{2, 1}));
  EXPECT_EQ(two_contract_spe(parse_tree("(1 [1 2] [2 1])")).utilities,
            (std::vector<double>{2, 1}));
  EXPECT_THROW(inducible_region(parse_tree("(1 [1 2 3] [2 1 3])")), InvalidArgument);
}

TEST(InducibleRegion, MatchesNormalFormEnumeration) {
  int mismatches = 0;
  for (const auto& tree : random_trees(1000, 101)) {
    const auto region = inducible_region(tree);
    const auto expected = oracle::brute_force_inducible(tree);
    if (region != expected) {
      ++mismatches;
      ADD_FAILURE() << to_text(tree);
    }
    // The leader can always commit to its SPE strategy.
    EXPECT_TRUE(std::binary_search(region.begin(), region.end(), spe(tree).leaf));
    const auto all = tree.leaves();
    EXPECT_TRUE(std::includes(all.begin(), all.end(), region.begin(), region.end()));
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(InducibleRegion, BinarizedTreeHasTheSameRegion) {
  for (const auto& tree : random_trees(500, 202)) {
    const auto bin = binarize(tree);
    for (NodeId id = 0; id < bin.size(); ++id) {
      if (!bin.is_leaf(id)) {
        EXPECT_EQ(bin.children(id).size(), 2u);
      }
    }
    LeafSet mapped;
    for (NodeId l : inducible_region(bin)) mapped.push_back(bin.origin(l));
    std::sort(mapped.begin(), mapped.end());
    EXPECT_EQ(mapped, inducible_region(tree));
    EXPECT_EQ(spe(bin).utilities, spe(tree).utilities);
  }
}

TEST(TwoContractSpe, MatchesEnumeratedOptimum) {
  for (const auto& tree : random_trees(1000, 303)) {
    const auto best = oracle::brute_force_two_contract_leaf(tree);
    const auto got = two_contract_spe(tree);
    EXPECT_EQ(got.utilities, utils_of(tree, best)) << to_text(tree);
    EXPECT_EQ(contract_spe(tree, {{0, 1}}).utilities, got.utilities);
    // Player 2 leading is player 1 leading in the swapped game.
    const auto swapped = swap_players(tree);
    const auto other = utils_of(swapped, oracle::brute_force_two_contract_leaf(swapped));
    const auto reversed = contract_spe(tree, {{1, 0}}).utilities;
    EXPECT_EQ(reversed, (std::vector<double>{other[1], other[0]})) << to_text(tree);
  }
}

TEST(ExpandContracts, SmallExamples) {
  const auto t = parse_tree("(1 [2 1] (2 [1 0] [3 3]))");
  EXPECT_EQ(to_text(expand_contracts(t, {})), to_text(t));

  const auto two = parse_tree("(1 [2 1] [1 2])");
  const auto e = expand_contracts(two, {{0}});
  const NodeId root = e.root();
  EXPECT_EQ(e.owner(root), 0);
  ASSERT_EQ(e.children(root).size(), 2u);
  std::set<NodeId> origins;
  for (NodeId c : e.children(root)) {
    ASSERT_TRUE(e.is_leaf(c));
    origins.insert(e.origin(c));
  }
  EXPECT_EQ(origins, (std::set<NodeId>{0, 1}));
  EXPECT_EQ(commitment_count(two, 0), 2u);
  // Player 2 has no move, so there is nothing to commit to.
  EXPECT_EQ(commitment_count(two, 1), 1u);
  EXPECT_THROW(expand_contracts(two, {{0, 0}}), InvalidArgument);
  EXPECT_THROW(expand_contracts(two, {{2}}), InvalidArgument);
}

TEST(ExpandContracts, OneContractMatchesStackelbergEnumeration) {
  for (int players : {2, 3}) {
    for (const auto& tree : random_trees(500, 404 + players, players)) {
      for (int leader = 0; leader < players; ++leader) {
        const auto expanded = expand_contracts(tree, {{leader}});
        const auto s = spe(expanded);
        const auto want = utils_of(tree, oracle::stackelberg_leaf(tree, leader));
        EXPECT_EQ(s.utilities, want) << to_text(tree) << " leader " << leader;
        EXPECT_EQ(contract_spe(tree, {{leader}}).utilities, want);
        EXPECT_EQ(utils_of(tree, expanded.origin(s.leaf)), want);
      }
    }
  }
}

TEST(ExpandContracts, MaterializedTwoContractGameMatchesInducibleRegion) {
  ExpansionBudget budget;
  budget.max_commitments = 200'000;
  budget.max_nodes = 2'000'000;
  int materialized = 0;
  for (const auto& tree : random_trees(400, 505, 2, 6)) {
    GameTree expanded;
    try {
      expanded = expand_contracts(tree, {{0, 1}}, budget);
    } catch (const BudgetExceeded&) {
      continue;
    }
    ++materialized;
    const auto s = spe(expanded);
    const auto region = inducible_region(tree);
    EXPECT_TRUE(std::binary_search(region.begin(), region.end(), expanded.origin(s.leaf)));
    EXPECT_EQ(s.utilities, two_contract_spe(tree).utilities) << to_text(tree);
  }
  EXPECT_GT(materialized, 100);
}

TEST(ExpandContracts, BudgetGuard) {
  const auto t = parse_tree("(1 (1 [1 1] [2 2]) (1 [3 3] [4 4]) (1 [5 5] [6 6]))");
  EXPECT_EQ(commitment_count(t, 0), 6u);
  ExpansionBudget tight;
  tight.max_commitments = 5;
  EXPECT_THROW(expand_contracts(t, {{0}}, tight), BudgetExceeded);
  ExpansionBudget few_nodes;
  few_nodes.max_nodes = 3;
  EXPECT_THROW(expand_contracts(t, {{0}}, few_nodes), BudgetExceeded);
  EXPECT_THROW(side_contract_resilient(t, 1, tight), BudgetExceeded);
  EXPECT_NO_THROW(expand_contracts(t, {{0}}));
}

TEST(GameEquivalent, Examples) {
  const auto t = parse_tree("(1 [2 1] (2 [1 0] [3 3]))");
  EXPECT_TRUE(game_equivalent(t, t));
  GameTree a(2), b(2), c(3);
  a.add_leaf({1, 2});
  b.add_leaf({2, 1});
  c.add_leaf({1, 2, 3});
  EXPECT_FALSE(game_equivalent(a, b));
  EXPECT_THROW(game_equivalent(a, c), InvalidArgument);
}

TEST(GameEquivalent, EquivalenceRelation) {
  const auto trees = random_trees(60, 606, 2, 3);
  int related = 0;
  for (const auto& x : trees) {
    EXPECT_TRUE(game_equivalent(x, x));
    EXPECT_TRUE(game_equivalent(x, binarize(x)));
    for (const auto& y : trees) {
      const bool xy = game_equivalent(x, y);
      EXPECT_EQ(xy, game_equivalent(y, x));
      if (!xy) continue;
      ++related;
      for (const auto& z : trees) {
        if (game_equivalent(y, z)) {
          EXPECT_TRUE(game_equivalent(x, z));
        }
      }
    }
  }
  EXPECT_GT(related, static_cast<int>(trees.size()));
}

TEST(Resilience, Examples) {
  GameTree single(2);
  single.add_leaf({1, 1});
  for (int k = 0; k <= 2; ++k) EXPECT_TRUE(side_contract_resilient(single, k));
  const auto t = parse_tree("(1 [2 1] [1 2])");
  EXPECT_TRUE(side_contract_resilient(t, 1));
  EXPECT_TRUE(side_contract_resilient(t, 0));
  // Player 2 would gladly commit here.
  const auto threat = parse_tree("(1 (2 [3 1] [0 0]) [1 2])");
  EXPECT_FALSE(side_contract_resilient(threat, 1));
  EXPECT_THROW(side_contract_resilient(t, 3), InvalidArgument);
}

TEST(Resilience, ResilientGameMatchesItsContractExpansion) {
  int found = 0;
  for (const auto& tree : random_trees(300, 707)) {
    if (!side_contract_resilient(tree, 1)) continue;
    ++found;
    EXPECT_TRUE(game_equivalent(tree, expand_contracts(tree, {{0}})));
    EXPECT_TRUE(game_equivalent(tree, expand_contracts(tree, {{1}})));
  }
  EXPECT_GT(found, 10);
}

TEST(Resilience, TwoResilienceImpliesOneResilience) {
  int two_resilient = 0;
  int counterexamples = 0;
  for (const auto& tree : random_trees(1000, 808)) {
    if (!side_contract_resilient(tree, 2)) continue;
    ++two_resilient;
    if (!side_contract_resilient(tree, 1)) {
      ++counterexamples;
      ADD_FAILURE() << to_text(tree);
    }
  }
  EXPECT_EQ(counterexamples, 0);
  EXPECT_GT(two_resilient, 20);
}

TEST(Invariance, PositiveAffineRescaling) {
  Rng rng(909);
  for (const auto& tree : random_trees(500, 910)) {
    const double a0 = 0.5 + 3.0 * rng.uniform01(), b0 = rng.uniform01() * 10 - 5;
    const double a1 = 0.5 + 3.0 * rng.uniform01(), b1 = rng.uniform01() * 10 - 5;
    const auto scaled = map_utilities(tree, [&](std::vector<double> u) {
      return std::vector<double>{a0 * u[0] + b0, a1 * u[1] + b1};
    });
    EXPECT_EQ(spe(scaled).leaf, spe(tree).leaf);
    EXPECT_EQ(inducible_region(scaled), inducible_region(tree));
    EXPECT_EQ(two_contract_spe(scaled).leaf, two_contract_spe(tree).leaf);
  }
}

TEST(RandomTrees, AreStronglyGenericAndBounded) {
  for (const auto& tree : random_trees(500, 1001, 3)) {
    const auto n = tree.leaves().size();
    EXPECT_GE(n, 2u);
    EXPECT_LE(n, 8u);
    EXPECT_TRUE(tree.strongly_generic());
    EXPECT_EQ(utility_set(tree, tree.leaves()).size(), n);
  }
}

}  // namespace
}  // namespace stackelsim::games
