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

// Perfect-information extensive-form games with smart contracts.
//
// Players are 0-based in the API and 1-based in the text format. A tree is
// stored as an arena of nodes; children may be shared between parents, which
// is how contract expansion keeps its output small. Leaves carry a utility
// vector and the id of the leaf they were copied from (`origin`), so leaves
// of a transformed tree can be traced back to the game they came from.
//
// Text format, whitespace-insensitive, `#` starts a comment:
//
//   tree := '(' owner tree tree+ ')' | '[' number+ ']'
//
// e.g. `(1 [2 1] (2 [1 0] [3 3]))` is a root owned by player 1 whose second
// child is owned by player 2.

#ifndef STACKELSIM_GAMES_HPP_
#define STACKELSIM_GAMES_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stackelsim/rng.hpp"

namespace stackelsim::games {

using NodeId = int;
using LeafSet = std::vector<NodeId>;  // ascending, distinct

class GameTree {
 public:
  explicit GameTree(int players = 2);

  // `origin` defaults to the new leaf's own id.
  NodeId add_leaf(std::vector<double> utilities, NodeId origin = -1);
  // Owner is a 0-based player; at least two children, all existing nodes.
  NodeId add_node(int owner, std::vector<NodeId> children);

  // The root is the most recently added node unless set explicitly.
  NodeId root() const;
  void set_root(NodeId id);

  int players() const { return players_; }
  int size() const { return static_cast<int>(owner_.size()); }
  bool empty() const { return owner_.empty(); }

  bool is_leaf(NodeId id) const { return owner_[id] < 0; }
  int owner(NodeId id) const { return owner_[id]; }  // -1 for leaves
  std::span<const NodeId> children(NodeId id) const;
  std::span<const double> utilities(NodeId leaf) const;
  double utility(NodeId leaf, int player) const;
  NodeId origin(NodeId leaf) const { return origin_[leaf]; }

  // Distinct leaves below `id` (or below the root).
  LeafSet leaves_under(NodeId id) const;
  LeafSet leaves() const { return leaves_under(root()); }

  // Reachable leaves have pairwise distinct utility vectors.
  bool generic() const;
  // For every player, reachable leaves have pairwise distinct utilities.
  bool strongly_generic() const;

 private:
  void check_id(NodeId id) const;

  int players_;
  std::vector<int> owner_;
  std::vector<std::size_t> child_begin_;
  std::vector<NodeId> child_pool_;
  std::vector<std::size_t> util_begin_;
  std::vector<double> util_pool_;
  std::vector<NodeId> origin_;
  NodeId root_ = -1;
};

// Throws ParseError with the 1-based line and column of the offending token.
GameTree parse_tree(std::string_view text);
std::string to_text(const GameTree& tree);

// A random tree with between 1 and `max_leaves` leaves (at least
// `min_leaves`), node arity in [2, max_arity], uniform random owners and, for
// each player, a uniformly random permutation of 1..L as leaf utilities.
struct RandomTreeOptions {
  int players = 2;
  int min_leaves = 2;
  int max_leaves = 8;
  int max_arity = 3;
};
GameTree random_generic_tree(const RandomTreeOptions& options, Rng& rng);

struct Solution {
  NodeId leaf = -1;
  std::vector<double> utilities;
};

// Backward induction. The owner of each node maximizes their own utility;
// among equally good children they pick the one that is lexicographically
// worst for the other players (in player order), then the first child.
Solution spe(const GameTree& tree);

// Leaves of `a` whose utility for player 2 exceeds that of some leaf in `b`.
LeafSet threaten(const GameTree& tree, const LeafSet& a, const LeafSet& b);

// Splits every node with more than two children into a left-leaning cascade
// of binary nodes with the same owner. Leaves keep their origin.
GameTree binarize(const GameTree& tree);

// Leaves player 1 can induce with the outer of two contracts (player 2 holds
// the inner one). Two-player trees only; n-ary nodes are handled as their
// binary cascade.
LeafSet inducible_region(const GameTree& tree);

// The inducible leaf that is best for player 1; ties go to the leaf worse
// for player 2, then the lower id.
Solution two_contract_spe(const GameTree& tree);

// Distinct players holding contracts, outermost (leading) first.
struct ContractOrder {
  std::vector<int> players;
  void validate(int player_count) const;
};

struct ExpansionBudget {
  std::uint64_t max_commitments = 1'000'000;  // per contract node
  std::uint64_t max_nodes = 20'000'000;       // nodes in the expanded tree
};

// The game C_P(G). Contracts are expanded innermost first: each contract
// player gets a root node choosing among all their reduced pure strategies
// in the game built so far. Throws BudgetExceeded before allocating when a
// limit would be crossed.
GameTree expand_contracts(const GameTree& tree, const ContractOrder& order,
                          const ExpansionBudget& budget = {});

// Number of commitments the contract node for `player` would offer in `tree`
// (saturating at UINT64_MAX).
std::uint64_t commitment_count(const GameTree& tree, int player);

// Same SPE utility vector (the SPE is unique under the tie-breaking rule).
bool game_equivalent(const GameTree& a, const GameTree& b);

// C_P(G) equivalent to G for every list P of k distinct players. Two-player
// games with k = 2 go through the inducible region; everything else expands
// the contracts.
bool side_contract_resilient(const GameTree& tree, int k,
                             const ExpansionBudget& budget = {});

// C_P(G) via the route side_contract_resilient uses for that order.
Solution contract_spe(const GameTree& tree, const ContractOrder& order,
                      const ExpansionBudget& budget = {});

}  // namespace stackelsim::games

#endif  // STACKELSIM_GAMES_HPP_
