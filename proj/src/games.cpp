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
#include <charconv>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>

#include "stackelsim/error.hpp"

namespace stackelsim::games {
namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

LeafSet set_union(const LeafSet& a, const LeafSet& b) {
  LeafSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

// True if leaf `a` is strictly preferred to leaf `b` by `owner` under the
// weakly malicious rule.
bool prefers(const GameTree& tree, int owner, NodeId a, NodeId b) {
  const double ua = tree.utility(a, owner);
  const double ub = tree.utility(b, owner);
  if (ua != ub) return ua > ub;
  for (int p = 0; p < tree.players(); ++p) {
    if (p == owner) continue;
    const double pa = tree.utility(a, p);
    const double pb = tree.utility(b, p);
    if (pa != pb) return pa < pb;
  }
  return false;
}

Solution solution_for(const GameTree& tree, NodeId leaf) {
  const auto u = tree.utilities(leaf);
  return {leaf, std::vector<double>(u.begin(), u.end())};
}

void require_two_players(const GameTree& tree) {
  if (tree.players() != 2) {
    throw InvalidArgument("this operation needs a two-player game, got " +
                          std::to_string(tree.players()) + " players");
  }
}

// The same game with players 1 and 2 exchanged. Node ids are preserved.
GameTree swap_roles(const GameTree& tree) {
  GameTree out(2);
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree.is_leaf(id)) {
      const auto u = tree.utilities(id);
      out.add_leaf({u[1], u[0]}, tree.origin(id));
    } else {
      const auto ch = tree.children(id);
      out.add_node(1 - tree.owner(id), std::vector<NodeId>(ch.begin(), ch.end()));
    }
  }
  out.set_root(tree.root());
  return out;
}

// ---------------------------------------------------------------------------
// Text format.

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  GameTree parse() {
    skip_space();
    if (at_end()) fail("empty input, expected a tree");
    const int root = parse_tree();
    skip_space();
    if (!at_end()) fail("unexpected trailing input");

    const std::size_t players = leaves_.front().values.size();
    for (const auto& leaf : leaves_) {
      if (leaf.values.size() != players) {
        throw ParseError("leaf has " + std::to_string(leaf.values.size()) +
                             " utilities, expected " + std::to_string(players),
                         leaf.line, leaf.column);
      }
    }
    for (const auto& node : nodes_) {
      if (node.owner < 1 || node.owner > static_cast<long>(players)) {
        throw ParseError("owner " + std::to_string(node.owner) +
                             " out of range for a " + std::to_string(players) +
                             "-player game",
                         node.line, node.column);
      }
    }

    GameTree tree(static_cast<int>(players));
    std::vector<NodeId> ids(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
      const Item& item = items_[i];
      if (item.is_leaf) {
        ids[i] = tree.add_leaf(leaves_[item.index].values);
      } else {
        const PendingNode& node = nodes_[item.index];
        std::vector<NodeId> children;
        for (int c : node.children) children.push_back(ids[c]);
        ids[i] = tree.add_node(static_cast<int>(node.owner - 1), children);
      }
    }
    tree.set_root(ids[root]);
    return tree;
  }

 private:
  struct PendingLeaf {
    std::vector<double> values;
    int line, column;
  };
  struct PendingNode {
    long owner;
    std::vector<int> children;
    int line, column;
  };
  struct Item {
    bool is_leaf;
    std::size_t index;
  };

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, column_);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  static bool is_delimiter(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '(' ||
           c == ')' || c == '[' || c == ']' || c == '#';
  }

  std::string_view word() {
    const std::size_t start = pos_;
    while (!at_end() && !is_delimiter(peek())) advance();
    return text_.substr(start, pos_ - start);
  }

  int parse_tree() {
    if (peek() == '[') return parse_leaf();
    if (peek() == '(') return parse_node();
    fail(std::string("expected '(' or '[', got '") + peek() + "'");
  }

  int parse_leaf() {
    PendingLeaf leaf{{}, line_, column_};
    advance();  // '['
    for (;;) {
      skip_space();
      if (at_end()) fail("unterminated leaf, expected ']'");
      if (peek() == ']') {
        advance();
        break;
      }
      const int line = line_, column = column_;
      const std::string_view token = word();
      double value = 0.0;
      const auto [end, ec] =
          std::from_chars(token.data(), token.data() + token.size(), value);
      if (token.empty() || ec != std::errc() ||
          end != token.data() + token.size()) {
        throw ParseError(token.empty()
                             ? std::string("expected a utility or ']'")
                             : "utility '" + std::string(token) +
                                   "' is not a number",
                         line, column);
      }
      leaf.values.push_back(value);
    }
    if (leaf.values.empty()) {
      throw ParseError("leaf needs at least one utility", leaf.line,
                       leaf.column);
    }
    leaves_.push_back(std::move(leaf));
    items_.push_back({true, leaves_.size() - 1});
    return static_cast<int>(items_.size() - 1);
  }

  int parse_node() {
    const int line = line_, column = column_;
    advance();  // '('
    skip_space();
    if (at_end()) fail("unterminated node, expected an owner");
    const int owner_line = line_, owner_column = column_;
    const std::string_view token = word();
    long owner = 0;
    const auto [end, ec] =
        std::from_chars(token.data(), token.data() + token.size(), owner);
    if (token.empty() || ec != std::errc() ||
        end != token.data() + token.size()) {
      throw ParseError("expected an integer owner, got '" +
                           std::string(token.empty() ? std::string_view(&text_[pos_], 1)
                                                     : token) +
                           "'",
                       owner_line, owner_column);
    }
    PendingNode node{owner, {}, owner_line, owner_column};
    for (;;) {
      skip_space();
      if (at_end()) fail("unterminated node, expected ')'");
      if (peek() == ')') {
        advance();
        break;
      }
      node.children.push_back(parse_tree());
    }
    if (node.children.size() < 2) {
      throw ParseError("node needs at least two children, got " +
                           std::to_string(node.children.size()),
                       line, column);
    }
    nodes_.push_back(std::move(node));
    items_.push_back({false, nodes_.size() - 1});
    return static_cast<int>(items_.size() - 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  std::vector<PendingLeaf> leaves_;
  std::vector<PendingNode> nodes_;
  std::vector<Item> items_;
};

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

void write_text(const GameTree& tree, NodeId id, std::string& out) {
  if (tree.is_leaf(id)) {
    out += '[';
    bool first = true;
    for (double u : tree.utilities(id)) {
      if (!first) out += ' ';
      first = false;
      append_number(out, u);
    }
    out += ']';
    return;
  }
  out += '(';
  out += std::to_string(tree.owner(id) + 1);
  for (NodeId c : tree.children(id)) {
    out += ' ';
    write_text(tree, c, out);
  }
  out += ')';
}

// ---------------------------------------------------------------------------
// Inducible region of the outer contract.

class InducibleSolver {
 public:
  explicit InducibleSolver(const GameTree& tree)
      : tree_(tree), region_(tree.size()), leaves_(tree.size()) {}

  const LeafSet& region(NodeId id) {
    if (region_[id]) return *region_[id];
    LeafSet result;
    if (tree_.is_leaf(id)) {
      result = {id};
    } else {
      const auto ch = tree_.children(id);
      LeafSet acc = region(ch[0]);
      LeafSet acc_leaves = leaves(ch[0]);
      for (std::size_t t = 1; t < ch.size(); ++t) {
        const LeafSet right = region(ch[t]);
        const LeafSet node_leaves = set_union(acc_leaves, leaves(ch[t]));
        if (tree_.owner(id) == 0) {
          const LeafSet both = set_union(acc, right);
          acc = set_union(both, threaten(tree_, node_leaves, both));
        } else {
          acc = set_union(threaten(tree_, right, acc),
                          threaten(tree_, acc, right));
        }
        acc_leaves = node_leaves;
      }
      result = std::move(acc);
    }
    region_[id] = std::move(result);
    return *region_[id];
  }

 private:
  const LeafSet& leaves(NodeId id) {
    if (leaves_[id]) return *leaves_[id];
    LeafSet result;
    if (tree_.is_leaf(id)) {
      result = {id};
    } else {
      for (NodeId c : tree_.children(id)) result = set_union(result, leaves(c));
    }
    leaves_[id] = std::move(result);
    return *leaves_[id];
  }

  const GameTree& tree_;
  std::vector<std::optional<LeafSet>> region_;
  std::vector<std::optional<LeafSet>> leaves_;
};

// ---------------------------------------------------------------------------
// Contract expansion.

// Reduced-strategy counts for `player` over the nodes reachable from the
// root: how many distinct subgames remain once the player's moves are fixed.
std::vector<std::uint64_t> variant_counts(const GameTree& tree, int player) {
  std::vector<std::uint64_t> count(tree.size(), 0);
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree.is_leaf(id)) {
      count[id] = 1;
    } else if (tree.owner(id) == player) {
      std::uint64_t sum = 0;
      for (NodeId c : tree.children(id)) sum = sat_add(sum, count[c]);
      count[id] = sum;
    } else {
      std::uint64_t prod = 1;
      for (NodeId c : tree.children(id)) prod = sat_mul(prod, count[c]);
      count[id] = prod;
    }
  }
  return count;
}

std::vector<bool> reachable(const GameTree& tree) {
  std::vector<bool> seen(tree.size(), false);
  std::vector<NodeId> stack{tree.root()};
  seen[tree.root()] = true;
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (tree.is_leaf(id)) continue;
    for (NodeId c : tree.children(id)) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  return seen;
}

class Expander {
 public:
  Expander(const GameTree& tree, int player)
      : tree_(tree), player_(player), out_(tree.players()),
        variants_(tree.size()) {}

  GameTree run() {
    const std::vector<NodeId>& top = variants(tree_.root());
    if (top.size() >= 2) {
      out_.add_node(player_, top);
    } else {
      out_.set_root(top.front());
    }
    return std::move(out_);
  }

 private:
  const std::vector<NodeId>& variants(NodeId id) {
    if (variants_[id]) return *variants_[id];
    std::vector<NodeId> result;
    if (tree_.is_leaf(id)) {
      const auto u = tree_.utilities(id);
      result.push_back(out_.add_leaf(std::vector<double>(u.begin(), u.end()),
                                     tree_.origin(id)));
    } else if (tree_.owner(id) == player_) {
      for (NodeId c : tree_.children(id)) {
        const auto& v = variants(c);
        result.insert(result.end(), v.begin(), v.end());
      }
    } else {
      const auto ch = tree_.children(id);
      std::vector<const std::vector<NodeId>*> parts;
      for (NodeId c : ch) parts.push_back(&variants(c));
      std::vector<std::size_t> digit(ch.size(), 0);
      std::vector<NodeId> combo(ch.size());
      for (;;) {
        for (std::size_t i = 0; i < ch.size(); ++i) {
          combo[i] = (*parts[i])[digit[i]];
        }
        result.push_back(out_.add_node(tree_.owner(id), combo));
        // Last child varies fastest.
        bool done = true;
        for (std::size_t pos = ch.size(); pos > 0; --pos) {
          if (++digit[pos - 1] < parts[pos - 1]->size()) {
            done = false;
            break;
          }
          digit[pos - 1] = 0;
        }
        if (done) break;
      }
    }
    variants_[id] = std::move(result);
    return *variants_[id];
  }

  const GameTree& tree_;
  int player_;
  GameTree out_;
  std::vector<std::optional<std::vector<NodeId>>> variants_;
};

GameTree expand_one(const GameTree& tree, int player,
                    const ExpansionBudget& budget) {
  const std::vector<std::uint64_t> count = variant_counts(tree, player);
  const std::uint64_t commitments = count[tree.root()];
  if (commitments > budget.max_commitments) {
    throw BudgetExceeded(
        "contract for player " + std::to_string(player + 1) + " offers " +
        (commitments == kSaturated ? std::string("more than 2^64")
                                   : std::to_string(commitments)) +
        " commitments, budget is " + std::to_string(budget.max_commitments));
  }
  const std::vector<bool> live = reachable(tree);
  std::uint64_t nodes = 1;
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (!live[id]) continue;
    if (tree.is_leaf(id) || tree.owner(id) != player) {
      nodes = sat_add(nodes, count[id]);
    }
  }
  if (nodes > budget.max_nodes) {
    throw BudgetExceeded("expanded tree for player " +
                         std::to_string(player + 1) + " would need " +
                         std::to_string(nodes) + " nodes, budget is " +
                         std::to_string(budget.max_nodes));
  }
  return Expander(tree, player).run();
}

}  // namespace

// ---------------------------------------------------------------------------
// GameTree.

GameTree::GameTree(int players) : players_(players) {
  if (players < 1) throw InvalidArgument("a game needs at least one player");
}

void GameTree::check_id(NodeId id) const {
  if (id < 0 || id >= size()) {
    throw InvalidArgument("node id " + std::to_string(id) + " out of range");
  }
}

NodeId GameTree::add_leaf(std::vector<double> utilities, NodeId origin) {
  if (static_cast<int>(utilities.size()) != players_) {
    throw InvalidArgument("leaf has " + std::to_string(utilities.size()) +
                          " utilities for a " + std::to_string(players_) +
                          "-player game");
  }
  const NodeId id = size();
  owner_.push_back(-1);
  child_begin_.push_back(child_pool_.size());
  util_begin_.push_back(util_pool_.size());
  util_pool_.insert(util_pool_.end(), utilities.begin(), utilities.end());
  origin_.push_back(origin < 0 ? id : origin);
  return id;
}

NodeId GameTree::add_node(int owner, std::vector<NodeId> children) {
  if (owner < 0 || owner >= players_) {
    throw InvalidArgument("owner " + std::to_string(owner) +
                          " out of range for a " + std::to_string(players_) +
                          "-player game");
  }
  if (children.size() < 2) {
    throw InvalidArgument("an internal node needs at least two children");
  }
  for (NodeId c : children) check_id(c);
  const NodeId id = size();
  owner_.push_back(owner);
  child_begin_.push_back(child_pool_.size());
  child_pool_.insert(child_pool_.end(), children.begin(), children.end());
  util_begin_.push_back(util_pool_.size());
  origin_.push_back(-1);
  return id;
}

NodeId GameTree::root() const {
  if (empty()) throw InvalidArgument("empty game tree");
  return root_ >= 0 ? root_ : size() - 1;
}

void GameTree::set_root(NodeId id) {
  check_id(id);
  root_ = id;
}

std::span<const NodeId> GameTree::children(NodeId id) const {
  const std::size_t begin = child_begin_[id];
  const std::size_t end = static_cast<std::size_t>(id) + 1 < child_begin_.size()
                              ? child_begin_[id + 1]
                              : child_pool_.size();
  return {child_pool_.data() + begin, end - begin};
}

std::span<const double> GameTree::utilities(NodeId leaf) const {
  if (!is_leaf(leaf)) {
    throw InvalidArgument("node " + std::to_string(leaf) + " is not a leaf");
  }
  return {util_pool_.data() + util_begin_[leaf],
          static_cast<std::size_t>(players_)};
}

double GameTree::utility(NodeId leaf, int player) const {
  return util_pool_[util_begin_[leaf] + static_cast<std::size_t>(player)];
}

LeafSet GameTree::leaves_under(NodeId id) const {
  check_id(id);
  std::vector<bool> seen(size(), false);
  std::vector<NodeId> stack{id};
  seen[id] = true;
  LeafSet out;
  while (!stack.empty()) {
    const NodeId cur = stack.back();
    stack.pop_back();
    if (is_leaf(cur)) {
      out.push_back(cur);
      continue;
    }
    for (NodeId c : children(cur)) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool GameTree::generic() const {
  std::vector<std::vector<double>> vectors;
  for (NodeId leaf : leaves()) {
    const auto u = utilities(leaf);
    vectors.emplace_back(u.begin(), u.end());
  }
  std::sort(vectors.begin(), vectors.end());
  return std::adjacent_find(vectors.begin(), vectors.end()) == vectors.end();
}

bool GameTree::strongly_generic() const {
  const LeafSet all = leaves();
  for (int p = 0; p < players_; ++p) {
    std::vector<double> values;
    for (NodeId leaf : all) values.push_back(utility(leaf, p));
    std::sort(values.begin(), values.end());
    if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
      return false;
    }
  }
  return true;
}

GameTree parse_tree(std::string_view text) { return Parser(text).parse(); }

std::string to_text(const GameTree& tree) {
  std::string out;
  write_text(tree, tree.root(), out);
  return out;
}

GameTree random_generic_tree(const RandomTreeOptions& options, Rng& rng) {
  if (options.players < 1 || options.min_leaves < 1 ||
      options.max_leaves < options.min_leaves || options.max_arity < 2) {
    throw InvalidArgument("invalid random tree options");
  }
  const int leaves =
      options.min_leaves +
      static_cast<int>(rng.below(
          static_cast<std::size_t>(options.max_leaves - options.min_leaves + 1)));

  std::vector<std::vector<double>> values(options.players);
  for (auto& perm : values) {
    perm.resize(static_cast<std::size_t>(leaves));
    std::iota(perm.begin(), perm.end(), 1.0);
    rng.shuffle(std::span<double>(perm));
  }

  GameTree tree(options.players);
  int next_leaf = 0;
  // Recursively splits `count` leaves among a random number of children.
  auto build = [&](auto&& self, int count) -> NodeId {
    if (count == 1) {
      std::vector<double> u;
      for (const auto& perm : values) u.push_back(perm[next_leaf]);
      ++next_leaf;
      return tree.add_leaf(std::move(u));
    }
    const int max_arity = std::min(options.max_arity, count);
    const int arity = 2 + static_cast<int>(rng.below(
                              static_cast<std::size_t>(max_arity - 1)));
    // A uniform composition of `count` into `arity` positive parts.
    std::vector<int> cuts(static_cast<std::size_t>(count - 1));
    std::iota(cuts.begin(), cuts.end(), 1);
    rng.shuffle(std::span<int>(cuts));
    cuts.resize(static_cast<std::size_t>(arity - 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<NodeId> children;
    int prev = 0;
    for (int c : cuts) {
      children.push_back(self(self, c - prev));
      prev = c;
    }
    children.push_back(self(self, count - prev));
    const int owner = static_cast<int>(
        rng.below(static_cast<std::size_t>(options.players)));
    return tree.add_node(owner, std::move(children));
  };
  tree.set_root(build(build, leaves));
  return tree;
}

Solution spe(const GameTree& tree) {
  if (tree.empty()) throw InvalidArgument("empty game tree");
  std::vector<NodeId> best(tree.size(), -1);
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree.is_leaf(id)) {
      best[id] = id;
      continue;
    }
    const int owner = tree.owner(id);
    NodeId chosen = -1;
    for (NodeId c : tree.children(id)) {
      if (chosen < 0 || prefers(tree, owner, best[c], chosen)) chosen = best[c];
    }
    best[id] = chosen;
  }
  return solution_for(tree, best[tree.root()]);
}

LeafSet threaten(const GameTree& tree, const LeafSet& a, const LeafSet& b) {
  if (tree.players() < 2) throw InvalidArgument("threaten needs two players");
  if (b.empty()) return {};
  double worst = tree.utility(b.front(), 1);
  for (NodeId y : b) worst = std::min(worst, tree.utility(y, 1));
  LeafSet out;
  for (NodeId x : a) {
    if (tree.utility(x, 1) > worst) out.push_back(x);
  }
  return out;
}

GameTree binarize(const GameTree& tree) {
  GameTree out(tree.players());
  std::vector<NodeId> map(tree.size(), -1);
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree.is_leaf(id)) {
      const auto u = tree.utilities(id);
      map[id] = out.add_leaf(std::vector<double>(u.begin(), u.end()),
                             tree.origin(id));
      continue;
    }
    const auto ch = tree.children(id);
    NodeId acc = out.add_node(tree.owner(id), {map[ch[0]], map[ch[1]]});
    for (std::size_t t = 2; t < ch.size(); ++t) {
      acc = out.add_node(tree.owner(id), {acc, map[ch[t]]});
    }
    map[id] = acc;
  }
  out.set_root(map[tree.root()]);
  return out;
}

LeafSet inducible_region(const GameTree& tree) {
  require_two_players(tree);
  InducibleSolver solver(tree);
  return solver.region(tree.root());
}

Solution two_contract_spe(const GameTree& tree) {
  const LeafSet region = inducible_region(tree);
  NodeId chosen = -1;
  for (NodeId leaf : region) {
    if (chosen < 0 || prefers(tree, 0, leaf, chosen)) chosen = leaf;
  }
  return solution_for(tree, chosen);
}

void ContractOrder::validate(int player_count) const {
  if (static_cast<int>(players.size()) > player_count) {
    throw InvalidArgument("more contracts than players");
  }
  std::vector<bool> seen(static_cast<std::size_t>(player_count), false);
  for (int p : players) {
    if (p < 0 || p >= player_count) {
      throw InvalidArgument("contract player " + std::to_string(p + 1) +
                            " out of range");
    }
    if (seen[p]) {
      throw InvalidArgument("contract players must be distinct");
    }
    seen[p] = true;
  }
}

std::uint64_t commitment_count(const GameTree& tree, int player) {
  if (player < 0 || player >= tree.players()) {
    throw InvalidArgument("player out of range");
  }
  return variant_counts(tree, player)[tree.root()];
}

GameTree expand_contracts(const GameTree& tree, const ContractOrder& order,
                          const ExpansionBudget& budget) {
  order.validate(tree.players());
  GameTree current = tree;
  for (auto it = order.players.rbegin(); it != order.players.rend(); ++it) {
    current = expand_one(current, *it, budget);
  }
  return current;
}

bool game_equivalent(const GameTree& a, const GameTree& b) {
  if (a.players() != b.players()) {
    throw InvalidArgument("games have different player counts");
  }
  return spe(a).utilities == spe(b).utilities;
}

Solution contract_spe(const GameTree& tree, const ContractOrder& order,
                      const ExpansionBudget& budget) {
  order.validate(tree.players());
  if (tree.players() == 2 && order.players.size() == 2) {
    if (order.players[0] == 0) {
      Solution s = two_contract_spe(tree);
      s.leaf = tree.origin(s.leaf);
      return s;
    }
    Solution s = two_contract_spe(swap_roles(tree));
    std::swap(s.utilities[0], s.utilities[1]);
    s.leaf = tree.origin(s.leaf);
    return s;
  }
  const GameTree expanded = expand_contracts(tree, order, budget);
  Solution s = spe(expanded);
  s.leaf = expanded.origin(s.leaf);
  return s;
}

bool side_contract_resilient(const GameTree& tree, int k,
                             const ExpansionBudget& budget) {
  if (k < 0 || k > tree.players()) {
    throw InvalidArgument("k must lie in [0, players]");
  }
  const std::vector<double> base = spe(tree).utilities;
  // All injective lists of length k, in lexicographic order.
  std::vector<int> list;
  std::vector<bool> used(static_cast<std::size_t>(tree.players()), false);
  bool resilient = true;
  auto visit = [&](auto&& self) -> void {
    if (!resilient) return;
    if (static_cast<int>(list.size()) == k) {
      if (contract_spe(tree, ContractOrder{list}, budget).utilities != base) {
        resilient = false;
      }
      return;
    }
    for (int p = 0; p < tree.players(); ++p) {
      if (used[p]) continue;
      used[p] = true;
      list.push_back(p);
      self(self);
      list.pop_back();
      used[p] = false;
    }
  };
  visit(visit);
  return resilient;
}

}  // namespace stackelsim::games
