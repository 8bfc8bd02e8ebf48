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

#include "stackelsim/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stackelsim/error.hpp"

namespace stackelsim::attack {
namespace {

using mech::MechanismKind;

void check_sizes(const ValuationProfile& valuations,
                 const AuctionConfig& config) {
  config.validate();
  if (valuations.n() != config.n) {
    throw InvalidArgument("valuation count " + std::to_string(valuations.n()) +
                          " does not match n=" + std::to_string(config.n));
  }
}

void check_agent(int j, int n) {
  if (j < 0 || j >= n) {
    throw InvalidArgument("agent index " + std::to_string(j) +
                          " out of range for n=" + std::to_string(n));
  }
}

// v_{n-m} in 1-based notation: the highest valuation that loses in the
// no-contract equilibrium.
double marginal_loser(const ValuationProfile& valuations, int m) {
  return valuations[static_cast<std::size_t>(valuations.n() - m - 1)];
}

double lottery_odds(int n, int m, int k) {
  return static_cast<double>(m - k) / (n - k);
}

}  // namespace

bool AttackPlan::contains(int agent) const {
  return std::binary_search(coalition.begin(), coalition.end(), agent);
}

void AttackPlan::validate(int n, int m) const {
  check_agent(leading, n);
  if (k() < 1 || k() >= m) {
    throw InvalidArgument("coalition size k=" + std::to_string(k()) +
                          " must satisfy 1 <= k < m=" + std::to_string(m));
  }
  if (!std::is_sorted(coalition.begin(), coalition.end()) ||
      std::adjacent_find(coalition.begin(), coalition.end()) !=
          coalition.end()) {
    throw InvalidArgument("coalition must be strictly ascending");
  }
  for (int c : coalition) check_agent(c, n);
  if (!contains(leading)) {
    throw InvalidArgument("the leading agent must be in the coalition");
  }
  if (static_cast<int>(contract_order.size()) != n) {
    throw InvalidArgument("contract order must list all n agents");
  }
  std::vector<int> sorted = contract_order;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i) {
    if (sorted[i] != i) {
      throw InvalidArgument("contract order is not a permutation");
    }
  }
  if (contract_order.front() != leading) {
    throw InvalidArgument("contract order must start with the leader");
  }
}

Amount contract_action(int u, const AttackPlan& plan, bool deviation_observed,
                       const ValuationProfile& valuations,
                       const AuctionConfig& config) {
  check_sizes(valuations, config);
  plan.validate(config.n, config.m);
  if (u < 1 || u > config.n) {
    throw InvalidArgument("contract index u=" + std::to_string(u) +
                          " out of range [1, " + std::to_string(config.n) +
                          "]");
  }
  if (u == config.n) return Amount::quanta(1.0);
  const int agent = plan.contract_order[static_cast<std::size_t>(u - 1)];
  if (deviation_observed) {
    const Amount punish(marginal_loser(valuations, config.m), 1.0);
    if (valuations[agent] > punish.value(config.eps)) return punish;
    return Amount();
  }
  return Amount::quanta(plan.contains(agent) ? 2.0 : 1.0);
}

SufficientCondition sufficient_condition(const ValuationProfile& valuations,
                                         const AuctionConfig& config, int k) {
  check_sizes(valuations, config);
  const int n = config.n;
  const int m = config.m;
  if (k < 1 || k >= m) {
    throw InvalidArgument("coalition size k=" + std::to_string(k) +
                          " must satisfy 1 <= k < m=" + std::to_string(m));
  }
  const double top = valuations[static_cast<std::size_t>(n - k)];
  const double denom = marginal_loser(valuations, m);
  if (!(config.base_fee < top)) {
    throw InvalidArgument("base fee must be below v_{n-k+1}");
  }
  if (!(denom > 0.0)) throw InvalidArgument("v_{n-m} must be positive");
  SufficientCondition out;
  out.lhs = (top - config.base_fee) / denom;
  out.rhs = static_cast<double>(n - k) / (n - m);
  out.margin = out.rhs - out.lhs;
  out.holds = out.lhs < out.rhs;
  return out;
}

Amount comply_utility(int j, const AttackPlan& plan,
                      const ValuationProfile& valuations,
                      const AuctionConfig& config) {
  check_sizes(valuations, config);
  check_agent(j, config.n);
  const Amount value(valuations[j] - config.base_fee);
  if (config.kind == MechanismKind::kSecondPrice) {
    // Every winner pays the highest losing bid, one quantum.
    const Amount surplus = value - Amount::quanta(1.0);
    if (plan.contains(j)) return surplus;
    return surplus * lottery_odds(config.n, config.m, plan.k());
  }
  if (plan.contains(j)) return value - Amount::quanta(2.0);
  return (value - Amount::quanta(1.0)) *
         lottery_odds(config.n, config.m, plan.k());
}

Amount defy_utility(int j, const ValuationProfile& valuations,
                    const AuctionConfig& config) {
  check_sizes(valuations, config);
  check_agent(j, config.n);
  if (j < config.n - config.m) return Amount();
  const double clearing = marginal_loser(valuations, config.m);
  Amount gain = config.kind == MechanismKind::kSecondPrice
                    ? Amount(valuations[j] - clearing)
                    : Amount(valuations[j] - clearing - config.base_fee, -2.0);
  if (!(gain.value(config.eps) > 0.0)) return Amount();
  return gain;
}

ComplianceReport exact_feasibility(const AttackPlan& plan,
                                   const ValuationProfile& valuations,
                                   const AuctionConfig& config) {
  check_sizes(valuations, config);
  plan.validate(config.n, config.m);
  ComplianceReport report;
  report.feasible = true;
  double smallest = 0.0;
  for (int j = 0; j < config.n; ++j) {
    AgentCompliance a;
    a.agent = j;
    a.in_coalition = plan.contains(j);
    a.comply = comply_utility(j, plan, valuations, config);
    a.defy = defy_utility(j, valuations, config);
    a.margin = a.comply - a.defy;
    a.margin_value = a.margin.value(config.eps);
    a.complies = a.margin_value > 0.0;
    report.feasible = report.feasible && a.complies;
    if (report.binding_agent < 0 || a.margin_value < smallest) {
      report.binding_agent = j;
      smallest = a.margin_value;
    }
    report.agents.push_back(a);
  }
  return report;
}

AttackPlan coalition_select(const ValuationProfile& valuations,
                            const AuctionConfig& config, int leading, int k) {
  check_sizes(valuations, config);
  check_agent(leading, config.n);
  if (k < 1 || k >= config.m) {
    throw InvalidArgument("coalition size k=" + std::to_string(k) +
                          " must satisfy 1 <= k < m=" +
                          std::to_string(config.m));
  }
  AttackPlan plan;
  plan.leading = leading;
  plan.contract_order.push_back(leading);
  for (int i = config.n - 1; i >= 0; --i) {
    if (i != leading) plan.contract_order.push_back(i);
  }
  plan.coalition.assign(plan.contract_order.begin(),
                        plan.contract_order.begin() + k);
  std::sort(plan.coalition.begin(), plan.coalition.end());
  return plan;
}

BidProfile compliant_bids(const AttackPlan& plan, int n) {
  BidProfile bids;
  bids.tips.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    bids.tips.push_back(Amount::quanta(plan.contains(i) ? 2.0 : 1.0));
  }
  return bids;
}

AllocationOutcome attacked_outcome(const AttackPlan& plan,
                                   const ValuationProfile& valuations,
                                   const AuctionConfig& config,
                                   std::uint64_t seed) {
  const ComplianceReport report = exact_feasibility(plan, valuations, config);
  if (!report.feasible) {
    throw InfeasiblePlan("agent " + std::to_string(report.binding_agent + 1) +
                         " prefers to defy the attack contract");
  }
  AllocationOutcome out =
      mech::allocate(config, valuations, compliant_bids(plan, config.n), seed);
  for (int c : plan.coalition) {
    if (out.win_probability[c] != 1.0) {
      throw Error("coalition member " + std::to_string(c + 1) +
                  " is not included with certainty");
    }
  }
  return out;
}

RiskAversionReport risk_aversion_necessity(
    const std::function<double(double)>& utility, std::span<const double> grid,
    const ValuationProfile& valuations, const AttackPlan& plan,
    const AuctionConfig& config) {
  check_sizes(valuations, config);
  plan.validate(config.n, config.m);
  if (grid.size() < 2) {
    throw InvalidArgument("concavity grid needs at least two points");
  }
  const double u0 = utility(0.0);
  double scale = std::abs(u0);
  for (double x : grid) scale = std::max(scale, std::abs(utility(x)));
  const double tol = 1e-12 * std::max(scale, 1.0);
  if (std::abs(u0) > tol) throw InvalidArgument("utility must satisfy U(0) = 0");
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = a + 1; b < grid.size(); ++b) {
      const double mid = utility(0.5 * (grid[a] + grid[b]));
      const double chord = 0.5 * (utility(grid[a]) + utility(grid[b]));
      if (mid < chord - tol) {
        throw InvalidArgument("utility is not concave on the grid");
      }
    }
  }

  const double p = lottery_odds(config.n, config.m, plan.k());
  const double clearing = marginal_loser(valuations, config.m);
  RiskAversionReport report;
  report.all_hold = true;
  for (int j = 0; j < config.n; ++j) {
    if (plan.contains(j)) continue;
    RiskAverseAgent a;
    a.agent = j;
    const double sure = std::max(0.0, valuations[j] - clearing - config.base_fee);
    a.certain = utility(sure);
    a.lottery = p * utility(valuations[j] - config.base_fee);
    a.holds = a.certain < a.lottery;
    report.all_hold = report.all_hold && a.holds;
    report.agents.push_back(a);
  }
  return report;
}

}  // namespace stackelsim::attack
