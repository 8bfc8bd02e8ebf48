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

// The commitment attack on multi-unit auctions.
//
// Every agent deploys the contract A^C_u in a fixed order i_1, ..., i_n. As
// long as all later contracts are the same attack contract, coalition members
// (the set C, which contains the leader i_1) tip 2 quanta and everybody else
// tips 1 quantum; the block is then filled with C plus a uniform lottery over
// the rest. If any later agent deviates, all earlier contracts revert to the
// first-price punishment bid v_{n-m} + eps.
//
// Agent indices are 0-based positions in the sorted ValuationProfile.

#ifndef STACKELSIM_ATTACK_HPP_
#define STACKELSIM_ATTACK_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stackelsim/amount.hpp"
#include "stackelsim/mechanisms.hpp"

namespace stackelsim::attack {

using mech::AllocationOutcome;
using mech::AuctionConfig;
using mech::BidProfile;
using stats::ValuationProfile;

struct AttackPlan {
  int leading = 0;
  std::vector<int> coalition;       // ascending, contains `leading`
  std::vector<int> contract_order;  // permutation of 0..n-1, leader first

  int k() const { return static_cast<int>(coalition.size()); }
  bool contains(int agent) const;

  // Throws InvalidArgument unless the leader is in C, 1 <= k < m and the
  // contract order is a permutation starting with the leader.
  void validate(int n, int m) const;
};

// Tip played by the u-th contract (1-based, 1 <= u <= n). The boolean stands
// for "some later contract is not the attack contract".
Amount contract_action(int u, const AttackPlan& plan, bool deviation_observed,
                       const ValuationProfile& valuations,
                       const AuctionConfig& config);

struct SufficientCondition {
  bool holds = false;
  double lhs = 0.0;     // (v_{n-k+1} - B) / v_{n-m}
  double rhs = 0.0;     // (n-k) / (n-m)
  double margin = 0.0;  // rhs - lhs; holds iff margin > 0
};

// The valuation bound under which every leader's attack succeeds:
// (v_{n-k+1} - B) / v_{n-m} < (n-k) / (n-m), with 1-based v.
SufficientCondition sufficient_condition(const ValuationProfile& valuations,
                                         const AuctionConfig& config, int k);

// Expected utility of agent j when everybody plays the attack contract.
Amount comply_utility(int j, const AttackPlan& plan,
                      const ValuationProfile& valuations,
                      const AuctionConfig& config);

// Best utility of agent j after defecting into the first-price punishment:
// outbid v_{n-m} + eps if that is profitable, otherwise 0.
Amount defy_utility(int j, const ValuationProfile& valuations,
                    const AuctionConfig& config);

struct AgentCompliance {
  int agent = 0;
  bool in_coalition = false;
  Amount comply;
  Amount defy;
  Amount margin;         // comply - defy
  double margin_value = 0.0;  // at the configured quantum
  bool complies = false;      // margin_value > 0; indifference defies
};

struct ComplianceReport {
  std::vector<AgentCompliance> agents;
  bool feasible = false;
  int binding_agent = -1;  // smallest margin, lowest index on ties
};

ComplianceReport exact_feasibility(const AttackPlan& plan,
                                   const ValuationProfile& valuations,
                                   const AuctionConfig& config);

// C = {leading} plus the k-1 highest-valued other agents; the contract order
// is the leader followed by everybody else by descending valuation.
AttackPlan coalition_select(const ValuationProfile& valuations,
                            const AuctionConfig& config, int leading, int k);

// 2 quanta for coalition members and 1 quantum for everybody else.
BidProfile compliant_bids(const AttackPlan& plan, int n);

// The allocation when everybody complies. Throws InfeasiblePlan unless
// exact_feasibility(plan) is feasible.
AllocationOutcome attacked_outcome(const AttackPlan& plan,
                                   const ValuationProfile& valuations,
                                   const AuctionConfig& config,
                                   std::uint64_t seed);

struct RiskAverseAgent {
  int agent = 0;
  double certain = 0.0;  // U(max(0, v_j - v_{n-m} - B))
  double lottery = 0.0;  // (m-k)/(n-k) * U(v_j - B)
  bool holds = false;    // certain < lottery
};

struct RiskAversionReport {
  std::vector<RiskAverseAgent> agents;  // agents outside C only
  bool all_hold = false;
};

// Compliance condition for agents with a concave utility U over money,
// evaluated without quanta. U is checked for concavity by midpoint tests on
// every pair of grid points and for U(0) = 0; InvalidArgument otherwise. A
// true verdict is necessary for the attack, not sufficient.
RiskAversionReport risk_aversion_necessity(
    const std::function<double(double)>& utility, std::span<const double> grid,
    const ValuationProfile& valuations, const AttackPlan& plan,
    const AuctionConfig& config);

}  // namespace stackelsim::attack

#endif  // STACKELSIM_ATTACK_HPP_
