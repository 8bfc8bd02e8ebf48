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

// Multi-unit auctions with m identical items: first-price, second-price
// ((n-m)-th price) and the EIP-1559 transaction fee mechanism.
//
// Agent i is the agent with the (i+1)-th lowest valuation, i.e. index i of a
// ValuationProfile.

#ifndef STACKELSIM_MECHANISMS_HPP_
#define STACKELSIM_MECHANISMS_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "stackelsim/amount.hpp"
#include "stackelsim/stats.hpp"

namespace stackelsim::mech {

using stats::ValuationProfile;

enum class MechanismKind { kFirstPrice, kSecondPrice, kEip1559 };

std::string_view to_string(MechanismKind kind);
// Accepts "first-price", "second-price" and "eip1559" (also "eip-1559").
MechanismKind parse_mechanism_kind(std::string_view text);

struct AuctionConfig {
  int n = 0;               // agents
  int m = 0;               // items (block capacity)
  double base_fee = 0.0;   // burned per included transaction; EIP-1559 only
  double eps = kDefaultQuantum;
  MechanismKind kind = MechanismKind::kFirstPrice;

  // alpha with n = (1 + alpha) m.
  double congestion() const { return static_cast<double>(n) / m - 1.0; }

  // Throws InvalidArgument unless n > m >= 1, eps > 0, B >= 0, and B == 0
  // for the first- and second-price kinds.
  void validate() const;
};

// Per-agent tips. For first- and second-price auctions the tip is the whole
// bid; under EIP-1559 the agent deposits B + tip.
struct BidProfile {
  std::vector<Amount> tips;
};

struct AllocationOutcome {
  std::vector<int> winners;              // ascending agent indices, |T| = m
  std::vector<Amount> payments;          // realized, per agent
  std::vector<Amount> utilities;         // realized, per agent
  std::vector<double> win_probability;   // over the tie-breaking lottery
  std::vector<Amount> expected_utilities;
  Amount auctioneer_revenue;             // tips (or prices) collected
  Amount burned;                         // m * B under EIP-1559
  Amount clearing_price;                 // second-price only
};

// Selects the m highest tips. Ties on the marginal tip value are broken by a
// uniform draw among the tied agents, which is the same law as a uniform
// choice over all tip-maximizing sets.
AllocationOutcome allocate(const AuctionConfig& config,
                           const ValuationProfile& valuations,
                           const BidProfile& bids, std::uint64_t seed);

// b_i = v_{n-m} + eps for the top m agents, 0 for the rest.
BidProfile first_price_equilibrium_bids(const ValuationProfile& valuations,
                                        int m);

// allocate() for a SecondPrice config: winners pay the highest bid among the
// realized losers.
AllocationOutcome second_price_outcome(const AuctionConfig& config,
                                       const ValuationProfile& valuations,
                                       const BidProfile& bids,
                                       std::uint64_t seed);

// Bids of the no-contract equilibrium: the first-price profile above (tips
// reduced by B under EIP-1559), or truthful bids for second-price.
BidProfile equilibrium_bids(const AuctionConfig& config,
                            const ValuationProfile& valuations);

AllocationOutcome equilibrium_outcome(const AuctionConfig& config,
                                      const ValuationProfile& valuations,
                                      std::uint64_t seed);

// Base-fee update after a block. The network controller is not modeled, so
// the fee is returned unchanged.
double next_base_fee(const AuctionConfig& config, int included);

}  // namespace stackelsim::mech

#endif  // STACKELSIM_MECHANISMS_HPP_
