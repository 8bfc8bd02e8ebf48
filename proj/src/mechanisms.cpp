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

#include "stackelsim/mechanisms.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <string>

#include "stackelsim/error.hpp"
#include "stackelsim/rng.hpp"

namespace stackelsim::mech {

std::string_view to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kFirstPrice:
      return "first-price";
    case MechanismKind::kSecondPrice:
      return "second-price";
    case MechanismKind::kEip1559:
      return "eip1559";
  }
  return "unknown";
}

MechanismKind parse_mechanism_kind(std::string_view text) {
  if (text == "first-price") return MechanismKind::kFirstPrice;
  if (text == "second-price") return MechanismKind::kSecondPrice;
  if (text == "eip1559" || text == "eip-1559") return MechanismKind::kEip1559;
  throw InvalidArgument("unknown mechanism kind '" + std::string(text) + "'");
}

void AuctionConfig::validate() const {
  if (m < 1) throw InvalidArgument("need at least one item (m >= 1)");
  if (n <= m) {
    throw InvalidArgument("need more agents than items (n=" +
                          std::to_string(n) + ", m=" + std::to_string(m) + ")");
  }
  if (!(eps > 0.0)) throw InvalidArgument("currency quantum must be positive");
  if (!(base_fee >= 0.0)) throw InvalidArgument("base fee must be >= 0");
  if (kind != MechanismKind::kEip1559 && base_fee != 0.0) {
    throw InvalidArgument("a base fee is only defined for eip1559");
  }
}

AllocationOutcome allocate(const AuctionConfig& config,
                           const ValuationProfile& valuations,
                           const BidProfile& bids, std::uint64_t seed) {
  config.validate();
  const int n = config.n;
  const int m = config.m;
  if (valuations.n() != n) {
    throw InvalidArgument("valuation count " + std::to_string(valuations.n()) +
                          " does not match n=" + std::to_string(n));
  }
  if (static_cast<int>(bids.tips.size()) != n) {
    throw InvalidArgument("bid count " + std::to_string(bids.tips.size()) +
                          " does not match n=" + std::to_string(n));
  }
  std::vector<double> tip(n);
  for (int i = 0; i < n; ++i) {
    tip[i] = bids.tips[i].value(config.eps);
    if (!(tip[i] >= 0.0)) {
      throw InvalidArgument("tips must be non-negative (agent " +
                            std::to_string(i) + ")");
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return tip[a] > tip[b]; });
  const double marginal = tip[order[m - 1]];

  std::vector<int> above;
  std::vector<int> tied;
  int highest_below = -1;
  for (int i : order) {
    if (tip[i] > marginal) {
      above.push_back(i);
    } else if (tip[i] == marginal) {
      tied.push_back(i);
    } else if (highest_below < 0) {
      highest_below = i;
    }
  }
  const int slots = m - static_cast<int>(above.size());

  // Tied agents are ordered by index before the draw so the result depends
  // only on the seed and the bid values.
  std::sort(tied.begin(), tied.end());
  std::vector<int> drawn = tied;
  Rng rng(seed);
  rng.shuffle(std::span<int>(drawn));

  AllocationOutcome out;
  out.winners = above;
  out.winners.insert(out.winners.end(), drawn.begin(), drawn.begin() + slots);
  std::sort(out.winners.begin(), out.winners.end());

  out.win_probability.assign(n, 0.0);
  for (int i : above) out.win_probability[i] = 1.0;
  for (int i : tied) {
    out.win_probability[i] = static_cast<double>(slots) / tied.size();
  }

  // Price a winner would pay, per agent.
  std::vector<Amount> price_if_win(n);
  switch (config.kind) {
    case MechanismKind::kFirstPrice:
      for (int i = 0; i < n; ++i) price_if_win[i] = bids.tips[i];
      break;
    case MechanismKind::kEip1559:
      for (int i = 0; i < n; ++i) {
        price_if_win[i] = Amount(config.base_fee) + bids.tips[i];
      }
      break;
    case MechanismKind::kSecondPrice: {
      // Highest realized losing bid. If some tied agent loses it sets the
      // price; otherwise the best bid strictly below the margin does.
      const int setter = static_cast<int>(tied.size()) > slots
                             ? drawn[static_cast<std::size_t>(slots)]
                             : highest_below;
      out.clearing_price = bids.tips[setter];
      for (int i = 0; i < n; ++i) price_if_win[i] = out.clearing_price;
      break;
    }
  }

  out.payments.assign(n, Amount());
  out.utilities.assign(n, Amount());
  out.expected_utilities.assign(n, Amount());
  for (int i = 0; i < n; ++i) {
    const Amount surplus = Amount(valuations[i]) - price_if_win[i];
    out.expected_utilities[i] = surplus * out.win_probability[i];
  }
  for (int i : out.winners) {
    out.payments[i] = price_if_win[i];
    out.utilities[i] = Amount(valuations[i]) - price_if_win[i];
    if (config.kind == MechanismKind::kSecondPrice) {
      out.auctioneer_revenue += price_if_win[i];
    } else {
      out.auctioneer_revenue += bids.tips[i];
    }
  }
  if (config.kind == MechanismKind::kEip1559) {
    out.burned = Amount(config.base_fee * m);
  }
  return out;
}

BidProfile first_price_equilibrium_bids(const ValuationProfile& valuations,
                                        int m) {
  const int n = valuations.n();
  if (m < 1 || n <= m) {
    throw InvalidArgument("equilibrium bids need n > m >= 1");
  }
  BidProfile bids;
  bids.tips.assign(n, Amount());
  const Amount outbid(valuations[n - m - 1], 1.0);
  for (int i = n - m; i < n; ++i) bids.tips[i] = outbid;
  return bids;
}

AllocationOutcome second_price_outcome(const AuctionConfig& config,
                                       const ValuationProfile& valuations,
                                       const BidProfile& bids,
                                       std::uint64_t seed) {
  if (config.kind != MechanismKind::kSecondPrice) {
    throw InvalidArgument("second_price_outcome needs a second-price config");
  }
  return allocate(config, valuations, bids, seed);
}

BidProfile equilibrium_bids(const AuctionConfig& config,
                            const ValuationProfile& valuations) {
  config.validate();
  if (config.kind == MechanismKind::kSecondPrice) {
    BidProfile truthful;
    for (double v : valuations.values()) truthful.tips.emplace_back(v);
    return truthful;
  }
  BidProfile bids = first_price_equilibrium_bids(valuations, config.m);
  if (config.kind == MechanismKind::kEip1559) {
    for (auto& tip : bids.tips) {
      if (tip.value(config.eps) > 0.0) tip -= Amount(config.base_fee);
    }
  }
  return bids;
}

AllocationOutcome equilibrium_outcome(const AuctionConfig& config,
                                      const ValuationProfile& valuations,
                                      std::uint64_t seed) {
  return allocate(config, valuations, equilibrium_bids(config, valuations),
                  seed);
}

double next_base_fee(const AuctionConfig& config, int /*included*/) {
  return config.base_fee;
}

}  // namespace stackelsim::mech
