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
#include <vector>

#include <gtest/gtest.h>

#include "stackelsim/error.hpp"
#include "stackelsim/rng.hpp"

namespace stackelsim::attack {
namespace {

using mech::MechanismKind;

constexpr double kEps = 1e-12;

AuctionConfig make_config(int n, int m, MechanismKind kind = MechanismKind::kFirstPrice,
                          double base_fee = 0.0) {
  AuctionConfig c;
  c.n = n;
  c.m = m;
  c.kind = kind;
  c.base_fee = base_fee;
  c.eps = kEps;
  return c;
}

ValuationProfile values(std::vector<double> v) {
  return ValuationProfile::from_values(std::move(v));
}

TEST(AttackPlan, Validation) {
  AttackPlan p{2, {2}, {2, 1, 0}};
  EXPECT_NO_THROW(p.validate(3, 2));
  EXPECT_TRUE(p.contains(2));
  EXPECT_FALSE(p.contains(0));
  EXPECT_THROW((AttackPlan{2, {1}, {2, 1, 0}}.validate(3, 2)), InvalidArgument);
  EXPECT_THROW((AttackPlan{2, {1, 2}, {2, 1, 0}}.validate(3, 2)), InvalidArgument);
  EXPECT_THROW((AttackPlan{2, {2}, {1, 2, 0}}.validate(3, 2)), InvalidArgument);
  EXPECT_THROW((AttackPlan{2, {2}, {2, 2, 0}}.validate(3, 2)), InvalidArgument);
  EXPECT_THROW((AttackPlan{2, {2}, {2, 1}}.validate(3, 2)), InvalidArgument);
}

TEST(ContractAction, Clauses) {
  const auto v = values({1, 1.9, 10, 12});
  const auto cfg = make_config(4, 3);
  // Leader is agent 4 (index 3); C = {4, 3}; contracts in descending order.
  const auto plan = coalition_select(v, cfg, 3, 2);
  EXPECT_EQ(plan.contract_order, (std::vector<int>{3, 2, 1, 0}));
  EXPECT_EQ(contract_action(4, plan, false, v, cfg), Amount::quanta(1));
  EXPECT_EQ(contract_action(4, plan, true, v, cfg), Amount::quanta(1));
  EXPECT_EQ(contract_action(1, plan, false, v, cfg), Amount::quanta(2));
  EXPECT_EQ(contract_action(2, plan, false, v, cfg), Amount::quanta(2));
  EXPECT_EQ(contract_action(3, plan, false, v, cfg), Amount::quanta(1));
  // v_{n-m} = 1: agents above 1 + eps punish, agent 1.9 too, the marginal one not.
  EXPECT_EQ(contract_action(1, plan, true, v, cfg), Amount(1.0, 1.0));
  EXPECT_EQ(contract_action(3, plan, true, v, cfg), Amount(1.0, 1.0));
  const auto low_first = coalition_select(v, cfg, 0, 1);
  EXPECT_EQ(contract_action(1, low_first, true, v, cfg), Amount());
  EXPECT_THROW(contract_action(0, plan, false, v, cfg), InvalidArgument);
  EXPECT_THROW(contract_action(5, plan, false, v, cfg), InvalidArgument);
}

TEST(SufficientCondition, Examples) {
  const auto cfg = make_config(3, 2);
  {
    const auto s = sufficient_condition(values({1, 1.5, 1.8}), cfg, 1);
    EXPECT_DOUBLE_EQ(s.lhs, 1.8);
    EXPECT_DOUBLE_EQ(s.rhs, 2.0);
    EXPECT_TRUE(s.holds);
    EXPECT_NEAR(s.margin, 0.2, 1e-12);
  }
  {
    const auto s = sufficient_condition(values({1, 2, 3}), cfg, 1);
    EXPECT_DOUBLE_EQ(s.lhs, 3.0);
    EXPECT_FALSE(s.holds);
  }
  {
    // B = v_{n-k+1} - v_{n-m} (n-k)/(n-m): lhs and rhs coincide.
    const auto v = values({1, 2, 4});
    const auto s = sufficient_condition(v, make_config(3, 2, MechanismKind::kEip1559, 2.0), 1);
    EXPECT_DOUBLE_EQ(s.margin, 0.0);
    EXPECT_FALSE(s.holds);
  }
  EXPECT_THROW(sufficient_condition(values({1, 2, 3}), cfg, 2), InvalidArgument);
  EXPECT_THROW(sufficient_condition(values({1, 2, 3}), cfg, 0), InvalidArgument);
}

TEST(ComplyDefy, WarmUpExpectations) {
  const auto v = values({0.25, 0.5, 0.75});
  const auto cfg = make_config(3, 2, MechanismKind::kEip1559);
  const auto plan = coalition_select(v, cfg, 2, 1);
  EXPECT_EQ(comply_utility(0, plan, v, cfg), Amount(0.125, -0.5));
  EXPECT_EQ(comply_utility(1, plan, v, cfg), Amount(0.25, -0.5));
  EXPECT_EQ(comply_utility(2, plan, v, cfg), Amount(0.75, -2.0));
  // Agent 2 can outbid the reverted clearing bid of agent 1, agent 1 cannot.
  EXPECT_EQ(defy_utility(1, v, cfg), Amount(0.25, -2.0));
  EXPECT_EQ(defy_utility(0, v, cfg), Amount());
  const auto report = exact_feasibility(plan, v, cfg);
  EXPECT_TRUE(report.feasible);
  EXPECT_EQ(report.binding_agent, 1);
  EXPECT_EQ(report.agents[1].margin, Amount::quanta(1.5));
}

TEST(ComplyDefy, BreakEvenCoalitionMemberAndDefyExamples) {
  const double b = 0.5;
  const auto cfg = make_config(3, 2, MechanismKind::kEip1559, b);
  const auto v = values({1, 2, b + 2 * kEps + 3.0});
  const auto plan = coalition_select(v, cfg, 2, 1);
  const Amount c = comply_utility(2, plan, v, cfg);
  EXPECT_NEAR(c.value(kEps), 3.0, 1e-12);
  // A coalition member at exactly B + 2 eps breaks even.
  const auto tight = values({0.1, 0.2, b + 2 * kEps});
  const auto tight_cfg = make_config(3, 2, MechanismKind::kEip1559, b);
  EXPECT_NEAR(comply_utility(2, coalition_select(tight, tight_cfg, 2, 1), tight, tight_cfg)
                  .value(kEps),
              0.0, 1e-15);

  const auto plain = make_config(3, 2);
  EXPECT_EQ(defy_utility(2, values({1, 2, 3}), plain), Amount(2.0, -2.0));
  EXPECT_EQ(defy_utility(0, values({1, 2, 3}), plain), Amount());
}

TEST(ExactFeasibility, Examples) {
  const auto cfg = make_config(3, 2);
  {
    const auto v = values({1, 1.9, 10});
    const auto report = exact_feasibility(coalition_select(v, cfg, 2, 1), v, cfg);
    EXPECT_TRUE(report.feasible);
    EXPECT_EQ(report.binding_agent, 1);
    EXPECT_DOUBLE_EQ(report.agents[1].comply.base, 0.95);
    EXPECT_DOUBLE_EQ(report.agents[1].comply.eps, -0.5);
    EXPECT_NEAR(report.agents[1].defy.base, 0.9, 1e-15);
    EXPECT_DOUBLE_EQ(report.agents[1].defy.eps, -2.0);
  }
  {
    const auto v = values({1, 2.5, 10});
    const auto report = exact_feasibility(coalition_select(v, cfg, 2, 1), v, cfg);
    EXPECT_FALSE(report.feasible);
    EXPECT_EQ(report.binding_agent, 1);
    EXPECT_FALSE(report.agents[1].complies);
  }
  {
    // Agent 2 leading needs v_1 + eps/2 > v_3 / 2.
    const auto v = values({1, 2, 2.5});
    const auto report = exact_feasibility(coalition_select(v, cfg, 1, 1), v, cfg);
    EXPECT_FALSE(report.feasible);
    EXPECT_EQ(report.binding_agent, 2);
    const auto ok = values({1, 1.5, 1.9});
    EXPECT_TRUE(exact_feasibility(coalition_select(ok, cfg, 1, 1), ok, cfg).feasible);
  }
}

TEST(CoalitionSelect, Construction) {
  const auto v = values({1, 2, 3, 4, 5});
  const auto cfg = make_config(5, 4);
  const auto single = coalition_select(v, cfg, 2, 1);
  EXPECT_EQ(single.coalition, std::vector<int>{2});
  EXPECT_EQ(single.contract_order, (std::vector<int>{2, 4, 3, 1, 0}));
  EXPECT_EQ(coalition_select(v, cfg, 0, 3).coalition, (std::vector<int>{0, 3, 4}));
  EXPECT_EQ(coalition_select(v, cfg, 4, 2).coalition, (std::vector<int>{3, 4}));
  EXPECT_THROW(coalition_select(v, cfg, 0, 4), InvalidArgument);
  EXPECT_THROW(coalition_select(v, cfg, 0, 0), InvalidArgument);
  EXPECT_THROW(coalition_select(v, cfg, 5, 1), InvalidArgument);
}

TEST(AttackedOutcome, RevenueCollapseInWarmUp) {
  const auto v = values({0.25, 0.5, 0.75});
  const auto cfg = make_config(3, 2, MechanismKind::kEip1559);
  const auto plan = coalition_select(v, cfg, 2, 1);
  const auto out = attacked_outcome(plan, v, cfg, 0);
  EXPECT_EQ(out.auctioneer_revenue, Amount::quanta(3));
  const auto honest = mech::equilibrium_outcome(cfg, v, 0);
  const Amount loss = honest.auctioneer_revenue - out.auctioneer_revenue;
  EXPECT_EQ(loss, Amount(0.5, -1.0));  // 2 v_1 - eps
}

TEST(AttackedOutcome, BaseFeeLoss) {
  const auto v = values({0.25, 0.5, 0.75});
  const double b = 0.1;
  const auto cfg = make_config(3, 2, MechanismKind::kEip1559, b);
  const auto plan = coalition_select(v, cfg, 2, 1);
  const auto out = attacked_outcome(plan, v, cfg, 0);
  const auto honest = mech::equilibrium_outcome(cfg, v, 0);
  const Amount loss = honest.auctioneer_revenue - out.auctioneer_revenue;
  EXPECT_NEAR(loss.base, 2 * (0.25 - b), 1e-15);
  EXPECT_DOUBLE_EQ(loss.eps, -1.0);
  // Every included agent pays the base fee.
  for (int w : out.winners) EXPECT_NEAR(out.payments[w].base, b, 1e-15);
}

TEST(AttackedOutcome, InfeasiblePlanThrows) {
  const auto v = values({1, 2.5, 10});
  const auto cfg = make_config(3, 2);
  EXPECT_THROW(attacked_outcome(coalition_select(v, cfg, 2, 1), v, cfg, 0), InfeasiblePlan);
}

TEST(AttackedOutcome, LargestCoalitionLeavesOneLotterySlot) {
  const auto v = values({1, 1.1, 1.2, 1.3, 1.4, 1.45});
  const auto cfg = make_config(6, 4);
  const auto plan = coalition_select(v, cfg, 5, 3);
  ASSERT_TRUE(exact_feasibility(plan, v, cfg).feasible);
  const auto out = attacked_outcome(plan, v, cfg, 4);
  int lottery_winners = 0;
  for (int w : out.winners) lottery_winners += plan.contains(w) ? 0 : 1;
  EXPECT_EQ(lottery_winners, 1);
  for (int j = 0; j < 6; ++j) {
    if (!plan.contains(j)) {
      EXPECT_DOUBLE_EQ(out.win_probability[j], 1.0 / 3.0);
    }
  }
}

struct Instance {
  ValuationProfile v;
  AuctionConfig cfg;
  int k;
};

Instance random_instance(Rng& rng, bool pareto) {
  const int m = 2 + static_cast<int>(rng.below(10));
  const int n = m + 1 + static_cast<int>(rng.below(static_cast<std::size_t>(m)));
  const int k = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(m - 1)));
  const auto dist = pareto ? stats::DistributionSpec::pareto(1.5 + 3.0 * rng.uniform01())
                           : stats::DistributionSpec::uniform();
  return {stats::sample_valuations(dist, n, rng.next()), make_config(n, m), k};
}

TEST(Properties, SufficientConditionImpliesFeasibilityForEveryLeader) {
  Rng rng(17);
  int held = 0;
  for (int t = 0; t < 10'000; ++t) {
    const auto inst = random_instance(rng, t % 2 == 1);
    if (!sufficient_condition(inst.v, inst.cfg, inst.k).holds) continue;
    ++held;
    for (int leader = 0; leader < inst.cfg.n; ++leader) {
      const auto plan = coalition_select(inst.v, inst.cfg, leader, inst.k);
      EXPECT_TRUE(exact_feasibility(plan, inst.v, inst.cfg).feasible)
          << "trial " << t << " leader " << leader;
    }
  }
  EXPECT_GT(held, 100);
}

TEST(Properties, CompliersDoBetterThanDefiersInTheAttackedOutcome) {
  Rng rng(23);
  int feasible = 0;
  for (int t = 0; t < 2000; ++t) {
    const auto inst = random_instance(rng, false);
    const auto plan = coalition_select(inst.v, inst.cfg, inst.cfg.n - 1, inst.k);
    const auto report = exact_feasibility(plan, inst.v, inst.cfg);
    if (!report.feasible) continue;
    ++feasible;
    const auto out = attacked_outcome(plan, inst.v, inst.cfg, rng.next());
    for (int j = 0; j < inst.cfg.n; ++j) {
      const double comply = out.expected_utilities[j].value(kEps);
      EXPECT_NEAR(comply, report.agents[j].comply.value(kEps), 1e-12);
      EXPECT_GT(comply, defy_utility(j, inst.v, inst.cfg).value(kEps));
    }
  }
  EXPECT_GT(feasible, 50);
}

TEST(Properties, SecondPriceVerdictsMatchFirstPrice) {
  Rng rng(31);
  for (int t = 0; t < 10'000; ++t) {
    auto inst = random_instance(rng, t % 2 == 1);
    const int leader = static_cast<int>(rng.below(static_cast<std::size_t>(inst.cfg.n)));
    const auto plan = coalition_select(inst.v, inst.cfg, leader, inst.k);
    const bool first = exact_feasibility(plan, inst.v, inst.cfg).feasible;
    auto second_cfg = inst.cfg;
    second_cfg.kind = MechanismKind::kSecondPrice;
    EXPECT_EQ(exact_feasibility(plan, inst.v, second_cfg).feasible, first) << t;
  }
}

TEST(Properties, RevenueIsMPlusKQuantaAndLeaderAlwaysWins) {
  Rng rng(41);
  int checked = 0;
  for (int t = 0; t < 2000 && checked < 300; ++t) {
    const auto inst = random_instance(rng, false);
    const auto plan = coalition_select(inst.v, inst.cfg, inst.cfg.n - 1, inst.k);
    if (!exact_feasibility(plan, inst.v, inst.cfg).feasible) continue;
    ++checked;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto out = attacked_outcome(plan, inst.v, inst.cfg, derive_seed(t, s));
      EXPECT_EQ(out.auctioneer_revenue, Amount::quanta(inst.cfg.m + inst.k));
      for (int c : plan.coalition) {
        EXPECT_TRUE(std::binary_search(out.winners.begin(), out.winners.end(), c));
      }
    }
  }
  EXPECT_GT(checked, 50);
}

std::vector<double> grid(double top, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(top * i / (points - 1));
  return g;
}

TEST(RiskAversion, IdentityMatchesRiskNeutralMargins) {
  Rng rng(53);
  const auto identity = [](double x) { return x; };
  for (int t = 0; t < 2000; ++t) {
    const auto inst = random_instance(rng, false);
    const auto plan = coalition_select(inst.v, inst.cfg, inst.cfg.n - 1, inst.k);
    const auto g = grid(inst.v[inst.cfg.n - 1], 32);
    const auto risk = risk_aversion_necessity(identity, g, inst.v, plan, inst.cfg);
    const auto exact = exact_feasibility(plan, inst.v, inst.cfg);
    for (const auto& a : risk.agents) {
      const auto& e = exact.agents[a.agent];
      if (std::abs(e.margin.base) < 1e-9) continue;
      EXPECT_EQ(a.holds, e.margin.base > 0.0) << t << " agent " << a.agent;
    }
  }
}

TEST(RiskAversion, SquareRootFavorsTheSureGain) {
  const auto v = values({1, 1.9, 10});
  const auto cfg = make_config(3, 2);
  const auto plan = coalition_select(v, cfg, 2, 1);
  ASSERT_TRUE(exact_feasibility(plan, v, cfg).feasible);
  const auto g = grid(10.0, 101);
  const auto linear =
      risk_aversion_necessity([](double x) { return x; }, g, v, plan, cfg);
  const auto concave =
      risk_aversion_necessity([](double x) { return std::sqrt(x); }, g, v, plan, cfg);
  EXPECT_TRUE(linear.all_hold);
  EXPECT_FALSE(concave.all_hold);
  ASSERT_EQ(concave.agents.size(), 2u);
  EXPECT_NEAR(concave.agents[1].certain, std::sqrt(0.9), 1e-12);
  EXPECT_NEAR(concave.agents[1].lottery, 0.5 * std::sqrt(1.9), 1e-12);
}

TEST(RiskAversion, RiskAverseComplianceImpliesRiskNeutralCompliance) {
  Rng rng(59);
  const std::vector<std::function<double(double)>> utilities = {
      [](double x) { return std::sqrt(x); },
      [](double x) { return std::log1p(x); },
      [](double x) { return 1.0 - std::exp(-2.0 * x); },
  };
  for (int t = 0; t < 3000; ++t) {
    const auto inst = random_instance(rng, t % 2 == 1);
    const auto plan = coalition_select(inst.v, inst.cfg, inst.cfg.n - 1, inst.k);
    const auto g = grid(inst.v[inst.cfg.n - 1], 16);
    const auto neutral =
        risk_aversion_necessity([](double x) { return x; }, g, inst.v, plan, inst.cfg);
    for (const auto& u : utilities) {
      const auto averse = risk_aversion_necessity(u, g, inst.v, plan, inst.cfg);
      for (std::size_t a = 0; a < averse.agents.size(); ++a) {
        if (averse.agents[a].holds) {
          EXPECT_TRUE(neutral.agents[a].holds) << t;
        }
      }
    }
  }
}

TEST(RiskAversion, ConcaveUtilityScalesSublinearly) {
  const std::vector<std::function<double(double)>> utilities = {
      [](double x) { return std::sqrt(x); },
      [](double x) { return std::log1p(x); },
      [](double x) { return x; },
  };
  for (const auto& u : utilities) {
    for (double v = 0.0; v <= 10.0; v += 0.125) {
      for (double p = 0.0; p <= 1.0; p += 0.0625) {
        EXPECT_GE(u(p * v), p * u(v) - 1e-12);
      }
    }
  }
}

TEST(RiskAversion, RejectsInvalidUtilities) {
  const auto v = values({1, 1.9, 10});
  const auto cfg = make_config(3, 2);
  const auto plan = coalition_select(v, cfg, 2, 1);
  const auto g = grid(10.0, 11);
  EXPECT_THROW(risk_aversion_necessity([](double x) { return x * x; }, g, v, plan, cfg),
               InvalidArgument);
  EXPECT_THROW(risk_aversion_necessity([](double x) { return x + 1.0; }, g, v, plan, cfg),
               InvalidArgument);
  const std::vector<double> one = {1.0};
  EXPECT_THROW(risk_aversion_necessity([](double x) { return x; }, one, v, plan, cfg),
               InvalidArgument);
}

}  // namespace
}  // namespace stackelsim::attack
