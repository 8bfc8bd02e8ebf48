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

// Welfare ratios and Monte Carlo experiments over the commitment attack.
//
// Welfare counts agents only: tips collected by the auctioneer and burned
// base fees are excluded. Outcomes are compared through their expected
// utilities over the tie-breaking lottery.
//
// Monte Carlo drivers run trials on worker threads. Trial t always draws its
// valuations from derive_seed(master_seed, t) and results are reduced in
// trial order, so output does not depend on the number of workers.

#ifndef STACKELSIM_ANALYSIS_HPP_
#define STACKELSIM_ANALYSIS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stackelsim/amount.hpp"
#include "stackelsim/attack.hpp"
#include "stackelsim/mechanisms.hpp"
#include "stackelsim/stats.hpp"

namespace stackelsim::analysis {

using attack::AttackPlan;
using mech::AllocationOutcome;
using mech::AuctionConfig;
using stats::DistributionSpec;
using stats::ValuationProfile;

// Sum of expected agent utilities.
Amount welfare(const AllocationOutcome& outcome);

struct LeaderRow {
  int leader = 0;
  bool feasible = false;
  int binding_agent = -1;
  double binding_margin = 0.0;
  Amount welfare;  // attacked welfare; zero when infeasible
};

struct PodReport {
  Amount numerator_amount;    // best attacked welfare
  Amount denominator_amount;  // worst equilibrium welfare
  double numerator = 0.0;     // quantum terms dropped when negligible
  double denominator = 0.0;
  double pod = 0.0;           // NaN when no leader is feasible
  int best_leader = -1;       // -1 unless filled by defiance_report
  std::vector<LeaderRow> leaders;
};

// max welfare over `attacked` / min welfare over `equilibria`. Throws
// InvalidArgument on empty sets or a non-positive denominator.
PodReport price_of_defiance(std::span<const AllocationOutcome> attacked,
                            std::span<const AllocationOutcome> equilibria,
                            double eps);

// Tries every agent as the leader with coalition_select(., leader, k) and
// compares the feasible attacked outcomes against the no-contract
// equilibrium of `config`.
PodReport defiance_report(const ValuationProfile& valuations,
                          const AuctionConfig& config, int k,
                          std::uint64_t seed);

// Expected PoD for uniform valuations when the top agent leads with k = 1:
//   [(m-1)/(n-1) * (n-1)n/(2(n+1)) + n/(n+1) - (m+1) eps]
//   / [n/2 - (n-m)(n-m+1)/(2(n+1)) - m(n-m)/(n+1) - m eps],
// with the quantum terms dropped when negligible.
double pod_closed_form_uniform(int n, int m, double eps);

// max welfare over `outcomes` / min welfare over `equilibria`.
double price_of_anarchy(std::span<const AllocationOutcome> outcomes,
                        std::span<const AllocationOutcome> equilibria,
                        double eps);

struct ExperimentSpec {
  DistributionSpec dist = DistributionSpec::uniform();
  int m = 0;
  double alpha = 0.0;
  int k = 0;           // coalition size; 0 means ceil(delta * m)
  double delta = 0.0;  // used when k == 0
  int trials = 1;
  std::uint64_t master_seed = 0;
  double base_fee = 0.0;
  double eps = kDefaultQuantum;
  mech::MechanismKind kind = mech::MechanismKind::kFirstPrice;
  int workers = 0;     // 0 means one per hardware thread

  // round((1 + alpha) m).
  int n() const;
  int coalition_size() const;
  AuctionConfig auction() const;
  void validate() const;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

Interval wilson_interval(long successes, long trials, double z = 1.96);

struct AttackProbability {
  int n = 0;
  int k = 0;
  long trials = 0;
  long successes = 0;
  double frequency = 0.0;
  Interval wilson;
};

// Fraction of trials in which sufficient_condition holds.
AttackProbability mc_attack_probability(const ExperimentSpec& spec);

struct PodSummary {
  int n = 0;
  int k = 0;
  long trials = 0;
  long feasible_trials = 0;
  long infeasible_trials = 0;  // no leader feasible; excluded from the mean
  double mean = 0.0;
  double stddev = 0.0;         // sample standard deviation
  Interval ci;                 // mean +- 1.96 stddev / sqrt(feasible)
  double bound = 0.0;          // 1 + alpha
  std::vector<double> pods;    // per trial; NaN for infeasible trials
};

// Empirical PoD per trial from defiance_report against the equilibrium of
// spec.kind.
PodSummary mc_pod(const ExperimentSpec& spec);

struct RevenueReport {
  Amount honest;    // no-contract equilibrium tips
  Amount attacked;  // tips when everybody complies
  Amount loss;
};

// Throws InfeasiblePlan when the plan is not an equilibrium.
RevenueReport revenue_report(const ValuationProfile& valuations,
                             const AuctionConfig& config,
                             const AttackPlan& plan);

enum class SweepFamily { kUniform, kPareto };

struct SweepSpec {
  SweepFamily family = SweepFamily::kUniform;
  std::vector<double> params;  // delta (uniform) or shape p (Pareto)
  std::vector<double> alphas;  // congestion grid per parameter
  std::vector<int> ms = {100, 500};
  int trials = 200;
  std::uint64_t master_seed = 0;
  int workers = 0;
};

struct SweepRow {
  std::string family;
  double param = 0.0;
  double alpha = 0.0;
  double alpha_star = 0.0;
  std::vector<double> frequencies;  // one per SweepSpec::ms entry
};

// For the Pareto family the coalition fraction is 5/(p^2+4). Cell c (in row
// order, then m) uses derive_seed(master_seed, c) as its master seed.
std::vector<SweepRow> threshold_sweep(const SweepSpec& spec);

}  // namespace stackelsim::analysis

#endif  // STACKELSIM_ANALYSIS_HPP_
