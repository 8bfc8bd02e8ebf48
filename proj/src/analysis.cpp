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

#include "stackelsim/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "stackelsim/error.hpp"
#include "stackelsim/rng.hpp"

namespace stackelsim::analysis {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(t) for t in [0, count) on `workers` threads. Each index is handled
// exactly once; the first exception is rethrown after all threads join.
template <class Fn>
void parallel_for(long count, int workers, Fn fn) {
  int threads = workers > 0 ? workers
                            : static_cast<int>(std::thread::hardware_concurrency());
  threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, count)));
  if (threads == 1) {
    for (long t = 0; t < count; ++t) fn(t);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long t = next.fetch_add(1);
        if (t >= count) return;
        try {
          fn(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::size_t best_welfare(std::span<const AllocationOutcome> outcomes,
                         double eps, bool maximize) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    const double w = welfare(outcomes[i]).value(eps);
    const double b = welfare(outcomes[best]).value(eps);
    if (maximize ? w > b : w < b) best = i;
  }
  return best;
}

}  // namespace

Amount welfare(const AllocationOutcome& outcome) {
  Amount total;
  for (const Amount& u : outcome.expected_utilities) total += u;
  return total;
}

PodReport price_of_defiance(std::span<const AllocationOutcome> attacked,
                            std::span<const AllocationOutcome> equilibria,
                            double eps) {
  if (attacked.empty() || equilibria.empty()) {
    throw InvalidArgument("price of defiance needs non-empty outcome sets");
  }
  PodReport report;
  report.numerator_amount = welfare(attacked[best_welfare(attacked, eps, true)]);
  report.denominator_amount =
      welfare(equilibria[best_welfare(equilibria, eps, false)]);
  report.numerator = report.numerator_amount.limit(eps);
  report.denominator = report.denominator_amount.limit(eps);
  if (!(report.denominator > 0.0)) {
    throw InvalidArgument("equilibrium welfare must be positive");
  }
  report.pod = report.numerator / report.denominator;
  return report;
}

PodReport defiance_report(const ValuationProfile& valuations,
                          const AuctionConfig& config, int k,
                          std::uint64_t seed) {
  const AllocationOutcome equilibrium =
      mech::equilibrium_outcome(config, valuations, seed);
  PodReport report;
  std::vector<AllocationOutcome> attacked;
  std::vector<int> attacked_leader;
  for (int leader = 0; leader < config.n; ++leader) {
    const AttackPlan plan =
        attack::coalition_select(valuations, config, leader, k);
    const attack::ComplianceReport check =
        attack::exact_feasibility(plan, valuations, config);
    LeaderRow row;
    row.leader = leader;
    row.feasible = check.feasible;
    row.binding_agent = check.binding_agent;
    row.binding_margin = check.agents[check.binding_agent].margin_value;
    if (check.feasible) {
      attacked.push_back(attack::attacked_outcome(
          plan, valuations, config, derive_seed(seed, leader + 1)));
      attacked_leader.push_back(leader);
      row.welfare = welfare(attacked.back());
    }
    report.leaders.push_back(row);
  }
  if (attacked.empty()) {
    report.denominator_amount = welfare(equilibrium);
    report.denominator = report.denominator_amount.limit(config.eps);
    report.numerator = kNaN;
    report.pod = kNaN;
    return report;
  }
  PodReport ratio = price_of_defiance(attacked, std::span(&equilibrium, 1),
                                      config.eps);
  ratio.best_leader =
      attacked_leader[best_welfare(attacked, config.eps, true)];
  ratio.leaders = std::move(report.leaders);
  return ratio;
}

double pod_closed_form_uniform(int n, int m, double eps) {
  if (m < 1 || n <= m) throw InvalidArgument("closed form needs n > m >= 1");
  const double nd = n;
  const double md = m;
  const Amount numerator((md - 1.0) / (nd - 1.0) * (nd - 1.0) * nd /
                                 (2.0 * (nd + 1.0)) +
                             nd / (nd + 1.0),
                         -(md + 1.0));
  const Amount denominator(nd / 2.0 -
                               (nd - md) * (nd - md + 1.0) / (2.0 * (nd + 1.0)) -
                               md * (nd - md) / (nd + 1.0),
                           -md);
  const double den = denominator.limit(eps);
  if (!(den > 0.0)) throw InvalidArgument("degenerate closed-form denominator");
  return numerator.limit(eps) / den;
}

double price_of_anarchy(std::span<const AllocationOutcome> outcomes,
                        std::span<const AllocationOutcome> equilibria,
                        double eps) {
  if (outcomes.empty() || equilibria.empty()) {
    throw InvalidArgument("price of anarchy needs non-empty outcome sets");
  }
  const double best =
      welfare(outcomes[best_welfare(outcomes, eps, true)]).limit(eps);
  const double worst =
      welfare(equilibria[best_welfare(equilibria, eps, false)]).limit(eps);
  if (!(worst > 0.0)) {
    throw InvalidArgument("equilibrium welfare must be positive");
  }
  return best / worst;
}

int ExperimentSpec::n() const {
  return static_cast<int>(std::lround((1.0 + alpha) * m));
}

int ExperimentSpec::coalition_size() const {
  if (k > 0) return k;
  // The small offset keeps products like 0.69 * 100 from rounding up.
  return static_cast<int>(std::ceil(delta * m - 1e-9));
}

AuctionConfig ExperimentSpec::auction() const {
  AuctionConfig config;
  config.n = n();
  config.m = m;
  config.base_fee = base_fee;
  config.eps = eps;
  config.kind = kind;
  return config;
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw InvalidArgument("need at least one trial");
  if (!(alpha > 0.0)) throw InvalidArgument("congestion alpha must be > 0");
  if (k == 0 && !(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  if (k < 0) throw InvalidArgument("coalition size must be positive");
  auction().validate();
  const int kk = coalition_size();
  if (kk < 1 || kk >= m) {
    throw InvalidArgument("coalition size k=" + std::to_string(kk) +
                          " must satisfy 1 <= k < m=" + std::to_string(m));
  }
  if (dist.kind == DistributionSpec::Kind::kPareto && !(dist.shape > 0.0)) {
    throw InvalidArgument("Pareto shape must be positive");
  }
}

Interval wilson_interval(long successes, long trials, double z) {
  if (trials <= 0) throw InvalidArgument("Wilson interval needs trials > 0");
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

AttackProbability mc_attack_probability(const ExperimentSpec& spec) {
  spec.validate();
  const AuctionConfig config = spec.auction();
  const int k = spec.coalition_size();
  std::vector<char> holds(static_cast<std::size_t>(spec.trials), 0);
  parallel_for(spec.trials, spec.workers, [&](long t) {
    const ValuationProfile v = stats::sample_valuations(
        spec.dist, config.n, derive_seed(spec.master_seed, t));
    holds[t] = attack::sufficient_condition(v, config, k).holds ? 1 : 0;
  });
  AttackProbability out;
  out.n = config.n;
  out.k = k;
  out.trials = spec.trials;
  for (char h : holds) out.successes += h;
  out.frequency = static_cast<double>(out.successes) / out.trials;
  out.wilson = wilson_interval(out.successes, out.trials);
  return out;
}

PodSummary mc_pod(const ExperimentSpec& spec) {
  spec.validate();
  const AuctionConfig config = spec.auction();
  const int k = spec.coalition_size();
  PodSummary out;
  out.n = config.n;
  out.k = k;
  out.trials = spec.trials;
  out.bound = 1.0 + spec.alpha;
  out.pods.assign(static_cast<std::size_t>(spec.trials), kNaN);
  parallel_for(spec.trials, spec.workers, [&](long t) {
    const std::uint64_t seed = derive_seed(spec.master_seed, t);
    const ValuationProfile v = stats::sample_valuations(spec.dist, config.n, seed);
    out.pods[t] = defiance_report(v, config, k, seed).pod;
  });
  double sum = 0.0;
  for (double p : out.pods) {
    if (std::isnan(p)) {
      ++out.infeasible_trials;
    } else {
      ++out.feasible_trials;
      sum += p;
    }
  }
  if (out.feasible_trials == 0) {
    out.mean = out.stddev = kNaN;
    out.ci = {kNaN, kNaN};
    return out;
  }
  out.mean = sum / out.feasible_trials;
  double ss = 0.0;
  for (double p : out.pods) {
    if (!std::isnan(p)) ss += (p - out.mean) * (p - out.mean);
  }
  out.stddev = out.feasible_trials > 1
                   ? std::sqrt(ss / (out.feasible_trials - 1))
                   : 0.0;
  const double half = 1.96 * out.stddev / std::sqrt(out.feasible_trials);
  out.ci = {out.mean - half, out.mean + half};
  return out;
}

RevenueReport revenue_report(const ValuationProfile& valuations,
                             const AuctionConfig& config,
                             const AttackPlan& plan) {
  RevenueReport out;
  // Revenue does not depend on the lottery draw.
  out.attacked =
      attack::attacked_outcome(plan, valuations, config, 0).auctioneer_revenue;
  out.honest = mech::equilibrium_outcome(config, valuations, 0).auctioneer_revenue;
  out.loss = out.honest - out.attacked;
  return out;
}

std::vector<SweepRow> threshold_sweep(const SweepSpec& spec) {
  if (spec.params.empty() || spec.alphas.empty() || spec.ms.empty()) {
    throw InvalidArgument("sweep grids must be non-empty");
  }
  std::vector<SweepRow> rows;
  std::uint64_t cell = 0;
  for (double param : spec.params) {
    ExperimentSpec base;
    base.trials = spec.trials;
    base.workers = spec.workers;
    double alpha_star = 0.0;
    if (spec.family == SweepFamily::kUniform) {
      alpha_star = stats::uniform_alpha_threshold(param);
      base.dist = DistributionSpec::uniform();
      base.delta = param;
    } else {
      alpha_star = stats::pareto_alpha_threshold(param);
      base.dist = DistributionSpec::pareto(param);
      base.delta = stats::pareto_coalition_fraction(param);
    }
    for (double alpha : spec.alphas) {
      SweepRow row;
      row.family = spec.family == SweepFamily::kUniform ? "uniform" : "pareto";
      row.param = param;
      row.alpha = alpha;
      row.alpha_star = alpha_star;
      for (int m : spec.ms) {
        ExperimentSpec e = base;
        e.m = m;
        e.alpha = alpha;
        e.master_seed = derive_seed(spec.master_seed, cell++);
        row.frequencies.push_back(mc_attack_probability(e).frequency);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace stackelsim::analysis
