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

// Valuation distributions, order-statistic laws and the analytic congestion
// thresholds.
//
// Order-statistic indices in this header are 1-based (X_(1) is the minimum),
// matching the usual notation. Agent indices elsewhere in the library are
// 0-based positions into a sorted ValuationProfile.

#ifndef STACKELSIM_STATS_HPP_
#define STACKELSIM_STATS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stackelsim/rng.hpp"

namespace stackelsim::stats {

struct DistributionSpec {
  enum class Kind { kUniform01, kPareto };

  Kind kind = Kind::kUniform01;
  double shape = 0.0;  // Pareto shape p; unused for the uniform law

  static DistributionSpec uniform() { return {Kind::kUniform01, 0.0}; }
  static DistributionSpec pareto(double shape);

  // One draw. Uniform draws lie in (0, 1); Pareto draws in [1, inf).
  double sample(Rng& rng) const;

  // Mean of the law; +inf for Pareto shapes <= 1.
  double mean() const;

  std::string name() const;
};

// Strictly increasing, positive valuations v_1 < ... < v_n.
class ValuationProfile {
 public:
  enum class Source { kExplicit, kSampled };

  ValuationProfile() = default;

  // Throws InvalidArgument unless values are positive and strictly increasing.
  static ValuationProfile from_values(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  int n() const { return static_cast<int>(values_.size()); }

  // 0-based: operator[](0) is the lowest valuation.
  double operator[](std::size_t i) const { return values_[i]; }

  Source source() const { return source_; }
  // Number of draws that were repeated because they collided with an
  // existing value. Always 0 for explicit profiles.
  int redraws() const { return redraws_; }

 private:
  friend ValuationProfile sample_valuations(const DistributionSpec&, int,
                                            std::uint64_t);
  std::vector<double> values_;
  Source source_ = Source::kExplicit;
  int redraws_ = 0;
};

// n i.i.d. draws, sorted ascending. Exact collisions are re-drawn.
ValuationProfile sample_valuations(const DistributionSpec& dist, int n,
                                   std::uint64_t seed);

// E[X_(i)] = i/(n+1) for n uniform samples.
double order_stat_mean(int i, int n);

// The profile v_i = i/(n+1) of expected uniform order statistics.
ValuationProfile uniform_expected_profile(int n);

struct BetaBoundParams {
  double alpha = 1.0;
  double beta = 1.0;
  double v2 = 0.0;  // alpha*beta / ((alpha+beta)^2 (alpha+beta+2))
  double c0 = 0.0;  // |beta-alpha| / ((alpha+beta)(alpha+beta+2))
  double c = 0.0;   // max(sqrt(v2), c0)

  static BetaBoundParams make(double alpha, double beta);
};

// Two-sided tail bound on Pr[|X - E X| > eps] for X ~ Beta(alpha, beta):
// 2 exp(-eps^2 / (2 v2 + 2 eps c)).
double beta_concentration_bound(const BetaBoundParams& params, double eps);

// log2(n)^2 / (n+1): deviation radius of uniform order statistics.
double order_stat_deviation_radius(int n);

// Density of X_(j)/X_(i) for n i.i.d. U(0,1) samples, evaluated in log
// space. Support [1, inf).
double ratio_density_uniform(int n, int i, int j, double r);

// Density of X_(j)/X_(i) for n i.i.d. Pareto(p) samples. Support [1, inf).
double ratio_density_pareto(int n, int i, int j, double p, double r);

struct RatioDensity {
  DistributionSpec dist;
  int n = 0;
  int i = 0;  // lower order-statistic index, 1-based
  int j = 0;  // upper order-statistic index, 1-based

  void validate() const;
  double operator()(double r) const;
  // Location of the density maximum on [1, inf).
  double mode() const;
};

struct TailResult {
  double probability = 0.0;
  double error_estimate = 0.0;
};

// Pr[R >= threshold] by adaptive Gauss-Kronrod quadrature of the density,
// with the tail mapped onto [0, 1) by r = threshold / (1 - t). Relative
// tolerance 1e-8; throws NumericalError when it is not reached.
TailResult ratio_tail(const RatioDensity& density, double threshold);
double ratio_tail_probability(const RatioDensity& density, double threshold);

// Binary entropy H(x), with H(0) = H(1) = 0.
double binary_entropy(double x);

// g(alpha) = 2 sqrt(alpha (1-delta)) - (alpha+delta) log2((1+alpha-delta)/alpha).
// The uniform-valuation attack condition fails with probability decaying in
// m wherever g < 0.
double uniform_threshold_exponent(double alpha, double delta);

// The positive root of uniform_threshold_exponent in alpha, by bisection on
// [1e-6, 10] to absolute tolerance 1e-8.
double uniform_alpha_threshold(double delta);

// alpha(p) = (p^2-1) / ((4+p^2)(exp(2 sqrt((p^2-1)/p^2) / sqrt(5)) - 1)),
// for Pareto shape p > 1.
double pareto_alpha_threshold(double p);

// Coalition fraction behind pareto_alpha_threshold: 5 / (p^2 + 4).
double pareto_coalition_fraction(double p);

}  // namespace stackelsim::stats

#endif  // STACKELSIM_STATS_HPP_
