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

#include "stackelsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "stackelsim/error.hpp"

namespace stackelsim::stats {
namespace {

constexpr double kTailRelTolerance = 1e-8;
constexpr double kTailAbsFloor = 1e-15;
constexpr unsigned kTailMaxDepth = 25;

double lgam(double x) { return boost::math::lgamma(x); }

void check_indices(int n, int i, int j) {
  if (n < 2 || i < 1 || j <= i || j > n) {
    throw InvalidArgument("order-statistic indices need 1 <= i < j <= n (n=" +
                          std::to_string(n) + ", i=" + std::to_string(i) +
                          ", j=" + std::to_string(j) + ")");
  }
}

void check_ratio(double r) {
  if (!(r >= 1.0)) {
    throw InvalidArgument("ratio density support is [1, inf), got r=" +
                          std::to_string(r));
  }
}

// log f(r) for the uniform ratio law; -inf where the density vanishes.
double log_density_uniform(int n, int i, int j, double r) {
  const int gap = j - i - 1;
  double power = 0.0;
  if (gap > 0) {
    if (r == 1.0) return -std::numeric_limits<double>::infinity();
    power = gap * std::log(r - 1.0);
  }
  // n! / ((i-1)! (j-i-1)! (n-j)!) * B(j, n-j+1)
  const double log_beta = lgam(j) + lgam(n - j + 1) - lgam(n + 1);
  const double log_coef =
      lgam(n + 1) - lgam(i) - lgam(j - i) - lgam(n - j + 1) + log_beta;
  return log_coef + power - j * std::log(r);
}

double log_density_pareto(int n, int i, int j, double p, double r) {
  const int gap = j - i - 1;
  const double log_r = std::log(r);
  double power = 0.0;
  if (gap > 0) {
    if (r == 1.0) return -std::numeric_limits<double>::infinity();
    power = gap * std::log1p(-std::exp(-p * log_r));
  }
  const double log_coef =
      std::log(p) + lgam(n - i + 1) - lgam(j - i) - lgam(n - j + 1);
  return log_coef + power - (p * (n - j + 1) + 1.0) * log_r;
}

double log_density(const RatioDensity& d, double r) {
  if (d.dist.kind == DistributionSpec::Kind::kUniform01) {
    return log_density_uniform(d.n, d.i, d.j, r);
  }
  return log_density_pareto(d.n, d.i, d.j, d.dist.shape, r);
}

// Width of the density peak from the curvature of log f at the mode.
double peak_width(const RatioDensity& d, double mode) {
  const double h = std::max(1e-6, 1e-4 * (mode - 1.0));
  if (mode - h <= 1.0) return std::max(mode - 1.0, 1e-3);
  const double f0 = log_density(d, mode);
  const double fm = log_density(d, mode - h);
  const double fp = log_density(d, mode + h);
  const double curvature = (fp - 2.0 * f0 + fm) / (h * h);
  if (!(curvature < 0.0) || !std::isfinite(curvature)) return mode - 1.0;
  return 1.0 / std::sqrt(-curvature);
}

}  // namespace

DistributionSpec DistributionSpec::pareto(double shape) {
  if (!(shape > 0.0)) {
    throw InvalidArgument("Pareto shape must be positive, got " +
                          std::to_string(shape));
  }
  return {Kind::kPareto, shape};
}

double DistributionSpec::sample(Rng& rng) const {
  const double u = rng.uniform01();
  if (kind == Kind::kUniform01) return u;
  // Inverse CDF of F(x) = 1 - x^{-p}, using 1-U ~ U.
  return std::pow(u, -1.0 / shape);
}

double DistributionSpec::mean() const {
  if (kind == Kind::kUniform01) return 0.5;
  if (shape <= 1.0) return std::numeric_limits<double>::infinity();
  return shape / (shape - 1.0);
}

std::string DistributionSpec::name() const {
  if (kind == Kind::kUniform01) return "uniform";
  return "pareto";
}

ValuationProfile ValuationProfile::from_values(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("valuation profile is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw InvalidArgument("valuations must be positive and finite (index " +
                            std::to_string(i) + ")");
    }
    if (i > 0 && !(values[i - 1] < values[i])) {
      throw InvalidArgument(
          "valuations must be strictly increasing (indices " +
          std::to_string(i - 1) + ", " + std::to_string(i) + ")");
    }
  }
  ValuationProfile profile;
  profile.values_ = std::move(values);
  return profile;
}

ValuationProfile sample_valuations(const DistributionSpec& dist, int n,
                                   std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample count must be at least 1");
  Rng rng(seed);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (double& v : values) v = dist.sample(rng);
  std::sort(values.begin(), values.end());

  int redraws = 0;
  for (;;) {
    bool collided = false;
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i] == values[i - 1]) {
        values[i] = dist.sample(rng);
        ++redraws;
        collided = true;
      }
    }
    if (!collided) break;
    std::sort(values.begin(), values.end());
  }

  ValuationProfile profile;
  profile.values_ = std::move(values);
  profile.source_ = ValuationProfile::Source::kSampled;
  profile.redraws_ = redraws;
  return profile;
}

double order_stat_mean(int i, int n) {
  if (n < 1 || i < 1 || i > n) {
    throw InvalidArgument("order statistic index out of range: i=" +
                          std::to_string(i) + ", n=" + std::to_string(n));
  }
  return static_cast<double>(i) / (n + 1);
}

ValuationProfile uniform_expected_profile(int n) {
  if (n < 1) throw InvalidArgument("profile size must be at least 1");
  std::vector<double> values;
  values.reserve(n);
  for (int i = 1; i <= n; ++i) values.push_back(order_stat_mean(i, n));
  return ValuationProfile::from_values(std::move(values));
}

BetaBoundParams BetaBoundParams::make(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InvalidArgument("Beta shapes must be positive");
  }
  BetaBoundParams p;
  p.alpha = alpha;
  p.beta = beta;
  const double s = alpha + beta;
  p.v2 = alpha * beta / (s * s * (s + 2.0));
  p.c0 = std::abs(beta - alpha) / (s * (s + 2.0));
  p.c = std::max(std::sqrt(p.v2), p.c0);
  return p;
}

double beta_concentration_bound(const BetaBoundParams& params, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("deviation must be positive");
  return 2.0 * std::exp(-eps * eps / (2.0 * params.v2 + 2.0 * eps * params.c));
}

double order_stat_deviation_radius(int n) {
  if (n < 2) throw InvalidArgument("deviation radius needs n >= 2");
  const double lg = std::log2(static_cast<double>(n));
  return lg * lg / (n + 1);
}

double ratio_density_uniform(int n, int i, int j, double r) {
  check_indices(n, i, j);
  check_ratio(r);
  return std::exp(log_density_uniform(n, i, j, r));
}

double ratio_density_pareto(int n, int i, int j, double p, double r) {
  check_indices(n, i, j);
  check_ratio(r);
  if (!(p > 0.0)) throw InvalidArgument("Pareto shape must be positive");
  return std::exp(log_density_pareto(n, i, j, p, r));
}

void RatioDensity::validate() const {
  check_indices(n, i, j);
  if (dist.kind == DistributionSpec::Kind::kPareto && !(dist.shape > 0.0)) {
    throw InvalidArgument("Pareto shape must be positive");
  }
}

double RatioDensity::operator()(double r) const {
  validate();
  check_ratio(r);
  return std::exp(log_density(*this, r));
}

double RatioDensity::mode() const {
  validate();
  const int gap = j - i - 1;
  if (gap == 0) return 1.0;
  if (dist.kind == DistributionSpec::Kind::kUniform01) {
    // d/dr [gap log(r-1) - j log r] = 0
    return static_cast<double>(j) / (i + 1);
  }
  const double p = dist.shape;
  const double b = n - j + 1;
  // With w = r^{-p}: gap p w / (1-w) = p b + 1.
  const double w = (p * b + 1.0) / (gap * p + p * b + 1.0);
  return std::pow(w, -1.0 / p);
}

TailResult ratio_tail(const RatioDensity& density, double threshold) {
  density.validate();
  if (!(threshold >= 1.0)) {
    throw InvalidArgument("tail threshold must be >= 1");
  }
  if (std::isinf(threshold)) return {0.0, 0.0};

  const double log_t = std::log(threshold);
  auto integrand = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double r = threshold / (1.0 - t);
    const double lf = log_density(density, r);
    if (!std::isfinite(lf)) return 0.0;
    return std::exp(lf + log_t - 2.0 * std::log1p(-t));
  };

  // Break points at the peak and at geometrically wider offsets around it, so
  // narrow peaks are never straddled by a single rule.
  std::vector<double> cuts = {0.0, 1.0};
  const double mode = density.mode();
  const double width = peak_width(density, mode);
  auto to_t = [&](double r) { return 1.0 - threshold / r; };
  for (double k = 1.0; k <= 1024.0; k *= 4.0) {
    for (double r : {mode - k * width, mode + k * width}) {
      if (r > threshold && std::isfinite(r)) cuts.push_back(to_t(r));
    }
  }
  if (mode > threshold) cuts.push_back(to_t(mode));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  double error = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double piece_error = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, cuts[s], cuts[s + 1], kTailMaxDepth, kTailRelTolerance,
        &piece_error);
    error += piece_error;
  }
  if (!(error <= kTailRelTolerance * std::abs(total) + kTailAbsFloor)) {
    throw NumericalError("tail quadrature did not converge (estimate " +
                             std::to_string(error) + ")",
                         error);
  }
  return {std::clamp(total, 0.0, 1.0), error};
}

double ratio_tail_probability(const RatioDensity& density, double threshold) {
  return ratio_tail(density, threshold).probability;
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InvalidArgument("binary entropy is defined on [0, 1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double uniform_threshold_exponent(double alpha, double delta) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  return 2.0 * std::sqrt(alpha * (1.0 - delta)) -
         (alpha + delta) * std::log2((1.0 + alpha - delta) / alpha);
}

double uniform_alpha_threshold(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  double lo = 1e-6;
  double hi = 10.0;
  double g_lo = uniform_threshold_exponent(lo, delta);
  const double g_hi = uniform_threshold_exponent(hi, delta);
  if ((g_lo < 0.0) == (g_hi < 0.0)) {
    throw NumericalError("no sign change of the threshold exponent on [1e-6, 10]",
                         std::min(std::abs(g_lo), std::abs(g_hi)));
  }
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = uniform_threshold_exponent(mid, delta);
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double pareto_alpha_threshold(double p) {
  if (!(p > 1.0)) throw InvalidArgument("Pareto threshold needs shape p > 1");
  const double p2 = p * p;
  const double root = std::sqrt((p2 - 1.0) / p2);
  return (p2 - 1.0) /
         ((4.0 + p2) * (std::exp(2.0 * root / std::sqrt(5.0)) - 1.0));
}

double pareto_coalition_fraction(double p) {
  if (!(p > 1.0)) throw InvalidArgument("Pareto threshold needs shape p > 1");
  return 5.0 / (p * p + 4.0);
}

}  // namespace stackelsim::stats
