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

#ifndef STACKELSIM_AMOUNT_HPP_
#define STACKELSIM_AMOUNT_HPP_

#include <cmath>

namespace stackelsim {

// Smallest currency unit used when none is configured, in units where
// valuations are O(1).
inline constexpr double kDefaultQuantum = 1e-12;

// Relative size below which the quantum term of an amount is dropped by
// Amount::limit.
inline constexpr double kQuantumDropTolerance = 1e-9;

// A money amount of the form `base + eps * quantum`.
//
// Bids like "v + one quantum" or "two quanta" are carried with the quantum
// multiple kept apart from the real part, so the same outcome can be read both
// at the configured quantum and in the vanishing-quantum limit.
struct Amount {
  double base = 0.0;
  double eps = 0.0;  // multiple of the currency quantum

  constexpr Amount() = default;
  constexpr Amount(double base_value, double eps_multiple = 0.0)  // NOLINT
      : base(base_value), eps(eps_multiple) {}

  static constexpr Amount quanta(double multiple) { return {0.0, multiple}; }

  constexpr double value(double quantum) const { return base + eps * quantum; }

  // The amount with its quantum term dropped once that term is below
  // `rel * |base|`; otherwise the full value at `quantum`.
  double limit(double quantum, double rel = kQuantumDropTolerance) const {
    if (std::abs(eps * quantum) < rel * std::abs(base)) return base;
    return value(quantum);
  }

  constexpr Amount& operator+=(const Amount& o) {
    base += o.base;
    eps += o.eps;
    return *this;
  }
  constexpr Amount& operator-=(const Amount& o) {
    base -= o.base;
    eps -= o.eps;
    return *this;
  }
  constexpr Amount& operator*=(double s) {
    base *= s;
    eps *= s;
    return *this;
  }

  friend constexpr Amount operator+(Amount a, const Amount& b) { return a += b; }
  friend constexpr Amount operator-(Amount a, const Amount& b) { return a -= b; }
  friend constexpr Amount operator-(const Amount& a) { return {-a.base, -a.eps}; }
  friend constexpr Amount operator*(Amount a, double s) { return a *= s; }
  friend constexpr Amount operator*(double s, Amount a) { return a *= s; }
  friend constexpr bool operator==(const Amount&, const Amount&) = default;
};

}  // namespace stackelsim

#endif  // STACKELSIM_AMOUNT_HPP_
