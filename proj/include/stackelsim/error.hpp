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

#ifndef STACKELSIM_ERROR_HPP_
#define STACKELSIM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace stackelsim {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (index out of range, n <= m, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed to reach its tolerance, or a root bracket holds
// no sign change. `estimate` carries the achieved error estimate when known.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double estimate = 0.0)
      : Error(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

// Contract expansion would exceed the configured size budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// An attack outcome was requested for a plan that is not an equilibrium.
class InfeasiblePlan : public Error {
 public:
  using Error::Error;
};

// Malformed game-tree text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        message_(message),
        line_(line),
        column_(column) {}

  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

}  // namespace stackelsim

#endif  // STACKELSIM_ERROR_HPP_
