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

// The stackelsim command line, as a library so it can be driven from tests.

#ifndef STACKELSIM_TOOLS_CLI_HPP_
#define STACKELSIM_TOOLS_CLI_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "stackelsim/amount.hpp"

namespace stackelsim::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kInfeasible = 3,
  kParse = 4,
};

inline constexpr int kSchemaVersion = 1;

struct Environment {
  std::optional<std::string> seed;  // STACKELSIM_SEED
  static Environment from_process();
};

// `args` excludes the program name. Documents go to `out` unless --output
// is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, const Environment& env = Environment::from_process());

// A money token: "1.5", "eps", "2eps", "3*eps" or "1+eps". Throws
// InvalidArgument otherwise.
Amount parse_amount(std::string_view token);

// One RFC 4180 field.
std::string csv_field(std::string_view text);

}  // namespace stackelsim::cli

#endif  // STACKELSIM_TOOLS_CLI_HPP_
