// Copyright 2026 The WNetKAT authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WNETKAT_CLI_H_
#define WNETKAT_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace wnetkat {
namespace cli {

// Exit codes: 0 NotDrop / success, 1 IsDrop, 2 Unknown (fuel), 3 usage or
// parse error.
constexpr int kExitNotDrop = 0;
constexpr int kExitIsDrop = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 3;

// Subcommands: parse, eval, check, compile-wfa, query
// {cost-reach, cap-reach, chain, fairness, qos}. An `equiv` request is
// refused with a diagnostic pointing at emptiness checking. With
// --format json the report is one JSON object with keys command, verdict,
// witness, optimal_weight, saturated, elapsed_ms.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace cli
}  // namespace wnetkat

#endif  // WNETKAT_CLI_H_
