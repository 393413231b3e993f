// Copyright 2026 The ZFI Model Authors
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

#ifndef ZFI_CLI_CLI_HPP_
#define ZFI_CLI_CLI_HPP_

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zfi/leakage/observation.hpp"
#include "zfi/machine/run.hpp"

namespace zfi::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitUsage = 2,
  kExitBudget = 3,
};

// Result of `zfi run`, serializable to JSON and back without loss.
struct RunReport {
  std::string semantics;  // arch | spec | cet
  std::string oracle_class;
  std::string script;
  unsigned bound = 0;
  std::size_t steps = 0;
  std::string outcome;  // "bound" or the stuck reason
  std::optional<lang::Value> stuck_addr;
  lang::Value pc = 0;
  bool mispredicted = false;
  std::map<std::string, lang::Value> regs;  // every register by name
  std::vector<lang::Value> mem;
  std::array<leakage::Trace, 3> traces;  // dmem, ct, arch

  std::string to_json() const;
  static RunReport from_json(const std::string& text);
  static RunReport from_run(const machine::RunResult& r, std::string semantics,
                            std::string oracle_class, std::string script,
                            unsigned bound);
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Parses argv and executes a subcommand (run, harden, check, replay),
// writing results to `out` and diagnostics to `err`. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace zfi::cli

#endif  // ZFI_CLI_CLI_HPP_
