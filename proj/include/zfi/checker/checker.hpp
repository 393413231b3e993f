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

#ifndef ZFI_CHECKER_CHECKER_HPP_
#define ZFI_CHECKER_CHECKER_HPP_

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "zfi/leakage/observation.hpp"
#include "zfi/machine/run.hpp"
#include "zfi/oracles/oracles.hpp"

namespace zfi::checker {

using lang::Program;
using lang::Reg;
using lang::Value;
using leakage::LeakModel;
using machine::Config;
using machine::MemoryLayout;
using oracles::DecisionScript;
using oracles::OracleClass;
using speculation::SpecMode;

// A register or a memory cell of the initial state.
struct Cell {
  enum class Kind : std::uint8_t { kReg, kMem };
  Kind kind = Kind::kReg;
  Reg reg = Reg::kR0;
  Value addr = 0;

  static Cell of_reg(Reg r) { return {Kind::kReg, r, 0}; }
  static Cell of_mem(Value a) { return {Kind::kMem, Reg::kR0, a}; }
  std::string name() const;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// `r1`, `rH`, `mem[12]`, `mem[0xc]`.
Cell parse_cell(std::string_view text, lang::Width w);

using Assignment = std::vector<std::pair<Cell, Value>>;

// `r1=3,mem[0x12]=5`.
Assignment parse_assignment(std::string_view text, lang::Width w);
std::string render_assignment(const Assignment& a);
void apply_assignment(Config& c, const Assignment& a);

// Initial states: a base configuration with the listed cells ranging over
// the domain. State k assigns the cells the digits of k in base |domain|,
// first cell most significant.
class StateSpace {
 public:
  StateSpace(Config base, std::vector<Cell> cells, std::vector<Value> domain);

  // Every w-bit value.
  static std::vector<Value> full_domain(lang::Width w);
  // `a..b` (inclusive) or a comma-separated list.
  static std::vector<Value> parse_domain(std::string_view text, lang::Width w);

  const Config& base() const { return base_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Value>& domain() const { return domain_; }
  // Saturates at SIZE_MAX.
  std::size_t size() const;
  Assignment assignment(std::size_t index) const;
  Config state(std::size_t index) const;
  std::string summary() const;

 private:
  Config base_;
  std::vector<Cell> cells_;
  std::vector<Value> domain_;
};

// Agreement on every sandbox region and on all non-memory components.
bool mem_equiv(const Config& a, const Config& b, const MemoryLayout& layout);

enum class Property : std::uint8_t { kBreakout, kPoisoning };
std::string_view property_name(Property p);
std::optional<Property> property_from_name(std::string_view s);

struct CheckOptions {
  OracleClass oracle_class = OracleClass::kDirectionOnly;
  unsigned steps = 10;
  // Observation model compared; breakout security compares arch traces.
  LeakModel model = LeakModel::kArch;
  SpecMode mode = SpecMode::kPlain;
  // Also treat differing termination (step count, stuck reason) as a
  // difference, not only differing observations.
  bool strict = false;
  unsigned workers = 1;
  std::size_t max_states = 1u << 20;
  std::size_t max_oracles = 1u << 16;
};

struct SecureUpTo {
  unsigned steps;
  OracleClass oracle_class;
  std::size_t states;
  std::size_t oracles;
  std::size_t comparisons;
  std::string space;
};

struct Violation {
  Property property = Property::kBreakout;
  LeakModel model = LeakModel::kArch;
  OracleClass oracle_class = OracleClass::kDirectionOnly;
  SpecMode mode = SpecMode::kPlain;
  unsigned steps = 0;
  bool strict = false;
  DecisionScript script;
  Assignment base_init;
  Assignment init1;
  Assignment init2;
  leakage::Trace trace1;
  leakage::Trace trace2;
  std::size_t divergence_index = 0;
  // 1-based step at which the first differing observation is emitted.
  std::size_t divergence_step = 0;
  // Flag of the configuration in which the divergent step started.
  bool mispredicted_at_divergence = false;
  std::uint64_t program_hash = 0;
  std::string space;
};

struct BudgetExceeded {
  std::string what;  // "states" or "oracles"
  std::size_t limit;
};

using Verdict = std::variant<SecureUpTo, Violation, BudgetExceeded>;

// Two speculative runs under the same oracle from initial states that agree
// on the sandbox must produce equal observations.
Verdict check_breakout(std::shared_ptr<const Program> program,
                       const MemoryLayout& layout, const StateSpace& space,
                       const CheckOptions& opts);

// Two initial states whose architectural runs produce equal observations
// must produce equal observations speculatively.
Verdict check_poisoning(std::shared_ptr<const Program> program,
                        const MemoryLayout& layout, const StateSpace& space,
                        const CheckOptions& opts);

Verdict check(Property property, std::shared_ptr<const Program> program,
              const MemoryLayout& layout, const StateSpace& space,
              const CheckOptions& opts);

class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReplayResult {
  machine::RunResult run1;
  machine::RunResult run2;
};

// Re-runs both sides of a violation. Throws ReplayError when the program
// is not the one the violation was found on.
ReplayResult replay(const Violation& v, std::shared_ptr<const Program> program,
                    const MemoryLayout& layout);

// Same, with the oracle replaced by a correct one.
ReplayResult replay_correct(const Violation& v,
                            std::shared_ptr<const Program> program,
                            const MemoryLayout& layout);

// First index at which the traces differ, or the shorter length.
std::size_t first_difference(const leakage::Trace& a, const leakage::Trace& b);

std::string verdict_to_json(const Verdict& v, const Program* program = nullptr,
                            const MemoryLayout* layout = nullptr);
// Parses a violation report produced by verdict_to_json. The embedded
// program text and layout, when present, are returned alongside.
struct ParsedViolation {
  Violation violation;
  std::optional<std::string> program_text;
  std::optional<std::string> layout_json;
};
ParsedViolation violation_from_json(std::string_view text);

}  // namespace zfi::checker

#endif  // ZFI_CHECKER_CHECKER_HPP_
