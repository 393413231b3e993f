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

#ifndef ZFI_MACHINE_CONFIG_HPP_
#define ZFI_MACHINE_CONFIG_HPP_

#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "zfi/lang/program.hpp"
#include "zfi/leakage/observation.hpp"
#include "zfi/machine/layout.hpp"
#include "zfi/speculation/oracle_state.hpp"

namespace zfi::machine {

using lang::Program;

// A machine configuration. The program is shared between configurations
// derived from one another; everything else is owned by value.
struct Config {
  std::shared_ptr<const Program> program;
  Value pc = 0;
  RegisterFile regs{};
  std::vector<Value> mem;
  leakage::ObsTrace obs;
  speculation::OracleState mu_state;
  bool mispredicted = false;

  Width width() const { return program->width(); }
  Value reg(Reg r) const { return regs[lang::index(r)]; }
  void set_reg(Reg r, Value v) { regs[lang::index(r)] = width().wrap(v); }
  Value load(Value addr) const { return mem[addr & width().mask()]; }
  void store(Value addr, Value v) {
    mem[addr & width().mask()] = width().wrap(v);
  }
  const lang::Instruction* instruction() const { return program->at(pc); }

  friend bool operator==(const Config& a, const Config& b) {
    return a.pc == b.pc && a.regs == b.regs && a.mem == b.mem &&
           a.obs == b.obs && a.mu_state == b.mu_state &&
           a.mispredicted == b.mispredicted &&
           (a.program == b.program ||
            (a.program && b.program && *a.program == *b.program));
  }
};

enum class StuckReason : std::uint8_t {
  kUnmappedPc,
  kGuardAccess,
  kHalt,  // pc reached the address just past the program
  kCetEndbranch,
  kCetShadowMismatch,
};

std::string_view stuck_reason_name(StuckReason r);
std::optional<StuckReason> stuck_reason_from_name(std::string_view s);

struct Stuck {
  StuckReason reason;
  Value pc;
  // The offending address for guard accesses and unmapped targets.
  std::optional<Value> addr;
  friend bool operator==(const Stuck&, const Stuck&) = default;
};

using StepOutcome = std::variant<Config, Stuck>;

inline bool is_stuck(const StepOutcome& o) {
  return std::holds_alternative<Stuck>(o);
}

// Entry configuration: pc at the program entry, registers from the layout,
// zeroed memory with the program's code pointers stored, empty traces.
Config initial_config(std::shared_ptr<const Program> program,
                      const MemoryLayout& layout);

// Outcome of executing at an address with no instruction.
Stuck stuck_at_unmapped(const Program& p, Value pc);

// One architectural step. Never appends observations; see trace_step.
StepOutcome arch_step(const Config& c, const MemoryLayout& layout);

// Architectural successor pc of the control-flow instruction at c.pc, or
// nullopt if the architectural rule cannot fire.
std::optional<Value> arch_target(const Config& c, const MemoryLayout& layout);

}  // namespace zfi::machine

#endif  // ZFI_MACHINE_CONFIG_HPP_
