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

#include "zfi/speculation/spec_step.hpp"

#include "zfi/leakage/leaks.hpp"

namespace zfi::speculation {

using namespace lang;
using machine::Stuck;
using machine::StuckReason;

StepOutcome spec_step(const Config& c, const MemoryLayout& layout,
                      Oracle& oracle) {
  const Instruction* insn = c.instruction();
  if (insn == nullptr) return machine::stuck_at_unmapped(*c.program, c.pc);
  if (std::holds_alternative<Flush>(*insn)) {
    Config next = c;
    next.pc = c.width().wrap(c.pc + 1u);
    next.mu_state = OracleState::bottom();
    return next;
  }
  StepOutcome out = machine::arch_step(c, layout);
  if (!is_control_flow(*insn) || machine::is_stuck(out)) return out;

  Config& next = std::get<Config>(out);
  const Value arch = next.pc;
  Prediction p = oracle.predict(c, arch);
  next.pc = c.width().wrap(p.pc);
  next.mu_state = std::move(p.state);
  next.mispredicted = c.mispredicted || next.pc != arch;
  return out;
}

StepOutcome cet_step(const Config& c, const MemoryLayout& layout,
                     Oracle& oracle) {
  const Instruction* insn = c.instruction();
  if (insn == nullptr || !is_control_flow(*insn)) {
    return spec_step(c, layout, oracle);
  }
  StepOutcome out = spec_step(c, layout, oracle);
  if (machine::is_stuck(out)) return out;
  Config& next = std::get<Config>(out);
  const Width w = c.width();

  if (is_return(*insn)) {
    const Value v = c.reg(Reg::kSStk);
    if (layout.is_guard(v)) return Stuck{StuckReason::kGuardAccess, c.pc, v};
    if (next.pc != c.load(v)) {
      return Stuck{StuckReason::kCetShadowMismatch, c.pc, next.pc};
    }
    next.set_reg(Reg::kSStk, w.wrap(v + 1u));
    return out;
  }

  const Instruction* target = c.program->at(next.pc);
  if (target == nullptr) {
    Stuck s = machine::stuck_at_unmapped(*c.program, next.pc);
    return Stuck{s.reason, c.pc, next.pc};
  }
  if (!std::holds_alternative<EndBranch>(*target)) {
    return Stuck{StuckReason::kCetEndbranch, c.pc, next.pc};
  }
  if (is_call(*insn)) {
    const Value v = w.wrap(c.reg(Reg::kSStk) + w.mask());
    if (layout.is_guard(v)) return Stuck{StuckReason::kGuardAccess, c.pc, v};
    next.store(v, w.wrap(c.pc + 1u));
    next.set_reg(Reg::kSStk, v);
  }
  return out;
}

machine::RunResult run_spec(Config c, const MemoryLayout& layout,
                            Oracle& oracle, unsigned n, SpecMode mode,
                            const machine::StepObserver& observer) {
  const leakage::Stepper step = [&](const Config& x) {
    return mode == SpecMode::kCet ? cet_step(x, layout, oracle)
                                  : spec_step(x, layout, oracle);
  };
  return machine::run_steps(
      std::move(c), n,
      [&](const Config& x) { return leakage::trace_step(x, layout, step); },
      observer);
}

}  // namespace zfi::speculation
