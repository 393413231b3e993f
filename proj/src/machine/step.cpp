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

#include "zfi/machine/config.hpp"

namespace zfi::machine {
namespace {

using namespace lang;

constexpr std::string_view kStuckNames[] = {
    "unmapped-pc", "guard-access", "halt", "cet-endbranch",
    "cet-shadow-mismatch",
};

Stuck guard(const Config& c, Value addr) {
  return Stuck{StuckReason::kGuardAccess, c.pc, addr};
}

}  // namespace

std::string_view stuck_reason_name(StuckReason r) {
  return kStuckNames[static_cast<std::size_t>(r)];
}

std::optional<StuckReason> stuck_reason_from_name(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kStuckNames); ++i) {
    if (kStuckNames[i] == s) return static_cast<StuckReason>(i);
  }
  return std::nullopt;
}

Config initial_config(std::shared_ptr<const Program> program,
                      const MemoryLayout& layout) {
  if (program->width() != layout.width()) {
    throw LayoutError("program width " +
                      std::to_string(program->width().bits()) +
                      " does not match layout width " +
                      std::to_string(layout.width().bits()));
  }
  Config c;
  c.pc = program->entry();
  c.regs = layout.initial_registers();
  c.mem.assign(program->width().cardinality(), 0);
  for (const auto& cp : program->code_pointers()) {
    c.mem[cp.mem_addr] = cp.code_addr;
  }
  c.program = std::move(program);
  return c;
}

Stuck stuck_at_unmapped(const Program& p, Value pc) {
  if (!p.empty() && pc == p.end()) return Stuck{StuckReason::kHalt, pc, pc};
  if (p.empty() && pc == p.entry()) return Stuck{StuckReason::kHalt, pc, pc};
  return Stuck{StuckReason::kUnmappedPc, pc, pc};
}

StepOutcome arch_step(const Config& c, const MemoryLayout& layout) {
  const Instruction* insn = c.instruction();
  if (insn == nullptr) return stuck_at_unmapped(*c.program, c.pc);
  const Width w = c.width();
  auto eval = [&](const Expr& e) { return eval_expr(e, c.regs, w); };

  Config next = c;
  next.pc = w.wrap(c.pc + 1u);

  if (const auto* i = std::get_if<Assign>(insn)) {
    next.set_reg(i->dst, eval(i->value));
  } else if (const auto* i = std::get_if<Load>(insn)) {
    const Value addr = w.wrap(c.reg(i->base) + eval(i->offset));
    if (layout.is_guard(addr)) return guard(c, addr);
    next.set_reg(i->dst, c.load(addr));
  } else if (const auto* i = std::get_if<Store>(insn)) {
    const Value addr = w.wrap(c.reg(i->base) + eval(i->offset));
    if (layout.is_guard(addr)) return guard(c, addr);
    next.store(addr, eval(i->value));
  } else if (const auto* i = std::get_if<Jump>(insn)) {
    next.pc = w.wrap(c.pc + i->disp);
  } else if (const auto* i = std::get_if<JumpIf>(insn)) {
    if (eval(i->cond) != 0) next.pc = w.wrap(c.pc + i->disp);
  } else if (const auto* i = std::get_if<JumpInd>(insn)) {
    next.pc = c.reg(i->target);
  } else if (is_call(*insn)) {
    const Value v = w.wrap(c.reg(Reg::kStk) + w.cardinality() - 1u);
    if (layout.is_guard(v)) return guard(c, v);
    next.store(v, w.wrap(c.pc + 1u));
    next.set_reg(Reg::kStk, v);
    if (const auto* d = std::get_if<Call>(insn)) {
      next.pc = w.wrap(c.pc + d->disp);
    } else {
      next.pc = c.reg(std::get<CallInd>(*insn).target);
    }
  } else if (std::holds_alternative<Ret>(*insn)) {
    const Value v = c.reg(Reg::kStk);
    if (layout.is_guard(v)) return guard(c, v);
    next.set_reg(Reg::kStk, w.wrap(v + 1u));
    next.pc = c.load(v);
  }
  // Flush and EndBranch are architectural no-ops.
  return next;
}

std::optional<Value> arch_target(const Config& c, const MemoryLayout& layout) {
  auto out = arch_step(c, layout);
  if (const auto* n = std::get_if<Config>(&out)) return n->pc;
  return std::nullopt;
}

}  // namespace zfi::machine
