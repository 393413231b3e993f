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

#include "zfi/leakage/leaks.hpp"

namespace zfi::leakage {

using namespace lang;
using machine::Config;

Trace arch_leaks(const Config& c, const machine::MemoryLayout& layout) {
  const Instruction* insn = c.instruction();
  if (insn == nullptr) return {};
  const Width w = c.width();
  auto eval = [&](const Expr& e) { return eval_expr(e, c.regs, w); };
  Trace t;
  if (const auto* i = std::get_if<Load>(insn)) {
    const Value addr = w.wrap(c.reg(i->base) + eval(i->offset));
    t.push_back(Observation::addr(addr));
    t.push_back(Observation::val(c.load(addr)));
  } else if (const auto* i = std::get_if<Store>(insn)) {
    t.push_back(Observation::addr(w.wrap(c.reg(i->base) + eval(i->offset))));
  } else if (const auto* i = std::get_if<Call>(insn)) {
    t.push_back(Observation::addr(w.wrap(c.reg(Reg::kStk) + w.mask())));
    t.push_back(Observation::jump(w.wrap(c.pc + i->disp)));
  } else if (const auto* i = std::get_if<CallInd>(insn)) {
    t.push_back(Observation::addr(w.wrap(c.reg(Reg::kStk) + w.mask())));
    t.push_back(Observation::jump(c.reg(i->target)));
  } else if (std::holds_alternative<Ret>(*insn)) {
    const Value v = c.reg(Reg::kStk);
    t.push_back(Observation::addr(v));
    t.push_back(Observation::val(c.load(v)));
    t.push_back(Observation::jump(c.load(v)));
  } else if (is_control_flow(*insn)) {
    if (auto target = machine::arch_target(c, layout)) {
      t.push_back(Observation::jump(*target));
    }
  }
  return t;
}

Trace project(const Trace& arch, LeakModel m) {
  if (m == LeakModel::kArch) return arch;
  Trace out;
  for (const auto& o : arch) {
    if (o.kind == Observation::Kind::kMemVal) continue;
    if (m == LeakModel::kDmem && o.kind == Observation::Kind::kJumpTarget) {
      continue;
    }
    out.push_back(o);
  }
  return out;
}

StepLeaks leaks(const Config& c, const machine::MemoryLayout& layout) {
  StepLeaks out;
  Trace arch = arch_leaks(c, layout);
  out.by_model[static_cast<std::size_t>(LeakModel::kDmem)] =
      project(arch, LeakModel::kDmem);
  out.by_model[static_cast<std::size_t>(LeakModel::kCt)] =
      project(arch, LeakModel::kCt);
  out.by_model[static_cast<std::size_t>(LeakModel::kArch)] = std::move(arch);
  return out;
}

machine::StepOutcome trace_step(const Config& c,
                                const machine::MemoryLayout& layout,
                                const Stepper& stepper) {
  machine::StepOutcome out = stepper(c);
  if (auto* next = std::get_if<Config>(&out)) {
    const StepLeaks l = leaks(c, layout);
    for (LeakModel m : kAllModels) next->obs.append(m, l.of(m));
  }
  return out;
}

}  // namespace zfi::leakage
