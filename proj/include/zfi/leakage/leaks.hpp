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

#ifndef ZFI_LEAKAGE_LEAKS_HPP_
#define ZFI_LEAKAGE_LEAKS_HPP_

#include <functional>

#include "zfi/machine/config.hpp"

namespace zfi::leakage {

// Observations of one step, per model.
struct StepLeaks {
  std::array<Trace, 3> by_model;
  const Trace& of(LeakModel m) const {
    return by_model[static_cast<std::size_t>(m)];
  }
};

// Observations produced by the architectural rule for the instruction at
// c.pc, in the order the rule performs its effects. Jump observations carry
// the architectural target. Empty when c.pc is unmapped.
StepLeaks leaks(const machine::Config& c, const machine::MemoryLayout& layout);

// The architectural-model list from which the other two are projections.
Trace arch_leaks(const machine::Config& c, const machine::MemoryLayout& layout);

Trace project(const Trace& arch, LeakModel m);

using Stepper = std::function<machine::StepOutcome(const machine::Config&)>;

// Runs `stepper` and, on success, appends leaks(c) to the successor's traces.
// A stuck step appends nothing.
machine::StepOutcome trace_step(const machine::Config& c,
                                const machine::MemoryLayout& layout,
                                const Stepper& stepper);

}  // namespace zfi::leakage

#endif  // ZFI_LEAKAGE_LEAKS_HPP_
