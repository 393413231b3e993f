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

#ifndef ZFI_MACHINE_RUN_HPP_
#define ZFI_MACHINE_RUN_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "zfi/machine/config.hpp"

namespace zfi::machine {

// Summary of one executed step.
struct StepRecord {
  Value pc;  // pc before the step
  // Trace lengths per model after the step (dmem, ct, arch).
  std::array<std::uint32_t, 3> obs_len;
  bool mispredicted;  // flag after the step
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct RunResult {
  Config final;
  std::vector<StepRecord> steps;
  // Set when the run stopped before the step bound.
  std::optional<Stuck> stuck;
};

// Called after every successful step with the configurations around it.
using StepObserver = std::function<void(const Config& before, const Config& after)>;

// Up to n traced architectural steps, stopping early at a stuck outcome.
RunResult run_arch(Config c, const MemoryLayout& layout, unsigned n,
                   const StepObserver& observer = {});

// Shared driver: iterates a traced stepper.
RunResult run_steps(Config c, unsigned n,
                    const std::function<StepOutcome(const Config&)>& traced,
                    const StepObserver& observer);

}  // namespace zfi::machine

#endif  // ZFI_MACHINE_RUN_HPP_
