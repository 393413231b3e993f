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

#ifndef ZFI_SPECULATION_SPEC_STEP_HPP_
#define ZFI_SPECULATION_SPEC_STEP_HPP_

#include "zfi/machine/config.hpp"
#include "zfi/machine/run.hpp"

namespace zfi::speculation {

using machine::Config;
using machine::MemoryLayout;
using machine::StepOutcome;

struct Prediction {
  Value pc;
  OracleState state;
};

// Branch predictor consulted at every control-flow instruction.
class Oracle {
 public:
  virtual ~Oracle() = default;
  // `c` is the configuration before the step and `arch_target` the
  // architectural successor pc.
  virtual Prediction predict(const Config& c, Value arch_target) = 0;
};

// Predicts the architectural target and leaves the state untouched.
class PerfectOracle final : public Oracle {
 public:
  Prediction predict(const Config& c, Value arch_target) override {
    return {arch_target, c.mu_state};
  }
};

enum class SpecMode : std::uint8_t { kPlain, kCet };

// Untraced speculative step.
StepOutcome spec_step(const Config& c, const MemoryLayout& layout,
                      Oracle& oracle);
// Untraced speculative step with CET checks and the shadow stack.
StepOutcome cet_step(const Config& c, const MemoryLayout& layout,
                     Oracle& oracle);

machine::RunResult run_spec(Config c, const MemoryLayout& layout,
                            Oracle& oracle, unsigned n,
                            SpecMode mode = SpecMode::kPlain,
                            const machine::StepObserver& observer = {});

}  // namespace zfi::speculation

#endif  // ZFI_SPECULATION_SPEC_STEP_HPP_
