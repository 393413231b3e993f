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

#include "zfi/machine/run.hpp"

#include "zfi/leakage/leaks.hpp"

namespace zfi::machine {

RunResult run_steps(Config c, unsigned n,
                    const std::function<StepOutcome(const Config&)>& traced,
                    const StepObserver& observer) {
  RunResult r{std::move(c), {}, std::nullopt};
  r.steps.reserve(n);
  for (unsigned k = 0; k < n; ++k) {
    StepOutcome out = traced(r.final);
    if (auto* s = std::get_if<Stuck>(&out)) {
      r.stuck = *s;
      break;
    }
    Config& next = std::get<Config>(out);
    StepRecord rec{r.final.pc, {}, next.mispredicted};
    for (leakage::LeakModel m : leakage::kAllModels) {
      rec.obs_len[static_cast<std::size_t>(m)] =
          static_cast<std::uint32_t>(next.obs.of(m).size());
    }
    r.steps.push_back(rec);
    if (observer) observer(r.final, next);
    r.final = std::move(next);
  }
  return r;
}

RunResult run_arch(Config c, const MemoryLayout& layout, unsigned n,
                   const StepObserver& observer) {
  const leakage::Stepper step = [&](const Config& x) {
    return arch_step(x, layout);
  };
  return run_steps(
      std::move(c), n,
      [&](const Config& x) { return leakage::trace_step(x, layout, step); },
      observer);
}

}  // namespace zfi::machine
