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

#include "zfi/checker/checker.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <map>

namespace zfi::checker {
namespace {

// What a run contributes to a comparison.
struct Outcome {
  leakage::Trace trace;
  std::size_t steps = 0;
  int stuck = -1;  // StuckReason, or -1 when the bound was reached

  bool same(const Outcome& o, bool strict) const {
    if (trace != o.trace) return false;
    return !strict || (steps == o.steps && stuck == o.stuck);
  }
};

Outcome summarize(const machine::RunResult& r, LeakModel m) {
  return Outcome{r.final.obs.of(m), r.steps.size(),
                 r.stuck ? static_cast<int>(r.stuck->reason) : -1};
}

Outcome run_speculative(const Config& c, const MemoryLayout& layout,
                        const CheckOptions& opts, const DecisionScript& script) {
  oracles::ClassOracle oracle(opts.oracle_class, script);
  return summarize(
      speculation::run_spec(c, layout, oracle, opts.steps, opts.mode),
      opts.model);
}

struct Found {
  std::size_t script;
  std::size_t first;
  std::size_t second;
};

// Searches the scripts for the first group member whose speculative outcome
// differs from its group representative. Groups are listed by ascending
// representative index.
template <typename Groups>
std::optional<Found> search(const std::vector<Config>& states,
                            const Groups& groups, const MemoryLayout& layout,
                            const CheckOptions& opts,
                            const std::vector<DecisionScript>& scripts,
                            std::size_t& comparisons) {
  const unsigned workers = std::max(1u, opts.workers);
  std::atomic<std::size_t> best{std::numeric_limits<std::size_t>::max()};
  auto work = [&](unsigned id) -> std::pair<std::optional<Found>, std::size_t> {
    std::size_t compared = 0;
    std::vector<Outcome> outcomes(states.size());
    for (std::size_t s = id; s < scripts.size(); s += workers) {
      if (s > best.load()) break;
      for (std::size_t i = 0; i < states.size(); ++i) {
        outcomes[i] = run_speculative(states[i], layout, opts, scripts[s]);
      }
      for (const auto& g : groups) {
        for (std::size_t k = 1; k < g.size(); ++k) {
          ++compared;
          if (!outcomes[g[0]].same(outcomes[g[k]], opts.strict)) {
            std::size_t cur = best.load();
            while (s < cur && !best.compare_exchange_weak(cur, s)) {
            }
            return {Found{s, g[0], g[k]}, compared};
          }
        }
      }
    }
    return {std::nullopt, compared};
  };

  std::vector<std::pair<std::optional<Found>, std::size_t>> results;
  if (workers == 1) {
    results.push_back(work(0));
  } else {
    std::vector<std::future<std::pair<std::optional<Found>, std::size_t>>> fs;
    for (unsigned id = 0; id < workers; ++id) {
      fs.push_back(std::async(std::launch::async, work, id));
    }
    for (auto& f : fs) results.push_back(f.get());
  }
  std::optional<Found> first;
  for (const auto& [found, compared] : results) {
    comparisons += compared;
    if (found && (!first || found->script < first->script)) first = found;
  }
  return first;
}

struct Prepared {
  std::vector<Config> states;
  std::vector<DecisionScript> scripts;
};

std::variant<Prepared, BudgetExceeded> prepare(const StateSpace& space,
                                               const MemoryLayout& layout,
                                               const CheckOptions& opts) {
  const std::size_t n = space.size();
  if (n > opts.max_states) return BudgetExceeded{"states", opts.max_states};
  Prepared p;
  p.states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) p.states.push_back(space.state(i));
  oracles::EnumerateOptions eo;
  eo.mode = opts.mode;
  eo.max_scripts = opts.max_oracles;
  auto set = oracles::enumerate_oracles(opts.oracle_class, p.states, layout,
                                        opts.steps, eo);
  if (set.truncated) return BudgetExceeded{"oracles", opts.max_oracles};
  p.scripts = std::move(set.scripts);
  return p;
}

Violation make_violation(Property property, const Found& f,
                         const Prepared& p, const StateSpace& space,
                         std::shared_ptr<const Program> program,
                         const MemoryLayout& layout, const CheckOptions& opts,
                         const Assignment& base_init) {
  Violation v;
  v.property = property;
  v.model = opts.model;
  v.oracle_class = opts.oracle_class;
  v.mode = opts.mode;
  v.steps = opts.steps;
  v.strict = opts.strict;
  v.script = p.scripts[f.script];
  v.base_init = base_init;
  v.init1 = space.assignment(f.first);
  v.init2 = space.assignment(f.second);
  v.program_hash = lang::program_hash(*program);
  v.space = space.summary();

  ReplayResult r = replay(v, program, layout);
  v.trace1 = r.run1.final.obs.of(v.model);
  v.trace2 = r.run2.final.obs.of(v.model);
  v.divergence_index = first_difference(v.trace1, v.trace2);
  const std::size_t m = static_cast<std::size_t>(v.model);
  auto step_of = [&](const machine::RunResult& run) -> std::optional<std::size_t> {
    for (std::size_t s = 0; s < run.steps.size(); ++s) {
      if (run.steps[s].obs_len[m] > v.divergence_index) return s;
    }
    return std::nullopt;
  };
  const machine::RunResult* run = &r.run1;
  auto s = step_of(r.run1);
  if (!s) {
    run = &r.run2;
    s = step_of(r.run2);
  }
  if (!s) {
    // Termination-only difference (strict mode).
    s = std::min(r.run1.steps.size(), r.run2.steps.size());
    run = r.run1.steps.size() <= r.run2.steps.size() ? &r.run1 : &r.run2;
  }
  v.divergence_step = *s + 1;
  v.mispredicted_at_divergence =
      *s == 0 ? false : run->steps[std::min(*s, run->steps.size()) - 1].mispredicted;
  return v;
}

Assignment base_assignment_of(const StateSpace& space, const Config& entry) {
  // Recover the non-default part of the base state for the report.
  Assignment out;
  const Config& base = space.base();
  for (std::size_t r = 0; r < lang::kNumRegs; ++r) {
    if (base.regs[r] != entry.regs[r]) {
      out.emplace_back(Cell::of_reg(static_cast<Reg>(r)), base.regs[r]);
    }
  }
  for (std::size_t a = 0; a < base.mem.size(); ++a) {
    if (base.mem[a] != entry.mem[a]) {
      out.emplace_back(Cell::of_mem(static_cast<Value>(a)), base.mem[a]);
    }
  }
  return out;
}

}  // namespace

std::string_view property_name(Property p) {
  return p == Property::kBreakout ? "breakout" : "poisoning";
}

std::optional<Property> property_from_name(std::string_view s) {
  if (s == "breakout") return Property::kBreakout;
  if (s == "poisoning") return Property::kPoisoning;
  return std::nullopt;
}

std::size_t first_difference(const leakage::Trace& a, const leakage::Trace& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(a[i] == b[i])) return i;
  }
  return n;
}

Verdict check_breakout(std::shared_ptr<const Program> program,
                       const MemoryLayout& layout, const StateSpace& space,
                       const CheckOptions& opts) {
  auto prepared = prepare(space, layout, opts);
  if (auto* b = std::get_if<BudgetExceeded>(&prepared)) return *b;
  const Prepared& p = std::get<Prepared>(prepared);

  // States agreeing on every cell that is not free host memory are related.
  std::map<std::vector<Value>, std::size_t> index;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    std::vector<Value> key;
    for (const auto& [cell, v] : space.assignment(i)) {
      if (cell.kind == Cell::Kind::kMem && !layout.is_sandbox(cell.addr)) continue;
      key.push_back(v);
    }
    auto [it, fresh] = index.emplace(std::move(key), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }

  std::size_t comparisons = 0;
  auto found = search(p.states, groups, layout, opts, p.scripts, comparisons);
  if (found) {
    return make_violation(Property::kBreakout, *found, p, space, program,
                          layout, opts,
                          base_assignment_of(space, machine::initial_config(program, layout)));
  }
  return SecureUpTo{opts.steps, opts.oracle_class, p.states.size(),
                    p.scripts.size(), comparisons, space.summary()};
}

Verdict check_poisoning(std::shared_ptr<const Program> program,
                        const MemoryLayout& layout, const StateSpace& space,
                        const CheckOptions& opts) {
  auto prepared = prepare(space, layout, opts);
  if (auto* b = std::get_if<BudgetExceeded>(&prepared)) return *b;
  const Prepared& p = std::get<Prepared>(prepared);

  // Premise: equal architectural traces.
  std::map<leakage::Trace, std::size_t, bool (*)(const leakage::Trace&,
                                                 const leakage::Trace&)>
      index([](const leakage::Trace& a, const leakage::Trace& b) {
        return std::lexicographical_compare(
            a.begin(), a.end(), b.begin(), b.end(),
            [](const leakage::Observation& x, const leakage::Observation& y) {
              return std::pair(x.kind, x.value) < std::pair(y.kind, y.value);
            });
      });
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    auto r = machine::run_arch(p.states[i], layout, opts.steps);
    auto [it, fresh] = index.emplace(r.final.obs.of(opts.model), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }

  std::size_t comparisons = 0;
  auto found = search(p.states, groups, layout, opts, p.scripts, comparisons);
  if (found) {
    return make_violation(Property::kPoisoning, *found, p, space, program,
                          layout, opts,
                          base_assignment_of(space, machine::initial_config(program, layout)));
  }
  return SecureUpTo{opts.steps, opts.oracle_class, p.states.size(),
                    p.scripts.size(), comparisons, space.summary()};
}

Verdict check(Property property, std::shared_ptr<const Program> program,
              const MemoryLayout& layout, const StateSpace& space,
              const CheckOptions& opts) {
  return property == Property::kBreakout
             ? check_breakout(std::move(program), layout, space, opts)
             : check_poisoning(std::move(program), layout, space, opts);
}

namespace {

ReplayResult replay_with(const Violation& v,
                         std::shared_ptr<const Program> program,
                         const MemoryLayout& layout, OracleClass cls,
                         const DecisionScript& script) {
  if (lang::program_hash(*program) != v.program_hash) {
    throw ReplayError("program hash mismatch: the violation was found on a "
                      "different program");
  }
  Config base = machine::initial_config(program, layout);
  apply_assignment(base, v.base_init);
  Config c1 = base, c2 = base;
  apply_assignment(c1, v.init1);
  apply_assignment(c2, v.init2);
  oracles::ClassOracle o1(cls, script), o2(cls, script);
  return ReplayResult{speculation::run_spec(c1, layout, o1, v.steps, v.mode),
                      speculation::run_spec(c2, layout, o2, v.steps, v.mode)};
}

}  // namespace

ReplayResult replay(const Violation& v, std::shared_ptr<const Program> program,
                    const MemoryLayout& layout) {
  return replay_with(v, std::move(program), layout, v.oracle_class, v.script);
}

ReplayResult replay_correct(const Violation& v,
                            std::shared_ptr<const Program> program,
                            const MemoryLayout& layout) {
  return replay_with(v, std::move(program), layout, OracleClass::kAlwaysCorrect,
                     {});
}

}  // namespace zfi::checker
