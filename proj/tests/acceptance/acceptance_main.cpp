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

// Acceptance harness: one PASS/FAIL line per criterion, non-zero exit if
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "support.hpp"
#include "zfi/leakage/leaks.hpp"
#include "zfi/speculation/spec_step.hpp"

namespace {

using namespace zfi;
using lang::Instruction;
using lang::Program;
using lang::Reg;
using lang::Value;
using leakage::LeakModel;
using leakage::Observation;
using machine::Config;
using machine::MemoryLayout;
using oracles::ClassOracle;
using oracles::OracleClass;
using speculation::SpecMode;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

bool report(int id, const std::string& title, double limit_s,
            const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    std::ostringstream ss;
    ss << "took " << secs << "s, limit " << limit_s << "s";
    o.fail(ss.str());
  }
  char time_buf[32];
  std::snprintf(time_buf, sizeof time_buf, "%.2fs", secs);
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " ["
            << time_buf << "]";
  if (!o.detail.empty()) std::cout << " - " << o.detail;
  std::cout << std::endl;
  return o.pass;
}

std::shared_ptr<const Program> share(Program p) {
  return std::make_shared<const Program>(std::move(p));
}

checker::StateSpace space_over(std::shared_ptr<const Program> p, const MemoryLayout& layout,
                               std::vector<checker::Cell> cells) {
  return checker::StateSpace(machine::initial_config(std::move(p), layout), std::move(cells),
                             checker::StateSpace::full_domain(layout.width()));
}

// --------------------------------------------------------------------------

Outcome correct_oracle_equivalence() {
  Outcome o;
  testing::Rng rng(101);
  for (int i = 0; i < 200 && o.pass; ++i) {
    const unsigned w = 3 + i % 3;
    const auto layout = testing::small_layout(w);
    const auto p = share(testing::random_program(rng, w, 12));
    Config arch = testing::random_state(rng, p, layout);
    Config spec = arch;
    ClassOracle oracle(OracleClass::kAlwaysCorrect);
    auto arch_step = [&](const Config& c) { return machine::arch_step(c, layout); };
    auto spec_step = [&](const Config& c) { return speculation::spec_step(c, layout, oracle); };
    for (int n = 0; n < 16; ++n) {
      const auto a = leakage::trace_step(arch, layout, arch_step);
      const auto s = leakage::trace_step(spec, layout, spec_step);
      if (a.index() != s.index()) {
        o.fail("stuck mismatch in program " + std::to_string(i));
        break;
      }
      if (machine::is_stuck(a)) break;
      arch = std::get<Config>(a);
      spec = std::get<Config>(s);
      if (arch.pc != spec.pc || arch.regs != spec.regs || arch.mem != spec.mem ||
          arch.obs != spec.obs || spec.mispredicted) {
        o.fail("divergence in program " + std::to_string(i) + " at step " +
               std::to_string(n));
        break;
      }
    }
  }
  if (o.pass) o.detail = "200 programs";
  return o;
}

Outcome projection_laws() {
  Outcome o;
  testing::Rng rng(102);
  std::size_t steps = 0;
  for (int i = 0; i < 200 && o.pass; ++i) {
    const unsigned w = 3 + i % 3;
    const auto layout = testing::small_layout(w);
    const auto p = share(testing::random_program(rng, w, 12));
    const Config c = testing::random_state(rng, p, layout);
    oracles::DecisionScript script;
    for (int k = 0; k < 8; ++k) script.push_back(oracles::Choice::index(rng() % 3));
    const auto cls = static_cast<OracleClass>(i % 4);
    ClassOracle oracle(cls, script);
    auto check = [&](const Config& x) {
      const auto& dmem = x.obs.of(LeakModel::kDmem);
      const auto& ct = x.obs.of(LeakModel::kCt);
      const auto& arch = x.obs.of(LeakModel::kArch);
      if (leakage::project(ct, LeakModel::kDmem) != dmem ||
          leakage::project(arch, LeakModel::kCt) != ct) {
        o.fail("projection broken in program " + std::to_string(i));
      }
    };
    check(c);
    speculation::run_spec(c, layout, oracle, 16, SpecMode::kPlain,
                          [&](const Config&, const Config& after) {
                            ++steps;
                            check(after);
                          });
  }
  if (o.pass) o.detail = std::to_string(steps) + " steps checked";
  return o;
}

struct Corpus {
  std::shared_ptr<const Program> breakout = testing::load_corpus_program("breakout.zfi");
  MemoryLayout breakout_layout = testing::load_corpus_layout("breakout.layout.json");
  std::shared_ptr<const Program> poisoning = testing::load_corpus_program("poisoning.zfi");
  std::shared_ptr<const Program> ctleak = testing::load_corpus_program("cet-ctleak.zfi");
  MemoryLayout poisoning_layout = testing::load_corpus_layout("poisoning.layout.json");

  // Attacker register r1 and one host address.
  std::vector<checker::Cell> breakout_cells() const {
    return {checker::Cell::of_reg(lang::general(1)), checker::Cell::of_mem(12)};
  }
  // Index register r1 and a heap cell past the bound.
  std::vector<checker::Cell> poisoning_cells() const {
    return {checker::Cell::of_reg(lang::general(1)), checker::Cell::of_mem(5)};
  }
  std::vector<checker::Cell> ctleak_cells() const {
    return {checker::Cell::of_reg(lang::general(1)), checker::Cell::of_mem(1)};
  }
};

Outcome breakout_violation(const Corpus& k) {
  Outcome o;
  checker::CheckOptions opts;
  opts.oracle_class = OracleClass::kDirectionOnly;
  opts.steps = 10;
  const auto v = checker::check_breakout(
      k.breakout, k.breakout_layout, space_over(k.breakout, k.breakout_layout, k.breakout_cells()),
      opts);
  const auto* viol = std::get_if<checker::Violation>(&v);
  if (viol == nullptr) {
    o.fail("no violation found");
    return o;
  }
  const auto r = checker::replay(*viol, k.breakout, k.breakout_layout);
  const auto& t1 = r.run1.final.obs.of(LeakModel::kArch);
  const auto& t2 = r.run2.final.obs.of(LeakModel::kArch);
  const std::size_t d = checker::first_difference(t1, t2);
  if (d == 0 || d >= t1.size() || d >= t2.size() ||
      t1[d].kind != Observation::Kind::kMemVal || t2[d].kind != Observation::Kind::kMemVal ||
      t1[d - 1] != t2[d - 1] || t1[d - 1].kind != Observation::Kind::kMemAddr ||
      !k.breakout_layout.is_host(t1[d - 1].value)) {
    o.fail("replay does not show a host MemVal difference");
    return o;
  }
  std::ostringstream ss;
  ss << "script " << oracles::render_script(viol->script) << ", "
     << checker::render_assignment(viol->init1) << " vs "
     << checker::render_assignment(viol->init2) << ", host address " << t1[d - 1].value;
  o.detail = ss.str();
  return o;
}

Outcome sfi_breakout_secure(const Corpus& k) {
  Outcome o;
  const auto sfi = share(hardening::lower_swivel_sfi(*k.breakout, k.breakout_layout).program);
  const auto space = space_over(sfi, k.breakout_layout, k.breakout_cells());
  checker::CheckOptions opts;
  opts.oracle_class = OracleClass::kHistoricallyValidBTB;
  opts.steps = 10;
  const auto v = checker::check_breakout(sfi, k.breakout_layout, space, opts);
  const auto* s = std::get_if<checker::SecureUpTo>(&v);
  if (s == nullptr) {
    o.fail(std::holds_alternative<checker::Violation>(v) ? "violation" : "budget exceeded");
    return o;
  }
  if (s->states != space.size() || s->oracles == 0) {
    o.fail("coverage not exhaustive");
    return o;
  }
  o.detail = std::to_string(s->states) + " states x " + std::to_string(s->oracles) +
             " oracles, " + std::to_string(s->comparisons) + " comparisons";
  return o;
}

Outcome poisoning_violation(const Corpus& k) {
  Outcome o;
  checker::CheckOptions opts;
  opts.model = LeakModel::kCt;
  opts.oracle_class = OracleClass::kDirectionOnly;
  opts.steps = 10;
  const auto v = checker::check_poisoning(
      k.poisoning, k.poisoning_layout,
      space_over(k.poisoning, k.poisoning_layout, k.poisoning_cells()), opts);
  const auto* viol = std::get_if<checker::Violation>(&v);
  if (viol == nullptr) {
    o.fail("no violation found");
    return o;
  }
  const auto arch = checker::replay_correct(*viol, k.poisoning, k.poisoning_layout);
  const auto spec = checker::replay(*viol, k.poisoning, k.poisoning_layout);
  if (arch.run1.final.obs.of(LeakModel::kCt) != arch.run2.final.obs.of(LeakModel::kCt)) {
    o.fail("architectural ct traces differ");
  } else if (spec.run1.final.obs.of(LeakModel::kCt) == spec.run2.final.obs.of(LeakModel::kCt)) {
    o.fail("speculative ct traces agree");
  } else {
    o.detail = "script " + oracles::render_script(viol->script) + ", " +
               checker::render_assignment(viol->init1) + " vs " +
               checker::render_assignment(viol->init2);
  }
  return o;
}

Outcome cet_poisoning(const Corpus& k) {
  Outcome o;
  const auto lowered =
      share(hardening::lower_swivel_cet(*k.poisoning, k.poisoning_layout).program);
  checker::CheckOptions opts;
  opts.mode = SpecMode::kCet;
  opts.steps = 24;
  opts.model = LeakModel::kDmem;
  opts.oracle_class = OracleClass::kDirectionOnly;
  const auto v = checker::check_poisoning(
      lowered, k.poisoning_layout, space_over(lowered, k.poisoning_layout, k.poisoning_cells()),
      opts);
  if (!std::holds_alternative<checker::SecureUpTo>(v)) {
    o.fail("CET-lowered poisoning is not dmem-secure");
    return o;
  }

  const auto leak = share(hardening::lower_swivel_cet(*k.ctleak, k.poisoning_layout).program);
  opts.model = LeakModel::kCt;
  const auto w = checker::check_poisoning(
      leak, k.poisoning_layout, space_over(leak, k.poisoning_layout, k.ctleak_cells()), opts);
  const auto* viol = std::get_if<checker::Violation>(&w);
  if (viol == nullptr) {
    o.fail("no ct violation on the CET-lowered control-flow leak");
    return o;
  }
  if (viol->divergence_index >= viol->trace1.size() ||
      viol->trace1[viol->divergence_index].kind != Observation::Kind::kJumpTarget ||
      !viol->mispredicted_at_divergence) {
    o.fail("divergence is not a jump target after misprediction");
    return o;
  }
  o.detail = "dmem secure (" + std::to_string(std::get<checker::SecureUpTo>(v).states) +
             " states); ct leak at J " +
             std::to_string(viol->trace1[viol->divergence_index].value) + " vs J " +
             std::to_string(viol->trace2[viol->divergence_index].value);
  return o;
}

// After an interlock fires on a mispredicted path, no memory access goes
// through the interlocked bases.
Outcome interlock_invariant(const Corpus& k) {
  Outcome o;
  struct Case {
    std::shared_ptr<const Program> src;
    const MemoryLayout* layout;
    std::vector<checker::Cell> cells;
  };
  // The breakout layout is too small for the CET interlock (no guard run
  // wide enough for the trap), so the CET corpus is the w = 5 programs.
  const std::vector<Case> cases = {
      {k.poisoning, &k.poisoning_layout, k.poisoning_cells()},
      {k.ctleak, &k.poisoning_layout, k.ctleak_cells()},
  };
  std::size_t runs = 0, fired = 0;
  for (const auto& c : cases) {
    const auto lowered = hardening::lower_swivel_cet(*c.src, *c.layout);
    const auto prog = share(lowered.program);
    std::map<Value, Value> head_of;  // interlock address -> block label
    for (const auto& b : lowered.map.blocks) {
      for (Value a = b.start + 1; a < b.start + b.size; ++a) {
        const auto* as = std::get_if<lang::Assign>(prog->at(a));
        if (as == nullptr || !as->value.mentions(Reg::kLabel) ||
            !as->value.mentions(as->dst)) {
          break;
        }
        head_of[a] = b.label;
      }
    }
    const auto space = space_over(prog, *c.layout, c.cells);
    std::vector<Config> states;
    for (std::size_t i = 0; i < space.size(); ++i) states.push_back(space.state(i));
    for (auto cls : {OracleClass::kDirectionOnly, OracleClass::kHistoricallyValidBTB}) {
      oracles::EnumerateOptions eo;
      eo.mode = SpecMode::kCet;
      const auto scripts = oracles::enumerate_oracles(cls, states, *c.layout, 24, eo);
      for (const auto& script : scripts.scripts) {
        for (const auto& s : states) {
          ClassOracle oracle(cls, script);
          bool locked = false;
          ++runs;
          speculation::run_spec(s, *c.layout, oracle, 24, SpecMode::kCet,
                                [&](const Config& before, const Config& after) {
            const Instruction& insn = *before.instruction();
            if (locked) {
              Reg base = Reg::kR0;
              if (const auto* l = std::get_if<lang::Load>(&insn)) base = l->base;
              if (const auto* st = std::get_if<lang::Store>(&insn)) base = st->base;
              const bool stack_op = lang::is_call(insn) || lang::is_return(insn);
              const auto& ob = after.obs.of(LeakModel::kArch);
              const bool new_addr =
                  std::any_of(ob.begin() + before.obs.of(LeakModel::kArch).size(), ob.end(),
                              [](const Observation& x) {
                                return x.kind == Observation::Kind::kMemAddr;
                              });
              if (new_addr && (base == Reg::kHeap || base == Reg::kStk || stack_op)) {
                o.fail("access through an interlocked base at lowered pc " +
                       std::to_string(before.pc));
              }
            }
            auto it = head_of.find(before.pc);
            if (it != head_of.end() && before.mispredicted &&
                before.reg(Reg::kLabel) != it->second) {
              if (!locked) ++fired;
              locked = true;
            }
          });
        }
      }
    }
  }
  if (fired == 0) o.fail("no interlock fired after a misprediction");
  if (o.pass) {
    o.detail = std::to_string(runs) + " runs, interlock fired in " + std::to_string(fired);
  }
  return o;
}

Outcome cet_cfi() {
  Outcome o;
  testing::Rng rng(108);
  const auto& layout = testing::wasm_layout();
  std::size_t forward = 0, returns = 0;
  for (int i = 0; i < 1000 && o.pass; ++i) {
    const auto src = testing::random_wasm_program(rng);
    const auto prog = share(hardening::lower_swivel_cet(src, layout).program);
    const Config c = testing::random_wasm_state(rng, prog);
    const auto cls = static_cast<OracleClass>(1 + i % 3);
    oracles::DecisionScript script;
    for (int k = 0; k < 12; ++k) {
      if (cls == OracleClass::kScriptedAdversary && rng() % 4 == 0) {
        script.push_back(oracles::Choice::address(rng() % layout.width().cardinality()));
      } else {
        script.push_back(oracles::Choice::index(rng() % 3));
      }
    }
    ClassOracle oracle(cls, script);
    speculation::run_spec(c, layout, oracle, 400, SpecMode::kCet,
                          [&](const Config& before, const Config& after) {
      const Instruction& insn = *before.instruction();
      if (lang::is_return(insn)) {
        ++returns;
        if (after.pc != before.load(before.reg(Reg::kSStk))) {
          o.fail("return does not match the shadow stack in run " + std::to_string(i));
        }
      } else if (lang::is_control_flow(insn)) {
        ++forward;
        const Instruction* t = prog->at(after.pc);
        if (t == nullptr || !std::holds_alternative<lang::EndBranch>(*t)) {
          o.fail("forward edge to a non-endbranch in run " + std::to_string(i));
        }
      }
    });
  }
  if (o.pass) {
    o.detail = "1000 runs, " + std::to_string(forward) + " forward edges, " +
               std::to_string(returns) + " returns";
  }
  return o;
}

// Hand-written tiny instances that do have violations, next to random ones.
const char* const kTinyPrograms[] = {
    // Breakout at w = 3: host address 7 read through an attacker heap base.
    ".width 3\njmp +4 if r3\nrH := r1\njmp +2 if r3 == 0\nr2 := [rH + 1]\n",
    // Out-of-bounds index feeding a second load.
    ".width 3\njmp +3 if r1 >= 1\nr2 := [rH + r1]\nr3 := [rH + r2]\n",
    // Indirect jump whose history target differs from the current one.
    ".width 3\njmp r1\nr2 := [rH + 0]\njmp r1\nr3 := [rStk + 0]\n",
};

Outcome naive_agreement() {
  Outcome o;
  testing::Rng rng(109);
  const auto layout = testing::small_layout(3);
  int instances = 0, violations = 0;
  auto run_instance = [&](std::shared_ptr<const Program> p, OracleClass cls,
                          checker::Property property, LeakModel model, bool strict) {
    checker::CheckOptions opts;
    opts.oracle_class = cls;
    opts.steps = cls == OracleClass::kDirectionOnly ? 6 : 5;
    opts.model = model;
    opts.strict = strict;
    const unsigned alphabet = cls == OracleClass::kDirectionOnly ? 2 : opts.steps;
    const checker::StateSpace space =
        space_over(p, layout,
                   {checker::Cell::of_reg(lang::general(1)),
                    checker::Cell::of_mem(property == checker::Property::kBreakout ? 7 : 1)});
    const auto verdict = checker::check(property, p, layout, space, opts);
    const auto naive = testing::naive_check(property, p, layout, space, opts, alphabet);
    ++instances;
    const auto* viol = std::get_if<checker::Violation>(&verdict);
    if (std::holds_alternative<checker::BudgetExceeded>(verdict)) {
      o.fail("budget exceeded on a tiny instance");
    } else if ((viol != nullptr) != !naive.violating.empty()) {
      o.fail("verdicts differ on instance " + std::to_string(instances) + ":\n" +
             lang::render_program(*p));
    } else if (viol != nullptr) {
      ++violations;
      auto index_of = [&](const checker::Assignment& a) {
        for (std::size_t s = 0; s < space.size(); ++s) {
          const auto b = space.assignment(s);
          if (std::is_permutation(a.begin(), a.end(), b.begin(), b.end())) return s;
        }
        return space.size();
      };
      std::size_t x = index_of(viol->init1), y = index_of(viol->init2);
      if (x > y) std::swap(x, y);
      if (!naive.violating.count({x, y})) {
        o.fail("reported pair is not a naive violation on instance " +
               std::to_string(instances));
      }
    }
  };
  for (const char* text : kTinyPrograms) {
    const auto p = share(lang::parse_program(text));
    for (int c = 1; c <= 3; ++c) {
      run_instance(p, static_cast<OracleClass>(c), checker::Property::kBreakout,
                   LeakModel::kArch, false);
      run_instance(p, static_cast<OracleClass>(c), checker::Property::kPoisoning,
                   LeakModel::kCt, false);
    }
  }
  for (int i = 0; i < 40 && o.pass; ++i) {
    run_instance(share(testing::random_program(rng, 3, 6)), static_cast<OracleClass>(1 + i % 3),
                 i % 2 ? checker::Property::kPoisoning : checker::Property::kBreakout,
                 static_cast<LeakModel>(rng() % 3), rng() % 4 == 0);
  }
  if (o.pass) {
    o.detail = std::to_string(instances) + " instances, " + std::to_string(violations) +
               " with violations";
  }
  return o;
}

bool same_visible(const testing::Visible& a, const testing::Visible& b,
                  const MemoryLayout& layout, std::string& why) {
  if (a.accesses != b.accesses) {
    why = "access sequences differ";
    return false;
  }
  const bool ha = a.run.stuck && a.run.stuck->reason == machine::StuckReason::kHalt;
  const bool hb = b.run.stuck && b.run.stuck->reason == machine::StuckReason::kHalt;
  if (ha != hb) {
    why = "termination differs";
    return false;
  }
  for (unsigned r = 0; r < 8; ++r) {
    if (a.run.final.reg(lang::general(r)) != b.run.final.reg(lang::general(r))) {
      why = "r" + std::to_string(r) + " differs";
      return false;
    }
  }
  for (Reg r : {Reg::kHeap, Reg::kStk}) {
    if (a.run.final.reg(r) != b.run.final.reg(r)) {
      why = std::string(lang::reg_name(r)) + " differs";
      return false;
    }
  }
  for (auto region : {machine::Region::kHeap, machine::Region::kGlobals}) {
    const auto& range = layout.region(region);
    for (Value x = range.start; x < range.end(); ++x) {
      if (a.run.final.load(x) != b.run.final.load(x)) {
        why = "memory at " + std::to_string(x) + " differs";
        return false;
      }
    }
  }
  return true;
}

Outcome cosimulation() {
  Outcome o;
  testing::Rng rng(110);
  const auto& layout = testing::wasm_layout();
  for (int i = 0; i < 100 && o.pass; ++i) {
    const auto src = share(testing::random_wasm_program(rng));
    const Config start = testing::random_wasm_state(rng, src);
    const auto ref = testing::visible_run(start, layout, 200);
    if (!ref.run.stuck || ref.run.stuck->reason != machine::StuckReason::kHalt) {
      o.fail("source program " + std::to_string(i) + " does not halt");
      break;
    }
    for (auto pass : {hardening::Pass::kMask, hardening::Pass::kSfi, hardening::Pass::kCet}) {
      const auto lowered = share(hardening::harden(*src, layout, pass).program);
      Config c = machine::initial_config(lowered, layout);
      c.regs = start.regs;
      for (auto region : {machine::Region::kHeap, machine::Region::kStack,
                          machine::Region::kGlobals}) {
        const auto& range = layout.region(region);
        for (Value x = range.start; x < range.end(); ++x) c.store(x, start.load(x));
      }
      testing::Visible got;
      if (pass == hardening::Pass::kCet) {
        // Architectural behaviour under the CET checks: a correct predictor.
        got = testing::visible_run(c, layout, 2000);
        ClassOracle oracle(OracleClass::kAlwaysCorrect);
        const auto cet = speculation::run_spec(c, layout, oracle, 2000, SpecMode::kCet);
        if (cet.stuck != got.run.stuck || cet.final.regs != got.run.final.regs) {
          o.fail("CET checks change the run of program " + std::to_string(i));
          break;
        }
      } else {
        got = testing::visible_run(c, layout, 2000);
      }
      std::string why;
      if (!same_visible(ref, got, layout, why)) {
        o.fail(std::string(hardening::pass_name(pass)) + " changes program " +
               std::to_string(i) + ": " + why + "\n" + lang::render_program(*src));
        break;
      }
    }
  }
  if (o.pass) o.detail = "100 programs x 3 passes";
  return o;
}

}  // namespace

int main() {
  const Corpus corpus;
  bool ok = true;
  ok &= report(1, "correct-oracle equivalence", 10, correct_oracle_equivalence);
  ok &= report(2, "projection laws", 0, projection_laws);
  ok &= report(3, "breakout violation with host MemVal difference", 60,
               [&] { return breakout_violation(corpus); });
  ok &= report(4, "SFI-lowered breakout secure under HVBTB", 300,
               [&] { return sfi_breakout_secure(corpus); });
  ok &= report(5, "poisoning violation under ct", 60, [&] { return poisoning_violation(corpus); });
  ok &= report(6, "CET poisoning dmem-secure; CET ct leak via jump target", 0,
               [&] { return cet_poisoning(corpus); });
  ok &= report(7, "interlock invariant over the CET-lowered corpus", 0,
               [&] { return interlock_invariant(corpus); });
  ok &= report(8, "CET forward edges land on endbranch; returns match shadow stack", 0,
               cet_cfi);
  ok &= report(9, "checker agrees with the naive reference", 0, naive_agreement);
  ok &= report(10, "co-simulation of the hardening passes", 0, cosimulation);
  return ok ? 0 : 1;
}
