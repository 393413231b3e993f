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

#include "support.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "zfi/leakage/leaks.hpp"
#include "zfi/speculation/spec_step.hpp"

namespace zfi::testing {

using namespace lang;

std::string corpus_path(const std::string& name) {
  return std::string(ZFI_CORPUS_DIR) + "/" + name;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::shared_ptr<const Program> load_corpus_program(const std::string& name) {
  return std::make_shared<Program>(parse_program(read_text(corpus_path(name))));
}

machine::MemoryLayout load_corpus_layout(const std::string& name) {
  return machine::MemoryLayout::from_json(read_text(corpus_path(name)));
}

machine::MemoryLayout small_layout(unsigned w) {
  const std::uint32_t hs = 1u << (w - 2);
  const std::uint32_t ss = std::max<std::uint32_t>(2, hs / 2);
  machine::MemoryLayout::Spec spec;
  spec.width = w;
  spec.regions[machine::Region::kHeap] = {1, hs};
  spec.regions[machine::Region::kStack] = {static_cast<Value>(hs + 2), ss};
  return machine::MemoryLayout(spec);
}

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

unsigned uniform(Rng& rng, unsigned lo, unsigned hi) {
  return std::uniform_int_distribution<unsigned>(lo, hi)(rng);
}

const std::vector<BinOp> kAllOps = {
    BinOp::kAdd, BinOp::kSub, BinOp::kMul, BinOp::kAnd, BinOp::kOr,
    BinOp::kXor, BinOp::kShl, BinOp::kShr, BinOp::kLt,  BinOp::kEq,
    BinOp::kNe,  BinOp::kGe,  BinOp::kMask,
};

Expr random_expr(Rng& rng, Width w, const std::vector<Reg>& regs, int depth) {
  const unsigned k = uniform(rng, 0, depth > 0 ? 4 : 1);
  if (k == 0) return lit(w.wrap(rng()));
  if (k == 1) return reg(pick(rng, regs));
  return bin(pick(rng, kAllOps), random_expr(rng, w, regs, depth - 1),
             random_expr(rng, w, regs, depth - 1));
}

}  // namespace

Program random_program(Rng& rng, unsigned w, unsigned max_len) {
  const Width width(w);
  const std::vector<Reg> regs = {general(0), general(1), general(2),
                                 general(3), Reg::kStk,  Reg::kHeap};
  const std::vector<Reg> bases = {Reg::kHeap, Reg::kStk, general(1)};
  const unsigned len = uniform(rng, 1, std::min(max_len, width.cardinality()));
  Program p(width);
  auto disp = [&] {
    const int d = static_cast<int>(uniform(rng, 0, 2 * len + 2)) -
                  static_cast<int>(len);
    return width.from_signed(d == 0 ? 1 : d);
  };
  for (unsigned a = 0; a < len; ++a) {
    Instruction insn = Ret{};
    switch (uniform(rng, 0, 13)) {
      case 0:
      case 1:
        insn = Assign{pick(rng, regs), random_expr(rng, width, regs, 2)};
        break;
      case 2:
      case 3:
        insn = Load{pick(rng, regs), pick(rng, bases),
                    random_expr(rng, width, regs, 1)};
        break;
      case 4:
        insn = Store{pick(rng, bases), random_expr(rng, width, regs, 1),
                     random_expr(rng, width, regs, 1)};
        break;
      case 5: insn = Jump{disp()}; break;
      case 6:
      case 7:
        insn = JumpIf{disp(), random_expr(rng, width, regs, 2)};
        break;
      case 8: insn = JumpInd{pick(rng, regs)}; break;
      case 9: insn = Call{disp()}; break;
      case 10: insn = CallInd{pick(rng, regs)}; break;
      case 11: insn = Ret{}; break;
      case 12: insn = Flush{}; break;
      default: insn = EndBranch{}; break;
    }
    p.insert(static_cast<Value>(a), std::move(insn));
  }
  return p;
}

machine::Config random_state(Rng& rng, std::shared_ptr<const Program> p,
                             const machine::MemoryLayout& layout) {
  machine::Config c = machine::initial_config(p, layout);
  const Width w = c.width();
  for (unsigned i = 0; i < 4; ++i) c.set_reg(general(i), w.wrap(rng()));
  for (auto& cell : c.mem) cell = w.wrap(rng());
  return c;
}

const machine::MemoryLayout& wasm_layout() {
  static const machine::MemoryLayout layout = [] {
    machine::MemoryLayout::Spec spec;
    spec.width = 7;
    spec.regions[machine::Region::kHeap] = {1, 16};
    spec.regions[machine::Region::kStack] = {18, 8};
    spec.regions[machine::Region::kGlobals] = {27, 4};
    spec.regions[machine::Region::kJumpTable] = {32, 4};
    spec.regions[machine::Region::kSeparateStack] = {37, 8};
    spec.regions[machine::Region::kShadowStack] = {46, 8};
    spec.extra_guard.push_back({96, 32});
    spec.trap = 97;
    spec.registers[Reg::kStk] = 22;
    return machine::MemoryLayout(spec);
  }();
  return layout;
}

namespace {

std::string wasm_expr(Rng& rng, int depth) {
  static const std::vector<std::string> ops = {
      "+", "-", "*", "and", "or", "xor", "shl", "shr", "<", "==", "!=", ">="};
  const unsigned k = uniform(rng, 0, depth > 0 ? 3 : 1);
  if (k == 0) return std::to_string(uniform(rng, 0, 127));
  if (k == 1) return "r" + std::to_string(uniform(rng, 0, 7));
  return "(" + wasm_expr(rng, depth - 1) + " " + pick(rng, ops) + " " +
         wasm_expr(rng, depth - 1) + ")";
}

std::string heap_offset(Rng& rng) {
  if (uniform(rng, 0, 2) == 0) return std::to_string(uniform(rng, 0, 15));
  return "(" + wasm_expr(rng, 1) + " and 15)";
}

std::string wasm_body_insn(Rng& rng, bool in_function) {
  const std::string dst = "r" + std::to_string(uniform(rng, 0, 7));
  const unsigned k = in_function ? uniform(rng, 1, 2) : uniform(rng, 0, 3);
  switch (uniform(rng, 0, 6)) {
    case 0:
    case 1: return dst + " := " + wasm_expr(rng, 2);
    case 2: return dst + " := [rH + " + heap_offset(rng) + "]";
    case 3: return "[rH + " + heap_offset(rng) + "] := " + wasm_expr(rng, 1);
    case 4: return dst + " := [rStk + " + std::to_string(k) + "]";
    case 5: return "[rStk + " + std::to_string(k) + "] := " + wasm_expr(rng, 1);
    default:
      if (uniform(rng, 0, 1)) {
        return dst + " := [rG + " + std::to_string(uniform(rng, 0, 3)) + "]";
      }
      return "[rG + " + std::to_string(uniform(rng, 0, 3)) + "] := " +
             wasm_expr(rng, 1);
  }
}

}  // namespace

Program random_wasm_program(Rng& rng) {
  const unsigned num_fns = uniform(rng, 0, 2);
  const unsigned num_blocks = uniform(rng, 2, 3);
  std::ostringstream src;
  src << ".width 7\n";
  for (unsigned e = 0; num_fns > 0 && e < 4; ++e) {
    src << ".elem " << 32 + e << " f" << e % num_fns << "\n";
  }
  for (unsigned b = 0; b < num_blocks; ++b) {
    src << "b" << b << ":\n";
    for (unsigned i = uniform(rng, 1, 3); i > 0; --i) {
      src << "  " << wasm_body_insn(rng, false) << "\n";
    }
    const std::string later =
        b + 1 < num_blocks ? "b" + std::to_string(uniform(rng, b + 1, num_blocks - 1))
                           : "main_end";
    switch (uniform(rng, 0, num_fns > 0 ? 4 : 2)) {
      case 0: break;
      case 1: src << "  jmp " << later << " if " << wasm_expr(rng, 1) << "\n"; break;
      case 2: src << "  jmp " << later << "\n"; break;
      case 3: src << "  call f" << uniform(rng, 0, num_fns - 1) << "\n"; break;
      default:
        src << "  r15 := [rTbl + (" << wasm_expr(rng, 1) << " and 3)]\n";
        src << "  call r15\n";
        break;
    }
  }
  src << "main_end:\n";
  if (num_fns > 0) src << "  jmp end\n";
  for (unsigned f = 0; f < num_fns; ++f) {
    src << "f" << f << ":\n";
    for (unsigned i = uniform(rng, 1, 2); i > 0; --i) {
      src << "  " << wasm_body_insn(rng, true) << "\n";
    }
    if (uniform(rng, 0, 2) == 0) {
      src << "  jmp f" << f << "_ret if " << wasm_expr(rng, 1) << "\n";
      src << "  " << wasm_body_insn(rng, true) << "\n";
    }
    src << "f" << f << "_ret:\n  ret\n";
  }
  src << "end:\n";
  return parse_program(src.str());
}

machine::Config random_wasm_state(Rng& rng, std::shared_ptr<const Program> p) {
  const auto& layout = wasm_layout();
  machine::Config c = machine::initial_config(p, layout);
  for (unsigned i = 0; i < 8; ++i) c.set_reg(general(i), c.width().wrap(rng()));
  for (machine::Region r : {machine::Region::kHeap, machine::Region::kStack,
                            machine::Region::kGlobals}) {
    const auto& range = layout.region(r);
    for (std::uint32_t a = range.start; a < range.end(); ++a) {
      c.store(static_cast<Value>(a), c.width().wrap(rng()));
    }
  }
  return c;
}

Visible visible_run(const machine::Config& start, const machine::MemoryLayout& layout,
                    unsigned max_steps) {
  Visible v;
  auto observe = [&](const machine::Config& before, const machine::Config&) {
    const Instruction& insn = *before.instruction();
    auto sandbox_base = [](Reg r) {
      return r == Reg::kHeap || r == Reg::kStk || r == Reg::kGlobals ||
             r == Reg::kTable;
    };
    const Width w = before.width();
    if (const auto* l = std::get_if<Load>(&insn)) {
      if (sandbox_base(l->base) && !is_pass_reserved(l->dst)) {
        v.accesses.emplace_back(
            false, w.wrap(before.reg(l->base) + eval_expr(l->offset, before.regs, w)));
      }
    } else if (const auto* s = std::get_if<Store>(&insn)) {
      if (sandbox_base(s->base)) {
        v.accesses.emplace_back(
            true, w.wrap(before.reg(s->base) + eval_expr(s->offset, before.regs, w)));
      }
    }
  };
  v.run = machine::run_arch(start, layout, max_steps, observe);
  return v;
}

namespace {

// Straightforward re-statement of the class rules.
class NaiveOracle final : public speculation::Oracle {
 public:
  NaiveOracle(oracles::OracleClass cls, std::vector<unsigned> choices)
      : cls_(cls), choices_(std::move(choices)) {}

  speculation::Prediction predict(const machine::Config& c, Value arch) override {
    std::vector<Value> allowed;
    auto add = [&](Value v) {
      for (Value x : allowed) {
        if (x == v) return;
      }
      allowed.push_back(v);
    };
    const Instruction& insn = *c.instruction();
    const bool indirect = std::holds_alternative<JumpInd>(insn) ||
                          std::holds_alternative<CallInd>(insn);
    if (cls_ != oracles::OracleClass::kAlwaysCorrect) {
      if (const auto* j = std::get_if<JumpIf>(&insn)) {
        add(c.width().wrap(c.pc + j->disp));
        add(c.width().wrap(c.pc + 1));
      }
      if (indirect && (cls_ == oracles::OracleClass::kHistoricallyValidBTB ||
                       cls_ == oracles::OracleClass::kScriptedAdversary)) {
        if (c.mu_state.btb_history.count(c.pc)) {
          for (Value v : c.mu_state.btb_history.at(c.pc)) add(v);
        }
      }
    }
    add(arch);
    Value out = arch;
    const bool consume =
        cls_ == oracles::OracleClass::kScriptedAdversary || allowed.size() > 1;
    if (consume && next_ < choices_.size()) {
      const unsigned i = choices_[next_++];
      out = allowed[i < allowed.size() ? i : allowed.size() - 1];
    }
    speculation::OracleState s = c.mu_state;
    if (indirect) {
      auto& h = s.btb_history[c.pc];
      bool seen = false;
      for (Value v : h) seen = seen || v == arch;
      if (!seen) h.push_back(arch);
    }
    return {out, s};
  }

 private:
  oracles::OracleClass cls_;
  std::vector<unsigned> choices_;
  std::size_t next_ = 0;
};

struct RunSummary {
  leakage::Trace trace;
  std::size_t steps;
  bool stuck;
  int reason;
  bool same(const RunSummary& o, bool strict) const {
    if (trace != o.trace) return false;
    return !strict || (steps == o.steps && stuck == o.stuck && reason == o.reason);
  }
};

}  // namespace

NaiveResult naive_check(checker::Property property,
                        std::shared_ptr<const Program> program,
                        const machine::MemoryLayout& layout,
                        const checker::StateSpace& space,
                        const checker::CheckOptions& opts, unsigned alphabet) {
  NaiveResult out;
  const std::size_t n = space.size();
  std::vector<machine::Config> states;
  for (std::size_t i = 0; i < n; ++i) {
    states.push_back(space.state(i));
    states.back().program = program;
  }

  // Which pairs does the property relate?
  std::vector<std::vector<bool>> related(n, std::vector<bool>(n, false));
  std::vector<leakage::Trace> arch(n);
  if (property == checker::Property::kPoisoning) {
    for (std::size_t i = 0; i < n; ++i) {
      arch[i] = machine::run_arch(states[i], layout, opts.steps).final.obs.of(opts.model);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      related[i][j] = property == checker::Property::kBreakout
                          ? checker::mem_equiv(states[i], states[j], layout)
                          : arch[i] == arch[j];
    }
  }

  std::vector<unsigned> choices(opts.steps, 0);
  const std::size_t num_scripts = [&] {
    std::size_t k = 1;
    for (unsigned s = 0; s < opts.steps; ++s) k *= alphabet;
    return k;
  }();
  for (std::size_t code = 0; code < num_scripts; ++code) {
    std::size_t rest = code;
    for (auto& ch : choices) {
      ch = static_cast<unsigned>(rest % alphabet);
      rest /= alphabet;
    }
    std::vector<RunSummary> runs;
    for (const auto& s : states) {
      NaiveOracle oracle(opts.oracle_class, choices);
      auto r = speculation::run_spec(s, layout, oracle, opts.steps, opts.mode);
      runs.push_back({r.final.obs.of(opts.model), r.steps.size(), r.stuck.has_value(),
                      r.stuck ? static_cast<int>(r.stuck->reason) : -1});
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (related[i][j] && !runs[i].same(runs[j], opts.strict)) {
          out.violating.emplace(i, j);
        }
      }
    }
  }
  return out;
}

}  // namespace zfi::testing
