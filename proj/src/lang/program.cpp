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

#include <set>
#include <sstream>

#include "zfi/lang/program.hpp"

namespace zfi::lang {

Program::Program(Width w) : width_(w), code_(w.cardinality()) {}

void Program::insert(Value addr, Instruction insn) {
  auto& slot = code_[addr & width_.mask()];
  if (slot) {
    throw std::invalid_argument("duplicate address " + std::to_string(addr));
  }
  slot = std::move(insn);
  ++count_;
}

void Program::replace(Value addr, Instruction insn) {
  auto& slot = code_[addr & width_.mask()];
  if (!slot) ++count_;
  slot = std::move(insn);
}

Value Program::end() const {
  for (std::uint32_t a = width_.cardinality(); a-- > 0;) {
    if (code_[a]) return width_.wrap(a + 1);
  }
  return 0;
}

std::vector<Value> Program::addresses() const {
  std::vector<Value> out;
  out.reserve(count_);
  for (std::uint32_t a = 0; a < width_.cardinality(); ++a) {
    if (code_[a]) out.push_back(static_cast<Value>(a));
  }
  return out;
}

bool operator==(const Program& a, const Program& b) {
  return a.width_ == b.width_ && a.entry_ == b.entry_ && a.code_ == b.code_ &&
         a.pointers_ == b.pointers_;
}

namespace {

std::string operand(const Expr& e, Width w) {
  if (e.kind() == Expr::Kind::kBinary) return "(" + render_expr(e, w) + ")";
  return render_expr(e, w);
}

std::string displacement(Value d, Width w) {
  const int s = w.to_signed(d);
  return (s < 0 ? "-" : "+") + std::to_string(s < 0 ? -s : s);
}

std::string mem_operand(Reg base, const Expr& off, Width w) {
  return "[" + std::string(reg_name(base)) + " + " + operand(off, w) + "]";
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string render_expr(const Expr& e, Width w) {
  switch (e.kind()) {
    case Expr::Kind::kLiteral:
      return std::to_string(e.literal_value());
    case Expr::Kind::kRegister:
      return std::string(reg_name(e.register_id()));
    case Expr::Kind::kBinary:
      return operand(e.lhs(), w) + " " + std::string(op_token(e.op())) + " " +
             operand(e.rhs(), w);
  }
  return {};
}

std::string render_instruction(const Instruction& insn, Width w) {
  return std::visit(
      Overloaded{
          [&](const Assign& i) {
            return std::string(reg_name(i.dst)) + " := " +
                   render_expr(i.value, w);
          },
          [&](const Load& i) {
            return std::string(reg_name(i.dst)) + " := " +
                   mem_operand(i.base, i.offset, w);
          },
          [&](const Store& i) {
            return mem_operand(i.base, i.offset, w) + " := " +
                   render_expr(i.value, w);
          },
          [&](const Jump& i) { return "jmp " + displacement(i.disp, w); },
          [&](const JumpIf& i) {
            return "jmp " + displacement(i.disp, w) + " if " +
                   render_expr(i.cond, w);
          },
          [&](const JumpInd& i) {
            return "jmp " + std::string(reg_name(i.target));
          },
          [&](const Call& i) { return "call " + displacement(i.disp, w); },
          [&](const CallInd& i) {
            return "call " + std::string(reg_name(i.target));
          },
          [](const Ret&) { return std::string("ret"); },
          [](const Flush&) { return std::string("flush"); },
          [](const EndBranch&) { return std::string("endbranch"); },
      },
      insn);
}

std::string render_program(const Program& p) {
  std::ostringstream os;
  const Width w = p.width();
  os << ".width " << w.bits() << "\n";
  const auto addrs = p.addresses();
  if (addrs.empty() || p.entry() != addrs.front()) {
    os << ".entry " << p.entry() << "\n";
  }
  for (const auto& cp : p.code_pointers()) {
    os << ".elem " << cp.mem_addr << " " << cp.code_addr << "\n";
  }
  for (Value a : addrs) {
    os << a << ": " << render_instruction(*p.at(a), w) << "\n";
  }
  return os.str();
}

std::uint64_t program_hash(const Program& p) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : render_program(p)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Value direct_target(const Program& p, Value addr) {
  const Instruction* insn = p.at(addr);
  const Width w = p.width();
  if (insn == nullptr) return addr;
  if (const auto* j = std::get_if<Jump>(insn)) return w.wrap(addr + j->disp);
  if (const auto* j = std::get_if<JumpIf>(insn)) return w.wrap(addr + j->disp);
  if (const auto* c = std::get_if<Call>(insn)) return w.wrap(addr + c->disp);
  return addr;
}

std::vector<LinearBlock> split_linear_blocks(const Program& p) {
  const Width w = p.width();
  const auto addrs = p.addresses();
  std::set<Value> starts;
  auto mark = [&](std::uint32_t a) {
    if (a <= w.mask() && p.mapped(static_cast<Value>(a))) {
      starts.insert(static_cast<Value>(a));
    }
  };
  mark(p.entry());
  for (const auto& cp : p.code_pointers()) mark(cp.code_addr);
  for (std::size_t k = 0; k < addrs.size(); ++k) {
    const Value a = addrs[k];
    if (k == 0 || addrs[k - 1] + 1u != a) mark(a);
    const Instruction& insn = *p.at(a);
    if (std::holds_alternative<Jump>(insn) ||
        std::holds_alternative<JumpIf>(insn) ||
        std::holds_alternative<Call>(insn)) {
      mark(direct_target(p, a));
    }
    if (is_control_flow(insn)) mark(a + 1u);
  }

  std::vector<LinearBlock> blocks;
  for (Value a : addrs) {
    if (blocks.empty() || starts.count(a) || blocks.back().terminator) {
      blocks.push_back(LinearBlock{a, {}, std::nullopt});
    }
    auto& b = blocks.back();
    b.addrs.push_back(a);
    if (is_control_flow(*p.at(a))) b.terminator = a;
  }
  return blocks;
}

}  // namespace zfi::lang
