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

#include "zfi/lang/ast.hpp"

#include <string>

namespace zfi::lang {
namespace {

constexpr std::string_view kSpecialNames[] = {
    "rStk", "rH", "rSStk", "rSep", "rTbl", "rG", "rT", "rL", "rP",
};

constexpr std::string_view kGeneralNames[] = {
    "r0", "r1", "r2",  "r3",  "r4",  "r5",  "r6",  "r7",
    "r8", "r9", "r10", "r11", "r12", "r13", "r14", "r15",
};

}  // namespace

std::string_view reg_name(Reg r) {
  const auto i = index(r);
  if (i < index(Reg::kR0)) return kSpecialNames[i];
  return kGeneralNames[i - index(Reg::kR0)];
}

std::optional<Reg> reg_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumRegs; ++i) {
    if (reg_name(static_cast<Reg>(i)) == name) return static_cast<Reg>(i);
  }
  if (name == "rHeap") return Reg::kHeap;
  if (name == "rSepStk") return Reg::kSepStk;
  if (name == "rShadow") return Reg::kSStk;
  return std::nullopt;
}

std::string_view op_token(BinOp op) {
  switch (op) {
    case BinOp::kAdd: return "+";
    case BinOp::kSub: return "-";
    case BinOp::kMul: return "*";
    case BinOp::kAnd: return "and";
    case BinOp::kOr: return "or";
    case BinOp::kXor: return "xor";
    case BinOp::kShl: return "shl";
    case BinOp::kShr: return "shr";
    case BinOp::kLt: return "<";
    case BinOp::kEq: return "==";
    case BinOp::kNe: return "!=";
    case BinOp::kGe: return ">=";
    case BinOp::kMask: return "mask";
  }
  return "?";
}

Expr Expr::literal(Value v) {
  Expr e;
  e.kind_ = Kind::kLiteral;
  e.literal_ = v;
  return e;
}

Expr Expr::reg(Reg r) {
  Expr e;
  e.kind_ = Kind::kRegister;
  e.reg_ = r;
  return e;
}

Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind_ = Kind::kBinary;
  e.op_ = op;
  e.lhs_ = std::make_shared<const Expr>(std::move(lhs));
  e.rhs_ = std::make_shared<const Expr>(std::move(rhs));
  return e;
}

bool Expr::mentions(Reg r) const {
  bool found = false;
  for_each_reg([&](Reg x) { found = found || x == r; });
  return found;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Expr::Kind::kLiteral:
      return a.literal_ == b.literal_;
    case Expr::Kind::kRegister:
      return a.reg_ == b.reg_;
    case Expr::Kind::kBinary:
      return a.op_ == b.op_ && *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
  }
  return false;
}

Value eval_expr(const Expr& e, const RegisterFile& regs, Width w) {
  switch (e.kind()) {
    case Expr::Kind::kLiteral:
      return w.wrap(e.literal_value());
    case Expr::Kind::kRegister:
      return regs[index(e.register_id())];
    case Expr::Kind::kBinary:
      break;
  }
  const std::uint32_t a = eval_expr(e.lhs(), regs, w);
  const std::uint32_t b = eval_expr(e.rhs(), regs, w);
  switch (e.op()) {
    case BinOp::kAdd: return w.wrap(a + b);
    case BinOp::kSub: return w.wrap(a + w.cardinality() - b);
    case BinOp::kMul: return w.wrap(a * b);
    case BinOp::kAnd:
    case BinOp::kMask: return w.wrap(a & b);
    case BinOp::kOr: return w.wrap(a | b);
    case BinOp::kXor: return w.wrap(a ^ b);
    case BinOp::kShl: return b >= w.bits() ? 0 : w.wrap(a << b);
    case BinOp::kShr: return b >= w.bits() ? 0 : w.wrap(a >> b);
    case BinOp::kLt: return a < b ? 1 : 0;
    case BinOp::kEq: return a == b ? 1 : 0;
    case BinOp::kNe: return a != b ? 1 : 0;
    case BinOp::kGe: return a >= b ? 1 : 0;
  }
  return 0;
}

Expr substitute(const Expr& e, Reg from, Reg to) {
  switch (e.kind()) {
    case Expr::Kind::kLiteral:
      return e;
    case Expr::Kind::kRegister:
      return e.register_id() == from ? Expr::reg(to) : e;
    case Expr::Kind::kBinary:
      return Expr::binary(e.op(), substitute(e.lhs(), from, to),
                          substitute(e.rhs(), from, to));
  }
  return e;
}

bool is_control_flow(const Instruction& insn) {
  return std::holds_alternative<Jump>(insn) ||
         std::holds_alternative<JumpIf>(insn) ||
         std::holds_alternative<JumpInd>(insn) ||
         std::holds_alternative<Call>(insn) ||
         std::holds_alternative<CallInd>(insn) ||
         std::holds_alternative<Ret>(insn);
}

bool is_call(const Instruction& insn) {
  return std::holds_alternative<Call>(insn) ||
         std::holds_alternative<CallInd>(insn);
}

bool is_return(const Instruction& insn) {
  return std::holds_alternative<Ret>(insn);
}

std::optional<Reg> written_register(const Instruction& insn) {
  if (const auto* a = std::get_if<Assign>(&insn)) return a->dst;
  if (const auto* l = std::get_if<Load>(&insn)) return l->dst;
  return std::nullopt;
}

}  // namespace zfi::lang
