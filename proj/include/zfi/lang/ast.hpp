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

#ifndef ZFI_LANG_AST_HPP_
#define ZFI_LANG_AST_HPP_

#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "zfi/lang/value.hpp"

namespace zfi::lang {

enum class BinOp : std::uint8_t {
  kAdd,
  kSub,
  kMul,
  kAnd,
  kOr,
  kXor,
  kShl,
  kShr,
  kLt,
  kEq,
  kNe,
  kGe,
  kMask,  // truncate-mask: bitwise and with a region-size mask
};

std::string_view op_token(BinOp op);

// Immutable expression tree. Nodes are shared, so copies are cheap.
class Expr {
 public:
  enum class Kind : std::uint8_t { kLiteral, kRegister, kBinary };

  static Expr literal(Value v);
  static Expr reg(Reg r);
  static Expr binary(BinOp op, Expr lhs, Expr rhs);

  Kind kind() const { return kind_; }
  Value literal_value() const { return literal_; }
  Reg register_id() const { return reg_; }
  BinOp op() const { return op_; }
  const Expr& lhs() const { return *lhs_; }
  const Expr& rhs() const { return *rhs_; }

  bool is_literal() const { return kind_ == Kind::kLiteral; }
  bool mentions(Reg r) const;
  template <typename F>
  void for_each_reg(F&& f) const {
    switch (kind_) {
      case Kind::kLiteral:
        return;
      case Kind::kRegister:
        f(reg_);
        return;
      case Kind::kBinary:
        lhs_->for_each_reg(f);
        rhs_->for_each_reg(f);
        return;
    }
  }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  Expr() = default;

  Kind kind_ = Kind::kLiteral;
  Value literal_ = 0;
  Reg reg_ = Reg::kR0;
  BinOp op_ = BinOp::kAdd;
  std::shared_ptr<const Expr> lhs_;
  std::shared_ptr<const Expr> rhs_;
};

Value eval_expr(const Expr& e, const RegisterFile& regs, Width w);

// Renames every occurrence of `from` to `to`.
Expr substitute(const Expr& e, Reg from, Reg to);

// Convenience builders used by the hardening passes and tests.
inline Expr lit(Value v) { return Expr::literal(v); }
inline Expr reg(Reg r) { return Expr::reg(r); }
inline Expr bin(BinOp op, Expr a, Expr b) {
  return Expr::binary(op, std::move(a), std::move(b));
}

// ---------------------------------------------------------------------------
// Instructions. Relative displacements are w-bit two's-complement values.

struct Assign {
  Reg dst;
  Expr value;
  friend bool operator==(const Assign&, const Assign&) = default;
};
struct Load {
  Reg dst;
  Reg base;
  Expr offset;
  friend bool operator==(const Load&, const Load&) = default;
};
struct Store {
  Reg base;
  Expr offset;
  Expr value;
  friend bool operator==(const Store&, const Store&) = default;
};
struct Jump {
  Value disp;
  friend bool operator==(const Jump&, const Jump&) = default;
};
struct JumpIf {
  Value disp;
  Expr cond;
  friend bool operator==(const JumpIf&, const JumpIf&) = default;
};
struct JumpInd {
  Reg target;
  friend bool operator==(const JumpInd&, const JumpInd&) = default;
};
struct Call {
  Value disp;
  friend bool operator==(const Call&, const Call&) = default;
};
struct CallInd {
  Reg target;
  friend bool operator==(const CallInd&, const CallInd&) = default;
};
struct Ret {
  friend bool operator==(const Ret&, const Ret&) = default;
};
struct Flush {
  friend bool operator==(const Flush&, const Flush&) = default;
};
struct EndBranch {
  friend bool operator==(const EndBranch&, const EndBranch&) = default;
};

using Instruction = std::variant<Assign, Load, Store, Jump, JumpIf, JumpInd,
                                 Call, CallInd, Ret, Flush, EndBranch>;

bool is_control_flow(const Instruction& insn);
bool is_call(const Instruction& insn);
bool is_return(const Instruction& insn);

// Register written by the instruction itself (not counting rStk updates made
// by call/ret).
std::optional<Reg> written_register(const Instruction& insn);

}  // namespace zfi::lang

#endif  // ZFI_LANG_AST_HPP_
