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

#include "zfi/hardening/passes.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

namespace zfi::hardening {
namespace {

using namespace lang;

std::string where(Value addr, const Instruction& insn, Width w) {
  return "at " + std::to_string(addr) + " (" + render_instruction(insn, w) +
         ")";
}

bool already_masked(const Expr& e, Value mask) {
  return e.kind() == Expr::Kind::kBinary && e.op() == BinOp::kMask &&
         e.rhs().is_literal() && e.rhs().literal_value() == mask;
}

Expr mask_offset(const Expr& e, Value mask) {
  if (e.is_literal() && e.literal_value() <= mask) return e;
  if (already_masked(e, mask)) return e;
  return bin(BinOp::kMask, e, lit(mask));
}

// Masks one memory operand in place, validating its base register.
void harden_operand(Reg base, Expr& off, const MemoryLayout& layout,
                    const std::string& at) {
  switch (base) {
    case Reg::kHeap:
      off = mask_offset(off, layout.heap_mask());
      return;
    case Reg::kTable:
      if (layout.region(machine::Region::kJumpTable).empty()) {
        throw HardeningError("jump-table access without a jump_table region " +
                             at);
      }
      off = mask_offset(off, layout.table_mask());
      return;
    case Reg::kStk:
    case Reg::kGlobals:
      if (!off.is_literal()) {
        throw HardeningError("non-constant stack/globals offset " + at);
      }
      return;
    default:
      throw HardeningError("memory access through " +
                           std::string(reg_name(base)) +
                           " is not a sandbox region base " + at);
  }
}

Instruction mask_instruction(const Instruction& insn, const MemoryLayout& layout,
                             const std::string& at) {
  Instruction out = insn;
  if (auto* l = std::get_if<Load>(&out)) {
    harden_operand(l->base, l->offset, layout, at);
  } else if (auto* s = std::get_if<Store>(&out)) {
    harden_operand(s->base, s->offset, layout, at);
  }
  return out;
}

void check_pinned(const Instruction& insn, const std::string& at) {
  if (written_register(insn) == Reg::kHeap) {
    throw HardeningError("heap base register is written " + at);
  }
  if (const auto* s = std::get_if<Store>(&insn)) {
    if (s->value.mentions(Reg::kHeap)) {
      throw HardeningError("heap base register is spilled " + at);
    }
  }
}

bool uses_heap_base_as_value(const Instruction& insn) {
  if (written_register(insn) == Reg::kHeap) return true;
  bool found = false;
  auto scan = [&](const Expr& e) { found = found || e.mentions(Reg::kHeap); };
  std::visit(
      [&](const auto& i) {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, Assign>) scan(i.value);
        if constexpr (std::is_same_v<T, Load>) scan(i.offset);
        if constexpr (std::is_same_v<T, Store>) {
          scan(i.offset);
          scan(i.value);
        }
        if constexpr (std::is_same_v<T, JumpIf>) scan(i.cond);
        if constexpr (std::is_same_v<T, JumpInd> || std::is_same_v<T, CallInd>) {
          found = found || i.target == Reg::kHeap;
        }
      },
      insn);
  return found;
}

// Renames every non-base occurrence of the heap base to the pinned copy.
Instruction rename_heap_base(const Instruction& insn) {
  auto sub = [](const Expr& e) { return substitute(e, Reg::kHeap, Reg::kPinned); };
  auto dst = [](Reg r) { return r == Reg::kHeap ? Reg::kPinned : r; };
  return std::visit(
      [&](const auto& i) -> Instruction {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, Assign>) {
          return Assign{dst(i.dst), sub(i.value)};
        } else if constexpr (std::is_same_v<T, Load>) {
          return Load{dst(i.dst), i.base, sub(i.offset)};
        } else if constexpr (std::is_same_v<T, Store>) {
          return Store{i.base, sub(i.offset), sub(i.value)};
        } else if constexpr (std::is_same_v<T, JumpIf>) {
          return JumpIf{i.disp, sub(i.cond)};
        } else if constexpr (std::is_same_v<T, JumpInd>) {
          return JumpInd{dst(i.target)};
        } else if constexpr (std::is_same_v<T, CallInd>) {
          return CallInd{dst(i.target)};
        } else {
          return i;
        }
      },
      insn);
}

Value max_literal_offset(const Program& p) {
  Value m = 0;
  for (Value a : p.addresses()) {
    const Instruction& insn = *p.at(a);
    const Expr* off = nullptr;
    if (const auto* l = std::get_if<Load>(&insn)) off = &l->offset;
    if (const auto* s = std::get_if<Store>(&insn)) off = &s->offset;
    if (off && off->is_literal()) m = std::max(m, off->literal_value());
  }
  return m;
}

bool uses_base(const Program& p, Reg base) {
  for (Value a : p.addresses()) {
    const Instruction& insn = *p.at(a);
    if (const auto* l = std::get_if<Load>(&insn); l && l->base == base) return true;
    if (const auto* s = std::get_if<Store>(&insn); s && s->base == base) return true;
    if (auto r = written_register(insn); r && *r == base) return true;
  }
  return false;
}

class Lowerer {
 public:
  Lowerer(const Program& src, const MemoryLayout& layout, Pass pass)
      : src_(src), layout_(layout), pass_(pass), w_(src.width()) {}

  Lowered run() {
    validate();
    blocks_ = split_linear_blocks(src_);
    // Pass 1: sizes and addresses.
    origin_ = src_.addresses().front();
    std::uint32_t cursor = origin_ + prologue_size();
    for (const auto& b : blocks_) {
      starts_[b.start] = cursor;
      cursor += block_size(b);
    }
    exit_ = cursor;
    if (pass_ == Pass::kCet) cursor += head_size();
    if (cursor > w_.cardinality()) {
      throw HardeningError("lowered program does not fit in " +
                           std::to_string(w_.bits()) + "-bit code space");
    }

    // Pass 2: emission.
    Program out(w_);
    emit_at_ = origin_;
    out_ = &out;
    emit_prologue();
    for (const auto& b : blocks_) emit_block(b);
    if (pass_ == Pass::kCet) emit_head(exit_);
    out.set_entry(origin_);
    for (const auto& cp : src_.code_pointers()) {
      out.add_code_pointer({cp.mem_addr, target(cp.code_addr, "code pointer")});
    }

    Lowered result{std::move(out), {}};
    auto& map = result.map;
    map.pass = pass_;
    map.entry = origin_;
    map.exit = static_cast<Value>(exit_);
    map.trap = layout_.trap();
    map.heap_base_renamed = renamed_;
    for (const auto& b : blocks_) {
      const Value s = static_cast<Value>(starts_.at(b.start));
      map.blocks.push_back(
          {b.start, s, pass_ == Pass::kCet ? s : Value{0}, block_size(b)});
    }
    map.reserved = {Reg::kTarget};
    if (pass_ == Pass::kCet) map.reserved = {Reg::kLabel};
    if (renamed_) map.reserved.push_back(Reg::kPinned);
    if (pass_ == Pass::kSfi) map.reserved.push_back(Reg::kSepStk);
    return result;
  }

 private:
  void validate() {
    if (src_.empty()) throw HardeningError("cannot lower an empty program");
    const auto addrs = src_.addresses();
    for (std::size_t k = 1; k < addrs.size(); ++k) {
      if (addrs[k] != addrs[k - 1] + 1u) {
        throw HardeningError("source addresses are not contiguous at " +
                             std::to_string(addrs[k]));
      }
    }
    for (Value a : addrs) {
      const Instruction& insn = *src_.at(a);
      const std::string at = where(a, insn, w_);
      auto check_reg = [&](Reg r) {
        if (r == Reg::kSStk || r == Reg::kSepStk || is_pass_reserved(r)) {
          throw HardeningError("register " + std::string(reg_name(r)) +
                               " is reserved for hardening " + at);
        }
      };
      std::visit(
          [&](const auto& i) {
            using T = std::decay_t<decltype(i)>;
            if constexpr (std::is_same_v<T, Assign>) {
              check_reg(i.dst);
              i.value.for_each_reg(check_reg);
            } else if constexpr (std::is_same_v<T, Load>) {
              check_reg(i.dst);
              check_reg(i.base);
              i.offset.for_each_reg(check_reg);
            } else if constexpr (std::is_same_v<T, Store>) {
              check_reg(i.base);
              i.offset.for_each_reg(check_reg);
              i.value.for_each_reg(check_reg);
            } else if constexpr (std::is_same_v<T, JumpIf>) {
              i.cond.for_each_reg(check_reg);
            } else if constexpr (std::is_same_v<T, JumpInd> ||
                                 std::is_same_v<T, CallInd>) {
              check_reg(i.target);
            } else if constexpr (std::is_same_v<T, Flush> ||
                                 std::is_same_v<T, EndBranch>) {
              throw HardeningError("source already contains hardening "
                                   "instructions " + at);
            }
          },
          insn);
      if (uses_heap_base_as_value(insn)) renamed_ = true;
      if (is_call(insn) || is_return(insn)) has_calls_ = true;
    }
    if (has_calls_ && pass_ == Pass::kSfi &&
        layout_.region(machine::Region::kSeparateStack).empty()) {
      throw HardeningError("calls require a separate_stack region");
    }
    if (has_calls_ && pass_ == Pass::kCet &&
        layout_.region(machine::Region::kShadowStack).empty()) {
      throw HardeningError("calls require a shadow_stack region");
    }
    if (pass_ == Pass::kCet) {
      interlocked_ = {Reg::kHeap, Reg::kStk};
      if (uses_base(src_, Reg::kTable)) interlocked_.push_back(Reg::kTable);
      if (uses_base(src_, Reg::kGlobals)) interlocked_.push_back(Reg::kGlobals);
      validate_trap();
    }
  }

  // Every address an invalidated base can reach must be a guard.
  void validate_trap() {
    Value reach = std::max(layout_.heap_mask(), max_literal_offset(src_));
    if (uses_base(src_, Reg::kTable)) reach = std::max(reach, layout_.table_mask());
    const Value trap = layout_.trap();
    for (int k = -1; k <= static_cast<int>(reach); ++k) {
      const Value a = w_.wrap(trap + w_.cardinality() + k);
      if (!layout_.is_guard(a)) {
        throw HardeningError(
            "guard run around trap " + std::to_string(trap) +
            " does not cover address " + std::to_string(a) +
            "; interlocked bases could reach sandbox memory");
      }
    }
  }

  std::uint32_t prologue_size() const {
    std::uint32_t n = 1 + (renamed_ ? 1 : 0);
    if (src_.entry() != blocks_.front().start) ++n;
    return n;
  }
  std::uint32_t head_size() const {
    return pass_ == Pass::kCet ? 1 + static_cast<std::uint32_t>(interlocked_.size())
                               : 0;
  }
  std::uint32_t terminator_size(const Instruction& t) const {
    if (pass_ == Pass::kCet) return 2;
    if (std::holds_alternative<JumpIf>(t)) return 2;
    if (std::holds_alternative<Call>(t)) return 5;
    if (std::holds_alternative<CallInd>(t)) return 4;
    if (std::holds_alternative<Ret>(t)) return 4;
    return 1;
  }
  std::uint32_t block_size(const LinearBlock& b) const {
    std::uint32_t n = head_size() + static_cast<std::uint32_t>(b.addrs.size());
    if (b.terminator) {
      n += terminator_size(*src_.at(*b.terminator)) - 1;
    } else if (pass_ == Pass::kCet) {
      n += 1;
    }
    return n;
  }

  // Lowered address for a source transfer target.
  Value target(Value src_addr, const std::string& what) const {
    if (auto it = starts_.find(src_addr); it != starts_.end()) {
      return static_cast<Value>(it->second);
    }
    if (src_addr == src_.end()) return static_cast<Value>(exit_);
    throw HardeningError(what + " target " + std::to_string(src_addr) +
                         " is not a block start");
  }

  void emit(Instruction insn) { out_->insert(emit_at_++, std::move(insn)); }
  Value here() const { return static_cast<Value>(emit_at_); }
  Value disp_to(Value to) const { return w_.wrap(to + w_.cardinality() - here()); }

  void emit_prologue() {
    if (pass_ == Pass::kSfi) emit(Flush{});
    if (pass_ == Pass::kCet) {
      emit(Assign{Reg::kLabel, lit(target(src_.entry(), "entry"))});
    }
    if (renamed_) emit(Assign{Reg::kPinned, reg(Reg::kHeap)});
    if (src_.entry() != blocks_.front().start) {
      emit(Jump{disp_to(target(src_.entry(), "entry"))});
    }
  }

  void emit_head(std::uint32_t label) {
    emit(EndBranch{});
    const Value l = static_cast<Value>(label);
    const Expr mismatch = bin(BinOp::kNe, reg(Reg::kLabel), lit(l));
    for (Reg r : interlocked_) {
      emit(Assign{r, select_expr(mismatch, lit(layout_.trap()), reg(r))});
    }
  }

  Instruction prepare(Value a) const {
    Instruction insn = *src_.at(a);
    if (renamed_) insn = rename_heap_base(insn);
    return mask_instruction(insn, layout_, where(a, insn, w_));
  }

  void emit_block(const LinearBlock& b) {
    if (pass_ == Pass::kCet) emit_head(starts_.at(b.start));
    for (Value a : b.addrs) {
      if (b.terminator && a == *b.terminator) break;
      emit(prepare(a));
    }
    if (!b.terminator) {
      if (pass_ == Pass::kCet) {
        const Value next = w_.wrap(b.addrs.back() + 1u);
        emit(Assign{Reg::kLabel, lit(target(next, "fall-through"))});
      }
      return;
    }
    const Value t = *b.terminator;
    const Instruction insn = prepare(t);
    const Value fall = target(w_.wrap(t + 1u), "fall-through");
    if (pass_ == Pass::kCet) {
      emit_cet_terminator(t, insn, fall);
    } else {
      emit_sfi_terminator(t, insn, fall);
    }
  }

  void emit_sfi_terminator(Value at, const Instruction& insn, Value fall) {
    if (const auto* j = std::get_if<JumpIf>(&insn)) {
      const Value taken = target(w_.wrap(at + j->disp), "jump");
      emit(Assign{Reg::kTarget, select_expr(j->cond, lit(taken), lit(fall))});
      emit(JumpInd{Reg::kTarget});
    } else if (const auto* j = std::get_if<Jump>(&insn)) {
      emit(Jump{disp_to(target(w_.wrap(at + j->disp), "jump"))});
    } else if (std::holds_alternative<JumpInd>(insn)) {
      emit(insn);
    } else if (is_call(insn)) {
      emit(Assign{Reg::kSepStk, bin(BinOp::kSub, reg(Reg::kSepStk), lit(1))});
      emit(Store{Reg::kSepStk, lit(0), lit(fall)});
      emit(Assign{Reg::kStk, bin(BinOp::kSub, reg(Reg::kStk), lit(1))});
      if (const auto* c = std::get_if<Call>(&insn)) {
        emit(Assign{Reg::kTarget, lit(target(w_.wrap(at + c->disp), "call"))});
        emit(JumpInd{Reg::kTarget});
      } else {
        emit(JumpInd{std::get<CallInd>(insn).target});
      }
    } else if (is_return(insn)) {
      emit(Load{Reg::kTarget, Reg::kSepStk, lit(0)});
      emit(Assign{Reg::kSepStk, bin(BinOp::kAdd, reg(Reg::kSepStk), lit(1))});
      emit(Assign{Reg::kStk, bin(BinOp::kAdd, reg(Reg::kStk), lit(1))});
      emit(JumpInd{Reg::kTarget});
    }
  }

  void emit_cet_terminator(Value at, const Instruction& insn, Value fall) {
    if (const auto* j = std::get_if<JumpIf>(&insn)) {
      const Value taken = target(w_.wrap(at + j->disp), "jump");
      emit(Assign{Reg::kLabel, select_expr(j->cond, lit(taken), lit(fall))});
      emit(JumpIf{disp_to(taken), j->cond});
    } else if (const auto* j = std::get_if<Jump>(&insn)) {
      const Value to = target(w_.wrap(at + j->disp), "jump");
      emit(Assign{Reg::kLabel, lit(to)});
      emit(Jump{disp_to(to)});
    } else if (const auto* c = std::get_if<Call>(&insn)) {
      const Value to = target(w_.wrap(at + c->disp), "call");
      emit(Assign{Reg::kLabel, lit(to)});
      emit(Call{disp_to(to)});
    } else if (const auto* j = std::get_if<JumpInd>(&insn)) {
      emit(Assign{Reg::kLabel, reg(j->target)});
      emit(insn);
    } else if (const auto* c = std::get_if<CallInd>(&insn)) {
      emit(Assign{Reg::kLabel, reg(c->target)});
      emit(insn);
    } else if (is_return(insn)) {
      emit(Load{Reg::kLabel, Reg::kStk, lit(0)});
      emit(Ret{});
    }
  }

  const Program& src_;
  const MemoryLayout& layout_;
  Pass pass_;
  Width w_;
  std::vector<LinearBlock> blocks_;
  std::map<Value, std::uint32_t> starts_;
  std::uint32_t origin_ = 0;
  std::uint32_t exit_ = 0;
  std::uint32_t emit_at_ = 0;
  Program* out_ = nullptr;
  bool renamed_ = false;
  bool has_calls_ = false;
  std::vector<Reg> interlocked_;
};

}  // namespace

std::string_view pass_name(Pass p) {
  switch (p) {
    case Pass::kMask: return "mask";
    case Pass::kSfi: return "sfi";
    case Pass::kCet: return "cet";
  }
  return "?";
}

std::optional<Pass> pass_from_name(std::string_view s) {
  for (Pass p : {Pass::kMask, Pass::kSfi, Pass::kCet}) {
    if (pass_name(p) == s) return p;
  }
  return std::nullopt;
}

Expr select_expr(const Expr& e, const Expr& a, const Expr& b) {
  // Comparisons already evaluate to 0 or 1.
  const bool boolean =
      e.kind() == Expr::Kind::kBinary &&
      (e.op() == BinOp::kLt || e.op() == BinOp::kEq || e.op() == BinOp::kNe ||
       e.op() == BinOp::kGe);
  const Expr truth = boolean ? e : bin(BinOp::kNe, e, lit(0));
  return bin(BinOp::kOr, bin(BinOp::kAnd, bin(BinOp::kSub, lit(0), truth), a),
             bin(BinOp::kAnd, bin(BinOp::kSub, truth, lit(1)), b));
}

Program mask_heap_offsets(const Program& p, const MemoryLayout& layout) {
  if (p.width() != layout.width()) {
    throw HardeningError("program and layout widths differ");
  }
  Program out(p.width());
  for (Value a : p.addresses()) {
    const Instruction& insn = *p.at(a);
    const std::string at = where(a, insn, p.width());
    check_pinned(insn, at);
    out.insert(a, mask_instruction(insn, layout, at));
  }
  out.set_entry(p.entry());
  for (const auto& cp : p.code_pointers()) out.add_code_pointer(cp);
  return out;
}

Lowered lower_swivel_sfi(const Program& p, const MemoryLayout& layout) {
  if (p.width() != layout.width()) {
    throw HardeningError("program and layout widths differ");
  }
  return Lowerer(p, layout, Pass::kSfi).run();
}

Lowered lower_swivel_cet(const Program& p, const MemoryLayout& layout) {
  if (p.width() != layout.width()) {
    throw HardeningError("program and layout widths differ");
  }
  return Lowerer(p, layout, Pass::kCet).run();
}

Lowered harden(const Program& p, const MemoryLayout& layout, Pass pass) {
  switch (pass) {
    case Pass::kMask: {
      Lowered out{mask_heap_offsets(p, layout), {}};
      out.map.pass = Pass::kMask;
      out.map.entry = out.program.entry();
      out.map.exit = out.program.end();
      out.map.trap = layout.trap();
      return out;
    }
    case Pass::kSfi: return lower_swivel_sfi(p, layout);
    case Pass::kCet: return lower_swivel_cet(p, layout);
  }
  throw HardeningError("unknown pass");
}

std::optional<Value> BlockMap::lowered(Value source_start) const {
  for (const auto& b : blocks) {
    if (b.source_start == source_start) return b.start;
  }
  return std::nullopt;
}

std::string BlockMap::to_json() const {
  nlohmann::json j;
  j["pass"] = pass_name(pass);
  j["entry"] = entry;
  j["exit"] = exit;
  j["trap"] = trap;
  j["heap_base_renamed"] = heap_base_renamed;
  auto& regs = j["reserved_registers"] = nlohmann::json::array();
  for (Reg r : reserved) regs.push_back(std::string(reg_name(r)));
  auto& blocks_j = j["blocks"] = nlohmann::json::array();
  for (const auto& b : blocks) {
    nlohmann::json e = {{"source_start", b.source_start},
                        {"start", b.start},
                        {"size", b.size}};
    if (pass == Pass::kCet) e["label"] = b.label;
    blocks_j.push_back(e);
  }
  return j.dump(2);
}

}  // namespace zfi::hardening
