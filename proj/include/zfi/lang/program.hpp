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

#ifndef ZFI_LANG_PROGRAM_HPP_
#define ZFI_LANG_PROGRAM_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zfi/lang/ast.hpp"

namespace zfi::lang {

// A memory cell initialised with a code address (a jump-table element).
// Hardening passes relocate these along with the code.
struct CodePointer {
  Value mem_addr;
  Value code_addr;
  friend bool operator==(const CodePointer&, const CodePointer&) = default;
};

// Partial map from addresses to instructions, over a w-bit code space.
class Program {
 public:
  Program() : Program(Width{}) {}
  explicit Program(Width w);

  Width width() const { return width_; }
  Value entry() const { return entry_; }
  void set_entry(Value a) { entry_ = width_.wrap(a); }

  const Instruction* at(Value addr) const {
    const auto& slot = code_[addr & width_.mask()];
    return slot ? &*slot : nullptr;
  }
  bool mapped(Value addr) const { return at(addr) != nullptr; }
  // Throws on duplicate address.
  void insert(Value addr, Instruction insn);
  void replace(Value addr, Instruction insn);

  // Address one past the highest mapped instruction; stepping there halts.
  Value end() const;
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  // Mapped addresses in ascending order.
  std::vector<Value> addresses() const;

  const std::vector<CodePointer>& code_pointers() const { return pointers_; }
  void add_code_pointer(CodePointer p) { pointers_.push_back(p); }

  friend bool operator==(const Program& a, const Program& b);

 private:
  Width width_;
  Value entry_ = 0;
  std::vector<std::optional<Instruction>> code_;
  std::size_t count_ = 0;
  std::vector<CodePointer> pointers_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ParseOptions {
  // Width used when the text has no `.width` directive.
  unsigned default_width = 8;
  // When set, overrides any `.width` directive.
  std::optional<unsigned> width_override;
};

Program parse_program(std::string_view text, const ParseOptions& opts = {});
Expr parse_expr(std::string_view text, Width w);

std::string render_expr(const Expr& e, Width w);
std::string render_instruction(const Instruction& insn, Width w);
// Every instruction on its own line with an explicit address prefix.
std::string render_program(const Program& p);

// FNV-1a over the rendered program; stable across runs and platforms.
std::uint64_t program_hash(const Program& p);

// ---------------------------------------------------------------------------
// Linear blocks: maximal runs of consecutive instructions whose only
// control-flow instruction is the last one.

struct LinearBlock {
  Value start;
  std::vector<Value> addrs;
  // Address of the control-flow instruction ending the block, if any.
  std::optional<Value> terminator;
  bool unterminated() const { return !terminator.has_value(); }
};

std::vector<LinearBlock> split_linear_blocks(const Program& p);

// Architectural successor of a direct transfer at `addr`.
Value direct_target(const Program& p, Value addr);

}  // namespace zfi::lang

#endif  // ZFI_LANG_PROGRAM_HPP_
