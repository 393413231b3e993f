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

#ifndef ZFI_HARDENING_PASSES_HPP_
#define ZFI_HARDENING_PASSES_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zfi/lang/program.hpp"
#include "zfi/machine/layout.hpp"

namespace zfi::hardening {

using lang::Expr;
using lang::Program;
using lang::Reg;
using lang::Value;
using machine::MemoryLayout;

class HardeningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Pass : std::uint8_t { kMask, kSfi, kCet };
std::string_view pass_name(Pass p);
std::optional<Pass> pass_from_name(std::string_view s);

// Truncates every heap and jump-table offset to the region size. Stack and
// globals accesses must already use literal offsets. Rejects programs that
// write or spill the heap base. Addresses are unchanged.
Program mask_heap_offsets(const Program& p, const MemoryLayout& layout);

struct LoweredBlock {
  Value source_start;
  Value start;  // address of the first lowered instruction
  Value label;  // interlock label (CET only; equals start)
  std::uint32_t size;
};

// Sidecar describing a lowered program.
struct BlockMap {
  Pass pass = Pass::kMask;
  Value entry = 0;
  Value exit = 0;  // lowered address that source-end transfers reach
  Value trap = 0;
  std::vector<LoweredBlock> blocks;
  std::vector<Reg> reserved;
  // Non-base uses of the heap base were renamed to the pinned copy rP.
  bool heap_base_renamed = false;

  std::string to_json() const;
  // Lowered start of the block whose source start is `source_start`.
  std::optional<Value> lowered(Value source_start) const;
};

struct Lowered {
  Program program;
  BlockMap map;
};

// Swivel-SFI: flush on entry, conditional jumps and calls/returns turned
// into indirect jumps to block starts, return addresses kept on the
// separate stack, offsets masked.
Lowered lower_swivel_sfi(const Program& p, const MemoryLayout& layout);

// Swivel-CET: endbranch and a register interlock at the top of every
// linear block, the dynamic target label in rL before every transfer,
// offsets masked.
Lowered lower_swivel_cet(const Program& p, const MemoryLayout& layout);

// Branch-free `e ? a : b` over the expression operators.
Expr select_expr(const Expr& e, const Expr& a, const Expr& b);

// Dispatches on the pass; `mask` produces a map with no blocks.
Lowered harden(const Program& p, const MemoryLayout& layout, Pass pass);

}  // namespace zfi::hardening

#endif  // ZFI_HARDENING_PASSES_HPP_
