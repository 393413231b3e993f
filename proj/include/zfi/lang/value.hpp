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

#ifndef ZFI_LANG_VALUE_HPP_
#define ZFI_LANG_VALUE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zfi::lang {

// Machine words are stored in 16 bits; the active width w (2..16) decides
// how many of them are significant.
using Value = std::uint16_t;

inline constexpr unsigned kMinWidth = 2;
inline constexpr unsigned kMaxWidth = 16;

class Width {
 public:
  constexpr Width() = default;
  explicit constexpr Width(unsigned bits) : bits_(bits) {
    if (bits < kMinWidth || bits > kMaxWidth) {
      throw std::invalid_argument("word width must be in [2, 16], got " +
                                  std::to_string(bits));
    }
  }

  constexpr unsigned bits() const { return bits_; }
  constexpr std::uint32_t mask() const { return (1u << bits_) - 1u; }
  // Number of distinct values (also the size of the address space).
  constexpr std::uint32_t cardinality() const { return 1u << bits_; }
  constexpr Value wrap(std::uint64_t x) const {
    return static_cast<Value>(x & mask());
  }
  // Two's-complement reading of a w-bit value.
  constexpr int to_signed(Value v) const {
    const std::uint32_t sign = 1u << (bits_ - 1);
    return (v & sign) ? static_cast<int>(v) - static_cast<int>(cardinality())
                      : static_cast<int>(v);
  }
  constexpr Value from_signed(int x) const {
    return wrap(static_cast<std::uint64_t>(static_cast<std::int64_t>(x)));
  }

  friend constexpr bool operator==(Width, Width) = default;

 private:
  unsigned bits_ = 8;
};

// Register identifiers. The distinguished registers come first, then the
// registers reserved for hardening passes, then the general registers.
enum class Reg : std::uint8_t {
  kStk,     // stack pointer
  kHeap,    // heap base (pinned)
  kSStk,    // CET shadow-stack pointer, not addressable by programs
  kSepStk,  // separate return-address stack pointer (Swivel-SFI)
  kTable,   // jump-table base
  kGlobals, // globals base
  kTarget,  // pass-reserved: computed transfer target
  kLabel,   // pass-reserved: interlock target label
  kPinned,  // pass-reserved: renamed general use of the heap base
  kR0,
  kR15 = kR0 + 15,
};

inline constexpr std::size_t kNumRegs = static_cast<std::size_t>(Reg::kR15) + 1;
inline constexpr std::size_t kNumGeneralRegs = 16;

constexpr std::size_t index(Reg r) { return static_cast<std::size_t>(r); }
constexpr Reg general(unsigned i) {
  return static_cast<Reg>(static_cast<unsigned>(Reg::kR0) + i);
}
constexpr bool is_general(Reg r) { return index(r) >= index(Reg::kR0); }
constexpr bool is_pass_reserved(Reg r) {
  return r == Reg::kTarget || r == Reg::kLabel || r == Reg::kPinned;
}

std::string_view reg_name(Reg r);
// Accepts canonical names plus the long aliases rHeap / rSepStk / rShadow.
std::optional<Reg> reg_from_name(std::string_view name);

using RegisterFile = std::array<Value, kNumRegs>;

}  // namespace zfi::lang

#endif  // ZFI_LANG_VALUE_HPP_
