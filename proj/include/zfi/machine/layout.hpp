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

#ifndef ZFI_MACHINE_LAYOUT_HPP_
#define ZFI_MACHINE_LAYOUT_HPP_

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zfi/lang/value.hpp"

namespace zfi::machine {

using lang::Reg;
using lang::RegisterFile;
using lang::Value;
using lang::Width;

enum class Region : std::uint8_t {
  kHeap,
  kStack,
  kGlobals,
  kJumpTable,
  kSeparateStack,
  kShadowStack,
};
inline constexpr std::size_t kNumRegions = 6;

std::string_view region_name(Region r);

struct Range {
  Value start = 0;
  std::uint32_t size = 0;

  bool empty() const { return size == 0; }
  // Ranges do not wrap around the address space.
  bool contains(Value a) const { return a >= start && a < start + size; }
  std::uint32_t end() const { return start + size; }
};

enum class AddressClass : std::uint8_t { kSandbox, kGuard, kHost };

class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sandbox memory geometry: named regions, the guard set, and the guard
// address the register interlock uses as its invalid base.
class MemoryLayout {
 public:
  struct Spec {
    unsigned width = 8;
    std::map<Region, Range> regions;
    // Replaces the derived one-address-each-side guard set when present.
    std::optional<std::vector<Value>> guard_override;
    std::vector<Range> extra_guard;
    std::optional<Value> trap;
    std::map<Reg, Value> registers;
  };

  MemoryLayout() : MemoryLayout(Spec{}) {}
  explicit MemoryLayout(const Spec& spec);

  static MemoryLayout from_json(std::string_view text);
  std::string to_json() const;

  Width width() const { return width_; }
  const Range& region(Region r) const {
    return regions_[static_cast<std::size_t>(r)];
  }
  bool is_guard(Value a) const { return guard_[a & width_.mask()]; }
  AddressClass classify(Value a) const { return class_[a & width_.mask()]; }
  bool is_sandbox(Value a) const {
    return classify(a) == AddressClass::kSandbox;
  }
  bool is_host(Value a) const { return classify(a) == AddressClass::kHost; }
  std::optional<Region> region_of(Value a) const;

  Value heap_mask() const { return mask_of(Region::kHeap); }
  Value table_mask() const { return mask_of(Region::kJumpTable); }
  // Guard address used to invalidate memory base registers.
  Value trap() const { return trap_; }

  // Register values at sandbox entry: region bases/tops plus overrides.
  RegisterFile initial_registers() const;
  const Spec& spec() const { return spec_; }

 private:
  Value mask_of(Region r) const;

  Spec spec_;
  Width width_;
  std::array<Range, kNumRegions> regions_{};
  std::vector<bool> guard_;
  std::vector<AddressClass> class_;
  Value trap_ = 0;
};

}  // namespace zfi::machine

#endif  // ZFI_MACHINE_LAYOUT_HPP_
