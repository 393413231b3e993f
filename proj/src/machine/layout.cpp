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

#include "zfi/machine/layout.hpp"

#include <json.hpp>

namespace zfi::machine {
namespace {

constexpr std::string_view kRegionNames[kNumRegions] = {
    "heap", "stack", "globals", "jump_table", "separate_stack", "shadow_stack",
};

std::optional<Region> region_from_name(std::string_view s) {
  for (std::size_t i = 0; i < kNumRegions; ++i) {
    if (kRegionNames[i] == s) return static_cast<Region>(i);
  }
  return std::nullopt;
}

bool is_pow2(std::uint32_t x) { return x != 0 && (x & (x - 1)) == 0; }

}  // namespace

std::string_view region_name(Region r) {
  return kRegionNames[static_cast<std::size_t>(r)];
}

MemoryLayout::MemoryLayout(const Spec& spec) : spec_(spec) {
  try {
    width_ = Width(spec.width);
  } catch (const std::invalid_argument& e) {
    throw LayoutError(e.what());
  }
  const std::uint32_t n = width_.cardinality();
  guard_.assign(n, false);
  class_.assign(n, AddressClass::kHost);

  std::vector<int> owner(n, -1);
  for (const auto& [r, range] : spec.regions) {
    if (range.empty()) continue;
    if (range.start > width_.mask() || range.end() > n) {
      throw LayoutError(std::string(region_name(r)) +
                        " does not fit in the address space");
    }
    regions_[static_cast<std::size_t>(r)] = range;
    for (std::uint32_t a = range.start; a < range.end(); ++a) {
      if (owner[a] >= 0) {
        throw LayoutError(std::string(region_name(r)) + " overlaps " +
                          std::string(region_name(static_cast<Region>(owner[a]))));
      }
      owner[a] = static_cast<int>(r);
      class_[a] = AddressClass::kSandbox;
    }
  }
  for (Region r : {Region::kHeap, Region::kJumpTable}) {
    const auto& range = region(r);
    if (!range.empty() && !is_pow2(range.size)) {
      throw LayoutError(std::string(region_name(r)) +
                        " size must be a power of two");
    }
  }

  auto mark_guard = [&](std::uint32_t a) {
    a &= width_.mask();
    if (owner[a] >= 0) {
      throw LayoutError("guard address " + std::to_string(a) + " lies inside " +
                        std::string(region_name(static_cast<Region>(owner[a]))));
    }
    guard_[a] = true;
    class_[a] = AddressClass::kGuard;
  };
  if (spec.guard_override) {
    for (Value a : *spec.guard_override) mark_guard(a);
  } else {
    for (const auto& range : regions_) {
      if (range.empty()) continue;
      mark_guard(range.start + n - 1);
      mark_guard(range.end());
    }
  }
  for (const auto& g : spec.extra_guard) {
    for (std::uint32_t a = g.start; a < g.end(); ++a) mark_guard(a);
  }

  if (spec.trap) {
    if (!guard_[*spec.trap & width_.mask()]) {
      throw LayoutError("trap address must be a guard address");
    }
    trap_ = width_.wrap(*spec.trap);
  } else {
    // Second address of the longest guard run, so that both the word below
    // and small offsets above it stay inside the run.
    std::uint32_t best_start = 0, best_len = 0;
    for (std::uint32_t a = 0; a < n;) {
      if (!guard_[a]) {
        ++a;
        continue;
      }
      std::uint32_t b = a;
      while (b < n && guard_[b]) ++b;
      if (b - a > best_len) {
        best_len = b - a;
        best_start = a;
      }
      a = b;
    }
    trap_ = width_.wrap(best_len >= 2 ? best_start + 1 : best_start);
  }
}

std::optional<Region> MemoryLayout::region_of(Value a) const {
  for (std::size_t i = 0; i < kNumRegions; ++i) {
    if (!regions_[i].empty() && regions_[i].contains(a)) {
      return static_cast<Region>(i);
    }
  }
  return std::nullopt;
}

Value MemoryLayout::mask_of(Region r) const {
  const auto& range = region(r);
  return range.empty() ? 0 : width_.wrap(range.size - 1);
}

RegisterFile MemoryLayout::initial_registers() const {
  RegisterFile regs{};
  regs[lang::index(Reg::kHeap)] = region(Region::kHeap).start;
  regs[lang::index(Reg::kTable)] = region(Region::kJumpTable).start;
  regs[lang::index(Reg::kGlobals)] = region(Region::kGlobals).start;
  regs[lang::index(Reg::kStk)] = width_.wrap(region(Region::kStack).end());
  regs[lang::index(Reg::kSepStk)] =
      width_.wrap(region(Region::kSeparateStack).end());
  regs[lang::index(Reg::kSStk)] =
      width_.wrap(region(Region::kShadowStack).end());
  for (const auto& [r, v] : spec_.registers) regs[lang::index(r)] = width_.wrap(v);
  return regs;
}

MemoryLayout MemoryLayout::from_json(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LayoutError(std::string("layout is not valid JSON: ") + e.what());
  }
  try {
    Spec spec;
    spec.width = j.value("width", 8u);
    const json regions = j.value("regions", json::object());
    for (const auto& [name, range] : regions.items()) {
      auto r = region_from_name(name);
      if (!r) throw LayoutError("unknown region '" + name + "'");
      spec.regions[*r] = Range{range.at("start").get<Value>(),
                               range.at("size").get<std::uint32_t>()};
    }
    if (j.contains("guard")) spec.guard_override = j["guard"].get<std::vector<Value>>();
    const json extra = j.value("extra_guard", json::array());
    for (const auto& g : extra) {
      spec.extra_guard.push_back(
          Range{g.at("start").get<Value>(), g.at("size").get<std::uint32_t>()});
    }
    if (j.contains("trap")) spec.trap = j["trap"].get<Value>();
    const json registers = j.value("registers", json::object());
    for (const auto& [name, v] : registers.items()) {
      auto r = lang::reg_from_name(name);
      if (!r) throw LayoutError("unknown register '" + name + "'");
      spec.registers[*r] = v.get<Value>();
    }
    return MemoryLayout(spec);
  } catch (const json::exception& e) {
    throw LayoutError(std::string("malformed layout: ") + e.what());
  }
}

std::string MemoryLayout::to_json() const {
  using nlohmann::json;
  json j;
  j["width"] = spec_.width;
  json regions = json::object();
  for (const auto& [r, range] : spec_.regions) {
    regions[std::string(region_name(r))] = {{"start", range.start},
                                            {"size", range.size}};
  }
  j["regions"] = regions;
  if (spec_.guard_override) j["guard"] = *spec_.guard_override;
  if (!spec_.extra_guard.empty()) {
    json extra = json::array();
    for (const auto& g : spec_.extra_guard) {
      extra.push_back({{"start", g.start}, {"size", g.size}});
    }
    j["extra_guard"] = extra;
  }
  if (spec_.trap) j["trap"] = *spec_.trap;
  if (!spec_.registers.empty()) {
    json regs = json::object();
    for (const auto& [r, v] : spec_.registers) {
      regs[std::string(lang::reg_name(r))] = v;
    }
    j["registers"] = regs;
  }
  return j.dump(2);
}

}  // namespace zfi::machine
