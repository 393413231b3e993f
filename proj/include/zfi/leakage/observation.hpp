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

#ifndef ZFI_LEAKAGE_OBSERVATION_HPP_
#define ZFI_LEAKAGE_OBSERVATION_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zfi/lang/value.hpp"

namespace zfi::leakage {

using lang::Value;

// Attacker power increases dmem < ct < arch.
enum class LeakModel : std::uint8_t { kDmem = 0, kCt = 1, kArch = 2 };
inline constexpr std::array<LeakModel, 3> kAllModels = {
    LeakModel::kDmem, LeakModel::kCt, LeakModel::kArch};

std::string_view model_name(LeakModel m);
std::optional<LeakModel> model_from_name(std::string_view s);

struct Observation {
  enum class Kind : std::uint8_t { kJumpTarget, kMemAddr, kMemVal };
  Kind kind;
  Value value;

  static Observation jump(Value v) { return {Kind::kJumpTarget, v}; }
  static Observation addr(Value v) { return {Kind::kMemAddr, v}; }
  static Observation val(Value v) { return {Kind::kMemVal, v}; }

  friend bool operator==(const Observation&, const Observation&) = default;
};

using Trace = std::vector<Observation>;

// One observation sequence per leakage model, maintained side by side.
class ObsTrace {
 public:
  const Trace& of(LeakModel m) const { return traces_[index(m)]; }
  void append(LeakModel m, const Trace& t) {
    auto& dst = traces_[index(m)];
    dst.insert(dst.end(), t.begin(), t.end());
  }
  friend bool operator==(const ObsTrace&, const ObsTrace&) = default;

 private:
  static std::size_t index(LeakModel m) { return static_cast<std::size_t>(m); }
  std::array<Trace, 3> traces_;
};

// `J <hex>` / `A <hex>` / `V <hex>`, one per line, after a `# model` header.
std::string dump_trace(const Trace& t, LeakModel m);
Trace parse_trace_dump(std::string_view text);
std::string observation_text(const Observation& o);

}  // namespace zfi::leakage

#endif  // ZFI_LEAKAGE_OBSERVATION_HPP_
