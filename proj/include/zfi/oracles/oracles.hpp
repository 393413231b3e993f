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

#ifndef ZFI_ORACLES_ORACLES_HPP_
#define ZFI_ORACLES_ORACLES_HPP_

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zfi/speculation/spec_step.hpp"

namespace zfi::oracles {

using lang::Value;
using machine::Config;
using machine::MemoryLayout;

enum class OracleClass : std::uint8_t {
  kAlwaysCorrect,
  kDirectionOnly,
  kHistoricallyValidBTB,
  kScriptedAdversary,
};

std::string_view class_name(OracleClass c);
// Accepts the canonical names and the short CLI spellings
// correct / direction / btb / scripted.
std::optional<OracleClass> class_from_name(std::string_view s);

// One decision: an index into the allowed-target list, or (scripted
// adversary only) an explicit target address.
struct Choice {
  enum class Kind : std::uint8_t { kIndex, kAddress };
  Kind kind = Kind::kIndex;
  unsigned value = 0;

  static Choice index(unsigned i) { return {Kind::kIndex, i}; }
  static Choice address(Value a) { return {Kind::kAddress, a}; }
  friend bool operator==(const Choice&, const Choice&) = default;
  friend auto operator<=>(const Choice&, const Choice&) = default;
};

using DecisionScript = std::vector<Choice>;

// Index spellings for conditional jumps, which list the taken target first.
inline constexpr unsigned kTaken = 0;
inline constexpr unsigned kFall = 1;

// Comma-separated: `taken`, `fall`, a decimal index, or `@addr`.
DecisionScript parse_script(std::string_view text);
std::string render_script(const DecisionScript& s);

// Targets the class permits at the control-flow instruction at c.pc, in
// choice order, without duplicates. The architectural target is always a
// member.
std::vector<Value> allowed_targets(OracleClass cls, const Config& c,
                                   Value arch_target);

// Whether a prediction event with these allowed targets consumes a choice.
bool consumes_choice(OracleClass cls, std::size_t num_allowed);

// A member of a class, fixed by a decision script. Choices are consumed in
// order at branching prediction events; once the script runs out the
// oracle predicts correctly. Predictor state is the per-site history of
// indirect-transfer targets.
class ClassOracle final : public speculation::Oracle {
 public:
  explicit ClassOracle(OracleClass cls, DecisionScript script = {});

  speculation::Prediction predict(const Config& c, Value arch_target) override;

  OracleClass oracle_class() const { return cls_; }
  const DecisionScript& script() const { return script_; }
  std::size_t consumed() const { return cursor_; }
  // Largest allowed-target count seen at an event after the script ran out;
  // 0 if no such event occurred.
  std::size_t starved_branching() const { return starved_; }

 private:
  OracleClass cls_;
  DecisionScript script_;
  std::size_t cursor_ = 0;
  std::size_t starved_ = 0;
};

struct EnumerateOptions {
  speculation::SpecMode mode = speculation::SpecMode::kPlain;
  std::size_t max_scripts = std::numeric_limits<std::size_t>::max();
};

struct ScriptSet {
  std::vector<DecisionScript> scripts;  // lexicographic order
  bool truncated = false;               // max_scripts was reached
};

// Every decision script needed to cover the behaviour of the class on the
// given initial states within n steps. A script is extended only while some
// run reaches a branching event with the script exhausted.
ScriptSet enumerate_oracles(OracleClass cls, const std::vector<Config>& states,
                            const MemoryLayout& layout, unsigned n,
                            const EnumerateOptions& opts = {});

// Convenience form over the single entry configuration of `program`.
ScriptSet enumerate_oracles(OracleClass cls,
                            std::shared_ptr<const lang::Program> program,
                            const MemoryLayout& layout, unsigned n,
                            const EnumerateOptions& opts = {});

}  // namespace zfi::oracles

#endif  // ZFI_ORACLES_ORACLES_HPP_
