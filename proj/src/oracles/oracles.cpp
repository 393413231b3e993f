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

#include "zfi/oracles/oracles.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace zfi::oracles {

using namespace lang;

std::string_view class_name(OracleClass c) {
  switch (c) {
    case OracleClass::kAlwaysCorrect: return "AlwaysCorrect";
    case OracleClass::kDirectionOnly: return "DirectionOnly";
    case OracleClass::kHistoricallyValidBTB: return "HistoricallyValidBTB";
    case OracleClass::kScriptedAdversary: return "ScriptedAdversary";
  }
  return "?";
}

std::optional<OracleClass> class_from_name(std::string_view s) {
  if (s == "correct" || s == "always-correct" || s == "AlwaysCorrect") {
    return OracleClass::kAlwaysCorrect;
  }
  if (s == "direction" || s == "direction-only" || s == "DirectionOnly") {
    return OracleClass::kDirectionOnly;
  }
  if (s == "btb" || s == "historically-valid-btb" ||
      s == "HistoricallyValidBTB") {
    return OracleClass::kHistoricallyValidBTB;
  }
  if (s == "scripted" || s == "scripted-adversary" ||
      s == "ScriptedAdversary") {
    return OracleClass::kScriptedAdversary;
  }
  return std::nullopt;
}

DecisionScript parse_script(std::string_view text) {
  DecisionScript out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view tok = text.substr(pos, comma - pos);
    pos = comma + 1;
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (tok.empty()) {
      if (comma == text.size()) break;
      throw std::invalid_argument("empty choice in oracle script");
    }
    if (tok == "taken" || tok == "t") {
      out.push_back(Choice::index(kTaken));
      continue;
    }
    if (tok == "fall" || tok == "f" || tok == "fallthrough") {
      out.push_back(Choice::index(kFall));
      continue;
    }
    const bool is_addr = tok.front() == '@';
    if (is_addr) tok.remove_prefix(1);
    int base = 10;
    if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
      tok.remove_prefix(2);
      base = 16;
    }
    unsigned v = 0;
    auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, base);
    if (ec != std::errc() || end != tok.data() + tok.size()) {
      throw std::invalid_argument("malformed oracle choice '" +
                                  std::string(tok) + "'");
    }
    if (is_addr && v > 0xFFFF) {
      throw std::invalid_argument("oracle target address out of range");
    }
    out.push_back(is_addr ? Choice::address(static_cast<Value>(v))
                          : Choice::index(v));
    if (comma == text.size()) break;
  }
  return out;
}

std::string render_script(const DecisionScript& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    if (s[i].kind == Choice::Kind::kAddress) out += "@";
    out += std::to_string(s[i].value);
  }
  return out;
}

std::vector<Value> allowed_targets(OracleClass cls, const Config& c,
                                   Value arch_target) {
  std::vector<Value> out;
  auto add = [&](Value v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  const Instruction* insn = c.instruction();
  if (insn == nullptr || cls == OracleClass::kAlwaysCorrect) {
    add(arch_target);
    return out;
  }
  const Width w = c.width();
  if (const auto* j = std::get_if<JumpIf>(insn)) {
    add(w.wrap(c.pc + j->disp));
    add(w.wrap(c.pc + 1u));
    return out;
  }
  const bool indirect = std::holds_alternative<JumpInd>(*insn) ||
                        std::holds_alternative<CallInd>(*insn);
  if (indirect && cls != OracleClass::kDirectionOnly) {
    auto it = c.mu_state.btb_history.find(c.pc);
    if (it != c.mu_state.btb_history.end()) {
      for (Value v : it->second) add(v);
    }
  }
  add(arch_target);
  return out;
}

bool consumes_choice(OracleClass cls, std::size_t num_allowed) {
  return cls == OracleClass::kScriptedAdversary || num_allowed > 1;
}

ClassOracle::ClassOracle(OracleClass cls, DecisionScript script)
    : cls_(cls), script_(std::move(script)) {
  if (cls_ != OracleClass::kScriptedAdversary) {
    for (const auto& ch : script_) {
      if (ch.kind == Choice::Kind::kAddress) {
        throw std::invalid_argument(
            "explicit target choices require the scripted adversary class");
      }
    }
  }
}

speculation::Prediction ClassOracle::predict(const Config& c,
                                             Value arch_target) {
  const std::vector<Value> allowed = allowed_targets(cls_, c, arch_target);
  Value target = arch_target;
  if (consumes_choice(cls_, allowed.size())) {
    if (cursor_ < script_.size()) {
      const Choice& ch = script_[cursor_++];
      target = ch.kind == Choice::Kind::kAddress
                   ? c.width().wrap(ch.value)
                   : allowed[std::min<std::size_t>(ch.value, allowed.size() - 1)];
    } else {
      starved_ = std::max(starved_, allowed.size());
    }
  }
  speculation::OracleState state = c.mu_state;
  const Instruction* insn = c.instruction();
  if (insn != nullptr && (std::holds_alternative<JumpInd>(*insn) ||
                          std::holds_alternative<CallInd>(*insn))) {
    auto& h = state.btb_history[c.pc];
    if (std::find(h.begin(), h.end(), arch_target) == h.end()) {
      h.push_back(arch_target);
    }
  }
  return {target, std::move(state)};
}

namespace {

void expand(OracleClass cls, const std::vector<Config>& states,
            const MemoryLayout& layout, unsigned n,
            const EnumerateOptions& opts, DecisionScript& prefix,
            ScriptSet& out) {
  if (out.truncated) return;
  std::size_t branching = 0;
  for (const Config& s : states) {
    ClassOracle oracle(cls, prefix);
    speculation::run_spec(s, layout, oracle, n, opts.mode);
    branching = std::max(branching, oracle.starved_branching());
  }
  if (branching == 0) {
    if (out.scripts.size() >= opts.max_scripts) {
      out.truncated = true;
      return;
    }
    out.scripts.push_back(prefix);
    return;
  }
  for (unsigned i = 0; i < branching && !out.truncated; ++i) {
    prefix.push_back(Choice::index(i));
    expand(cls, states, layout, n, opts, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

ScriptSet enumerate_oracles(OracleClass cls, const std::vector<Config>& states,
                            const MemoryLayout& layout, unsigned n,
                            const EnumerateOptions& opts) {
  ScriptSet out;
  DecisionScript prefix;
  expand(cls, states, layout, n, opts, prefix, out);
  return out;
}

ScriptSet enumerate_oracles(OracleClass cls,
                            std::shared_ptr<const Program> program,
                            const MemoryLayout& layout, unsigned n,
                            const EnumerateOptions& opts) {
  return enumerate_oracles(
      cls, {machine::initial_config(std::move(program), layout)}, layout, n,
      opts);
}

}  // namespace zfi::oracles
