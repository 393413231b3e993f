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

#include "zfi/leakage/observation.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace zfi::leakage {

std::string_view model_name(LeakModel m) {
  switch (m) {
    case LeakModel::kDmem: return "dmem";
    case LeakModel::kCt: return "ct";
    case LeakModel::kArch: return "arch";
  }
  return "?";
}

std::optional<LeakModel> model_from_name(std::string_view s) {
  for (LeakModel m : kAllModels) {
    if (model_name(m) == s) return m;
  }
  return std::nullopt;
}

std::string observation_text(const Observation& o) {
  static constexpr char kTag[] = {'J', 'A', 'V'};
  std::ostringstream os;
  os << kTag[static_cast<int>(o.kind)] << " 0x" << std::hex << o.value;
  return os.str();
}

std::string dump_trace(const Trace& t, LeakModel m) {
  std::string out = "# model " + std::string(model_name(m)) + "\n";
  for (const auto& o : t) out += observation_text(o) + "\n";
  return out;
}

Trace parse_trace_dump(std::string_view text) {
  Trace t;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.remove_suffix(1);
    }
    if (line.empty() || line.front() == '#') continue;
    Observation::Kind kind;
    switch (line.front()) {
      case 'J': kind = Observation::Kind::kJumpTarget; break;
      case 'A': kind = Observation::Kind::kMemAddr; break;
      case 'V': kind = Observation::Kind::kMemVal; break;
      default:
        throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                    ": unknown observation tag");
    }
    std::string_view num = line.substr(1);
    while (!num.empty() && num.front() == ' ') num.remove_prefix(1);
    int base = 10;
    if (num.size() > 2 && num[0] == '0' && (num[1] == 'x' || num[1] == 'X')) {
      num.remove_prefix(2);
      base = 16;
    }
    unsigned v = 0;
    auto [end, ec] = std::from_chars(num.data(), num.data() + num.size(), v, base);
    if (ec != std::errc() || end != num.data() + num.size() || v > 0xFFFF) {
      throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                  ": malformed value");
    }
    t.push_back(Observation{kind, static_cast<Value>(v)});
  }
  return t;
}

}  // namespace zfi::leakage
