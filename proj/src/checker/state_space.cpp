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

#include <charconv>
#include <sstream>

#include "zfi/checker/checker.hpp"

namespace zfi::checker {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::uint32_t parse_number(std::string_view s) {
  s = trim(s);
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  std::uint32_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw std::invalid_argument("malformed number '" + std::string(s) + "'");
  }
  return v;
}

Value checked_value(std::string_view s, lang::Width w) {
  const std::uint32_t v = parse_number(s);
  if (v > w.mask()) {
    throw std::invalid_argument("value " + std::string(trim(s)) +
                                " does not fit in " + std::to_string(w.bits()) +
                                " bits");
  }
  return static_cast<Value>(v);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t at = s.find(sep, pos);
    if (at == std::string_view::npos) at = s.size();
    auto part = trim(s.substr(pos, at - pos));
    if (!part.empty()) out.push_back(part);
    pos = at + 1;
  }
  return out;
}

}  // namespace

std::string Cell::name() const {
  if (kind == Kind::kReg) return std::string(lang::reg_name(reg));
  return "mem[" + std::to_string(addr) + "]";
}

Cell parse_cell(std::string_view text, lang::Width w) {
  text = trim(text);
  if (text.substr(0, 4) == "mem[" && text.size() > 5 && text.back() == ']') {
    return Cell::of_mem(checked_value(text.substr(4, text.size() - 5), w));
  }
  if (auto r = lang::reg_from_name(text)) return Cell::of_reg(*r);
  throw std::invalid_argument("unknown cell '" + std::string(text) +
                              "' (expected a register or mem[addr])");
}

Assignment parse_assignment(std::string_view text, lang::Width w) {
  Assignment out;
  for (auto item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("expected cell=value, got '" +
                                  std::string(item) + "'");
    }
    out.emplace_back(parse_cell(item.substr(0, eq), w),
                     checked_value(item.substr(eq + 1), w));
  }
  return out;
}

std::string render_assignment(const Assignment& a) {
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += ",";
    out += a[i].first.name() + "=" + std::to_string(a[i].second);
  }
  return out;
}

void apply_assignment(Config& c, const Assignment& a) {
  for (const auto& [cell, v] : a) {
    if (cell.kind == Cell::Kind::kReg) {
      c.set_reg(cell.reg, v);
    } else {
      c.store(cell.addr, v);
    }
  }
}

StateSpace::StateSpace(Config base, std::vector<Cell> cells,
                       std::vector<Value> domain)
    : base_(std::move(base)), cells_(std::move(cells)), domain_(std::move(domain)) {
  if (domain_.empty()) domain_ = full_domain(base_.width());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (cells_[i] == cells_[j]) {
        throw std::invalid_argument("cell " + cells_[i].name() +
                                    " enumerated twice");
      }
    }
  }
}

std::vector<Value> StateSpace::full_domain(lang::Width w) {
  std::vector<Value> d(w.cardinality());
  for (std::uint32_t v = 0; v < w.cardinality(); ++v) d[v] = static_cast<Value>(v);
  return d;
}

std::vector<Value> StateSpace::parse_domain(std::string_view text,
                                            lang::Width w) {
  text = trim(text);
  if (text.empty() || text == "all") return full_domain(w);
  std::vector<Value> out;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    const Value lo = checked_value(text.substr(0, dots), w);
    const Value hi = checked_value(text.substr(dots + 2), w);
    if (lo > hi) throw std::invalid_argument("empty domain range");
    for (std::uint32_t v = lo; v <= hi; ++v) out.push_back(static_cast<Value>(v));
    return out;
  }
  for (auto item : split(text, ',')) out.push_back(checked_value(item, w));
  return out;
}

std::size_t StateSpace::size() const {
  std::size_t n = 1;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (n > std::numeric_limits<std::size_t>::max() / domain_.size()) {
      return std::numeric_limits<std::size_t>::max();
    }
    n *= domain_.size();
  }
  return n;
}

Assignment StateSpace::assignment(std::size_t index) const {
  Assignment out(cells_.size());
  for (std::size_t k = cells_.size(); k-- > 0;) {
    out[k] = std::make_pair(cells_[k], domain_[index % domain_.size()]);
    index /= domain_.size();
  }
  return out;
}

Config StateSpace::state(std::size_t index) const {
  Config c = base_;
  apply_assignment(c, assignment(index));
  return c;
}

std::string StateSpace::summary() const {
  std::ostringstream os;
  os << "cells=[";
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    os << (i ? "," : "") << cells_[i].name();
  }
  os << "] domain=" << domain_.size() << " values states=" << size();
  return os.str();
}

bool mem_equiv(const Config& a, const Config& b, const MemoryLayout& layout) {
  if (a.pc != b.pc || a.regs != b.regs || !(a.mu_state == b.mu_state) ||
      a.mispredicted != b.mispredicted || !(a.obs == b.obs) ||
      a.mem.size() != b.mem.size()) {
    return false;
  }
  for (std::size_t addr = 0; addr < a.mem.size(); ++addr) {
    if (layout.is_sandbox(static_cast<Value>(addr)) && a.mem[addr] != b.mem[addr]) {
      return false;
    }
  }
  return true;
}

}  // namespace zfi::checker
