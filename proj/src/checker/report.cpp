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

#include <cstdio>

#include <json.hpp>

#include "zfi/checker/checker.hpp"
#include "zfi/lang/program.hpp"

namespace zfi::checker {
namespace {

using nlohmann::json;

json trace_json(const leakage::Trace& t) {
  json out = json::array();
  for (const auto& o : t) out.push_back(leakage::observation_text(o));
  return out;
}

leakage::Trace trace_from(const json& j) {
  std::string text;
  for (const auto& line : j) text += line.get<std::string>() + "\n";
  return leakage::parse_trace_dump(text);
}

json assignment_json(const Assignment& a) {
  json out = json::object();
  for (const auto& [cell, v] : a) out[cell.name()] = v;
  return out;
}

Assignment assignment_from(const json& j, lang::Width w) {
  Assignment out;
  for (const auto& [name, v] : j.items()) {
    out.emplace_back(parse_cell(name, w), v.get<Value>());
  }
  return out;
}

std::string hex64(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string verdict_to_json(const Verdict& verdict, const Program* program,
                            const MemoryLayout* layout) {
  json j;
  if (program) j["program_hash"] = hex64(lang::program_hash(*program));
  if (const auto* s = std::get_if<SecureUpTo>(&verdict)) {
    j["verdict"] = "secure";
    j["steps"] = s->steps;
    j["oracle_class"] = oracles::class_name(s->oracle_class);
    j["states"] = s->states;
    j["oracles"] = s->oracles;
    j["comparisons"] = s->comparisons;
    j["space"] = s->space;
  } else if (const auto* b = std::get_if<BudgetExceeded>(&verdict)) {
    j["verdict"] = "budget_exceeded";
    j["budget"] = b->what;
    j["limit"] = b->limit;
  } else {
    const auto& v = std::get<Violation>(verdict);
    j["verdict"] = "violation";
    j["property"] = property_name(v.property);
    j["model"] = leakage::model_name(v.model);
    j["oracle_class"] = oracles::class_name(v.oracle_class);
    j["semantics"] = v.mode == SpecMode::kCet ? "cet" : "spec";
    j["steps"] = v.steps;
    j["strict"] = v.strict;
    j["script"] = oracles::render_script(v.script);
    j["base_init"] = assignment_json(v.base_init);
    j["init1"] = assignment_json(v.init1);
    j["init2"] = assignment_json(v.init2);
    j["trace1"] = trace_json(v.trace1);
    j["trace2"] = trace_json(v.trace2);
    j["divergence_index"] = v.divergence_index;
    j["divergence_step"] = v.divergence_step;
    j["mispredicted_at_divergence"] = v.mispredicted_at_divergence;
    j["program_hash"] = hex64(v.program_hash);
    j["space"] = v.space;
    if (program) j["program"] = lang::render_program(*program);
    if (layout) j["layout"] = json::parse(layout->to_json());
  }
  return j.dump(2);
}

ParsedViolation violation_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("report is not valid JSON: ") +
                                e.what());
  }
  try {
    if (j.at("verdict") != "violation") {
      throw std::invalid_argument("report does not describe a violation");
    }
    ParsedViolation out;
    if (j.contains("program")) out.program_text = j["program"].get<std::string>();
    if (j.contains("layout")) out.layout_json = j["layout"].dump();
    // Cell names need the width only for range checks; use the widest.
    const lang::Width w(lang::kMaxWidth);
    Violation& v = out.violation;
    auto prop = property_from_name(j.at("property").get<std::string>());
    auto model = leakage::model_from_name(j.at("model").get<std::string>());
    auto cls = oracles::class_from_name(j.at("oracle_class").get<std::string>());
    if (!prop || !model || !cls) {
      throw std::invalid_argument("unknown property, model, or oracle class");
    }
    v.property = *prop;
    v.model = *model;
    v.oracle_class = *cls;
    v.mode = j.at("semantics") == "cet" ? SpecMode::kCet : SpecMode::kPlain;
    v.steps = j.at("steps").get<unsigned>();
    v.strict = j.value("strict", false);
    v.script = oracles::parse_script(j.at("script").get<std::string>());
    const json base_init = j.value("base_init", json::object());
    v.base_init = assignment_from(base_init, w);
    v.init1 = assignment_from(j.at("init1"), w);
    v.init2 = assignment_from(j.at("init2"), w);
    v.trace1 = trace_from(j.at("trace1"));
    v.trace2 = trace_from(j.at("trace2"));
    v.divergence_index = j.at("divergence_index").get<std::size_t>();
    v.divergence_step = j.at("divergence_step").get<std::size_t>();
    v.mispredicted_at_divergence = j.value("mispredicted_at_divergence", false);
    v.program_hash = std::stoull(j.at("program_hash").get<std::string>(), nullptr, 16);
    v.space = j.value("space", "");
    return out;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed violation report: ") +
                                e.what());
  }
}

}  // namespace zfi::checker
