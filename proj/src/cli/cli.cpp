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

#include "zfi/cli/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "zfi/checker/checker.hpp"
#include "zfi/hardening/passes.hpp"
#include "zfi/leakage/leaks.hpp"
#include "zfi/oracles/oracles.hpp"

namespace zfi::cli {
namespace {

using nlohmann::json;

// Errors that map to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

struct Inputs {
  std::string program_path;
  std::string layout_path;
  std::string init;
  unsigned width = 0;  // 0: take the program's .width
};

struct Loaded {
  std::shared_ptr<const lang::Program> program;
  machine::MemoryLayout layout;
  checker::Assignment init;
};

lang::Program load_program_text(const std::string& text, unsigned width) {
  lang::ParseOptions po;
  if (width != 0) po.width_override = width;
  return lang::parse_program(text, po);
}

Loaded load(const Inputs& in) {
  Loaded l;
  auto program = std::make_shared<lang::Program>(
      load_program_text(read_file(in.program_path), in.width));
  if (!in.layout_path.empty()) {
    l.layout = machine::MemoryLayout::from_json(read_file(in.layout_path));
  } else {
    machine::MemoryLayout::Spec spec;
    spec.width = program->width().bits();
    l.layout = machine::MemoryLayout(spec);
  }
  if (l.layout.width() != program->width()) {
    throw UsageError("program width " + std::to_string(program->width().bits()) +
                     " does not match layout width " +
                     std::to_string(l.layout.width().bits()));
  }
  l.init = checker::parse_assignment(in.init, program->width());
  l.program = std::move(program);
  return l;
}

void add_inputs(CLI::App* cmd, Inputs& in, bool init = true) {
  cmd->add_option("--program", in.program_path, "ZFI assembly file")->required();
  cmd->add_option("--layout", in.layout_path, "memory layout JSON");
  if (init) {
    cmd->add_option("--init", in.init, "initial cells, e.g. r1=3,mem[0x12]=5");
  }
  cmd->add_option("--width", in.width, "override the program word width");
}

oracles::OracleClass parse_class(const std::string& s) {
  auto c = oracles::class_from_name(s);
  if (!c) throw UsageError("unknown oracle class '" + s + "'");
  return *c;
}

std::vector<leakage::LeakModel> parse_models(const std::vector<std::string>& names) {
  std::vector<leakage::LeakModel> out;
  for (const auto& n : names) {
    if (n == "all") return {leakage::kAllModels.begin(), leakage::kAllModels.end()};
    auto m = leakage::model_from_name(n);
    if (!m) throw UsageError("unknown leakage model '" + n + "'");
    out.push_back(*m);
  }
  if (out.empty()) return {leakage::kAllModels.begin(), leakage::kAllModels.end()};
  return out;
}

json trace_json(const leakage::Trace& t) {
  json a = json::array();
  for (const auto& o : t) a.push_back(leakage::observation_text(o));
  return a;
}

leakage::Trace trace_from(const json& j) {
  std::string text;
  for (const auto& s : j) text += s.get<std::string>() + "\n";
  return leakage::parse_trace_dump(text);
}

// ---------------------------------------------------------------------------

struct RunArgs {
  Inputs in;
  unsigned steps = 16;
  std::string semantics = "arch";
  std::string oracle_class = "correct";
  std::string script;
  std::vector<std::string> models;
  bool as_json = false;
  bool strict = false;
};

int do_run(const RunArgs& a, std::ostream& out) {
  Loaded l = load(a.in);
  machine::Config c = machine::initial_config(l.program, l.layout);
  checker::apply_assignment(c, l.init);
  machine::RunResult r;
  std::string cls_name = "-";
  if (a.semantics == "arch") {
    r = machine::run_arch(c, l.layout, a.steps);
  } else if (a.semantics == "spec" || a.semantics == "cet") {
    const auto cls = parse_class(a.oracle_class);
    cls_name = std::string(oracles::class_name(cls));
    oracles::ClassOracle oracle(cls, oracles::parse_script(a.script));
    r = speculation::run_spec(c, l.layout, oracle, a.steps,
                              a.semantics == "cet" ? speculation::SpecMode::kCet
                                                   : speculation::SpecMode::kPlain);
  } else {
    throw UsageError("unknown semantics '" + a.semantics + "'");
  }
  const RunReport report =
      RunReport::from_run(r, a.semantics, cls_name, a.script, a.steps);
  const auto models = parse_models(a.models);
  if (a.as_json) {
    out << report.to_json() << "\n";
  } else {
    out << "semantics: " << report.semantics << "\n";
    out << "steps: " << report.steps << " of " << report.bound << "\n";
    out << "outcome: " << report.outcome;
    if (report.stuck_addr) out << " (address " << *report.stuck_addr << ")";
    out << "\n";
    out << "pc: " << report.pc << "\n";
    out << "mispredicted: " << (report.mispredicted ? "true" : "false") << "\n";
    out << "registers:";
    for (const auto& [name, v] : report.regs) {
      if (v != 0) out << " " << name << "=" << v;
    }
    out << "\n";
    for (auto m : models) {
      out << leakage::dump_trace(report.traces[static_cast<std::size_t>(m)], m);
    }
  }
  const bool abnormal =
      r.stuck && r.stuck->reason != machine::StuckReason::kHalt;
  return a.strict && abnormal ? kExitViolation : kExitOk;
}

// ---------------------------------------------------------------------------

struct HardenArgs {
  Inputs in;
  std::string pass;
  std::string out_path;
  std::string map_path;
};

int do_harden(const HardenArgs& a, std::ostream& out) {
  Loaded l = load(a.in);
  auto pass = hardening::pass_from_name(a.pass);
  if (!pass) throw UsageError("unknown pass '" + a.pass + "'");
  hardening::Lowered lowered = hardening::harden(*l.program, l.layout, *pass);
  const std::string text = lang::render_program(lowered.program);
  if (a.out_path.empty()) {
    out << text;
  } else {
    write_file(a.out_path, text);
  }
  if (!a.map_path.empty()) write_file(a.map_path, lowered.map.to_json() + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  Inputs in;
  std::string property = "breakout";
  std::string model;
  std::string oracle_class = "direction";
  std::string semantics;
  std::string harden = "none";
  std::string enumerate;
  std::string domain;
  std::string out_path;
  unsigned steps = 10;
  unsigned workers = 1;
  std::size_t max_states = 1u << 20;
  std::size_t max_oracles = 1u << 16;
  bool strict = false;
};

int do_check(const CheckArgs& a, std::ostream& out) {
  Loaded l = load(a.in);
  auto property = checker::property_from_name(a.property);
  if (!property) throw UsageError("unknown property '" + a.property + "'");

  std::shared_ptr<const lang::Program> program = l.program;
  speculation::SpecMode mode = speculation::SpecMode::kPlain;
  if (a.harden != "none") {
    auto pass = hardening::pass_from_name(a.harden);
    if (!pass) throw UsageError("unknown pass '" + a.harden + "'");
    program = std::make_shared<lang::Program>(
        hardening::harden(*program, l.layout, *pass).program);
    if (*pass == hardening::Pass::kCet) mode = speculation::SpecMode::kCet;
  }
  if (a.semantics == "cet") {
    mode = speculation::SpecMode::kCet;
  } else if (a.semantics == "spec") {
    mode = speculation::SpecMode::kPlain;
  } else if (!a.semantics.empty()) {
    throw UsageError("check semantics must be spec or cet");
  }

  checker::CheckOptions opts;
  opts.oracle_class = parse_class(a.oracle_class);
  opts.steps = a.steps;
  opts.mode = mode;
  opts.strict = a.strict;
  opts.workers = a.workers;
  opts.max_states = a.max_states;
  opts.max_oracles = a.max_oracles;
  if (a.model.empty()) {
    opts.model = *property == checker::Property::kBreakout ? leakage::LeakModel::kArch
                                                           : leakage::LeakModel::kCt;
  } else {
    auto m = leakage::model_from_name(a.model);
    if (!m) throw UsageError("unknown leakage model '" + a.model + "'");
    opts.model = *m;
  }

  const lang::Width w = program->width();
  std::vector<checker::Cell> cells;
  std::stringstream ss(a.enumerate);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) cells.push_back(checker::parse_cell(item, w));
  }
  machine::Config base = machine::initial_config(program, l.layout);
  checker::apply_assignment(base, l.init);
  checker::StateSpace space(base, cells,
                            checker::StateSpace::parse_domain(a.domain, w));

  const checker::Verdict v = checker::check(*property, program, l.layout, space, opts);
  const std::string report = checker::verdict_to_json(v, program.get(), &l.layout);
  out << report << "\n";
  if (!a.out_path.empty()) write_file(a.out_path, report + "\n");
  if (std::holds_alternative<checker::Violation>(v)) return kExitViolation;
  if (std::holds_alternative<checker::BudgetExceeded>(v)) return kExitBudget;
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReplayArgs {
  std::string report_path;
  std::string program_path;
  std::string layout_path;
  bool correct = false;
};

void print_trace_pair(std::ostream& out, const leakage::Trace& t,
                      std::size_t mark, const char* title) {
  out << "# " << title << "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << leakage::observation_text(t[i]) << (i == mark ? "   <- divergence" : "")
        << "\n";
  }
}

int do_replay(const ReplayArgs& a, std::ostream& out) {
  checker::ParsedViolation pv = checker::violation_from_json(read_file(a.report_path));
  std::string program_text;
  if (!a.program_path.empty()) {
    program_text = read_file(a.program_path);
  } else if (pv.program_text) {
    program_text = *pv.program_text;
  } else {
    throw UsageError("report has no embedded program; pass --program");
  }
  std::string layout_text;
  if (!a.layout_path.empty()) {
    layout_text = read_file(a.layout_path);
  } else if (pv.layout_json) {
    layout_text = *pv.layout_json;
  } else {
    throw UsageError("report has no embedded layout; pass --layout");
  }
  auto program = std::make_shared<lang::Program>(lang::parse_program(program_text));
  const auto layout = machine::MemoryLayout::from_json(layout_text);
  const auto& v = pv.violation;
  const checker::ReplayResult r = a.correct
                                      ? checker::replay_correct(v, program, layout)
                                      : checker::replay(v, program, layout);
  const auto& t1 = r.run1.final.obs.of(v.model);
  const auto& t2 = r.run2.final.obs.of(v.model);
  const std::size_t at = checker::first_difference(t1, t2);
  out << "model: " << leakage::model_name(v.model) << "\n";
  out << "script: " << (a.correct ? "(correct oracle)" : oracles::render_script(v.script))
      << "\n";
  out << "run 1: " << checker::render_assignment(v.init1) << "\n";
  out << "run 2: " << checker::render_assignment(v.init2) << "\n";
  print_trace_pair(out, t1, at, "run 1");
  print_trace_pair(out, t2, at, "run 2");
  if (a.correct) {
    out << (t1 == t2 ? "traces equal under the correct oracle\n"
                     : "traces differ under the correct oracle\n");
    return kExitOk;
  }
  const bool reproduced = t1 == v.trace1 && t2 == v.trace2;
  out << (reproduced ? "reproduced" : "NOT reproduced") << ": divergence at index "
      << at << "\n";
  return reproduced ? kExitOk : kExitViolation;
}

}  // namespace

// ---------------------------------------------------------------------------

RunReport RunReport::from_run(const machine::RunResult& r, std::string semantics,
                              std::string oracle_class, std::string script,
                              unsigned bound) {
  RunReport rep;
  rep.semantics = std::move(semantics);
  rep.oracle_class = std::move(oracle_class);
  rep.script = std::move(script);
  rep.bound = bound;
  rep.steps = r.steps.size();
  rep.outcome = r.stuck ? std::string(machine::stuck_reason_name(r.stuck->reason))
                        : "bound";
  if (r.stuck) rep.stuck_addr = r.stuck->addr;
  rep.pc = r.final.pc;
  rep.mispredicted = r.final.mispredicted;
  for (std::size_t i = 0; i < lang::kNumRegs; ++i) {
    rep.regs[std::string(lang::reg_name(static_cast<lang::Reg>(i)))] = r.final.regs[i];
  }
  rep.mem = r.final.mem;
  for (auto m : leakage::kAllModels) {
    rep.traces[static_cast<std::size_t>(m)] = r.final.obs.of(m);
  }
  return rep;
}

std::string RunReport::to_json() const {
  json j;
  j["semantics"] = semantics;
  j["oracle_class"] = oracle_class;
  j["script"] = script;
  j["bound"] = bound;
  j["steps"] = steps;
  j["outcome"] = outcome;
  j["stuck_addr"] = stuck_addr ? json(*stuck_addr) : json(nullptr);
  j["pc"] = pc;
  j["mispredicted"] = mispredicted;
  j["regs"] = regs;
  j["mem"] = mem;
  json traces = json::object();
  for (auto m : leakage::kAllModels) {
    traces[std::string(leakage::model_name(m))] =
        trace_json(this->traces[static_cast<std::size_t>(m)]);
  }
  j["traces"] = traces;
  return j.dump(2);
}

RunReport RunReport::from_json(const std::string& text) {
  const json j = json::parse(text);
  RunReport r;
  r.semantics = j.at("semantics").get<std::string>();
  r.oracle_class = j.at("oracle_class").get<std::string>();
  r.script = j.at("script").get<std::string>();
  r.bound = j.at("bound").get<unsigned>();
  r.steps = j.at("steps").get<std::size_t>();
  r.outcome = j.at("outcome").get<std::string>();
  if (!j.at("stuck_addr").is_null()) r.stuck_addr = j["stuck_addr"].get<lang::Value>();
  r.pc = j.at("pc").get<lang::Value>();
  r.mispredicted = j.at("mispredicted").get<bool>();
  r.regs = j.at("regs").get<std::map<std::string, lang::Value>>();
  r.mem = j.at("mem").get<std::vector<lang::Value>>();
  for (auto m : leakage::kAllModels) {
    r.traces[static_cast<std::size_t>(m)] =
        trace_from(j.at("traces").at(std::string(leakage::model_name(m))));
  }
  return r;
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"ZFI speculative-execution model: run, harden, check, replay"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "execute a program");
  add_inputs(run_cmd, run.in);
  run_cmd->add_option("--steps,-n", run.steps, "step bound");
  run_cmd->add_option("--semantics", run.semantics, "arch | spec | cet")
      ->check(CLI::IsMember({"arch", "spec", "cet"}));
  run_cmd->add_option("--oracle-class,--oracle", run.oracle_class,
                      "correct | direction | btb | scripted");
  run_cmd->add_option("--script", run.script,
                      "oracle decisions, e.g. fall,taken,0,@12");
  run_cmd->add_option("--model", run.models, "dmem | ct | arch | all (repeatable)");
  run_cmd->add_flag("--json", run.as_json, "emit the run report as JSON");
  run_cmd->add_flag("--strict", run.strict,
                    "exit nonzero if the run gets stuck before the bound "
                    "(halting is not stuck)");

  HardenArgs harden;
  auto* harden_cmd = app.add_subcommand("harden", "apply a hardening pass");
  add_inputs(harden_cmd, harden.in, false);
  harden_cmd->add_option("--pass", harden.pass, "mask | sfi | cet")
      ->required()
      ->check(CLI::IsMember({"mask", "sfi", "cet"}));
  harden_cmd->add_option("--out,-o", harden.out_path, "write the program here");
  harden_cmd->add_option("--block-map", harden.map_path, "write the block map JSON here");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "bounded security check");
  add_inputs(check_cmd, check.in);
  check_cmd->add_option("--property", check.property, "breakout | poisoning")
      ->check(CLI::IsMember({"breakout", "poisoning"}));
  check_cmd->add_option("--model", check.model, "dmem | ct | arch");
  check_cmd->add_option("--oracle-class,--oracle", check.oracle_class,
                        "correct | direction | btb | scripted");
  check_cmd->add_option("--steps,-n", check.steps, "step bound");
  check_cmd->add_option("--enumerate", check.enumerate,
                        "cells ranging over the domain, e.g. r1,mem[0x12]");
  check_cmd->add_option("--domain", check.domain, "lo..hi or a,b,c (default: all)");
  check_cmd->add_option("--harden", check.harden, "none | mask | sfi | cet")
      ->check(CLI::IsMember({"none", "mask", "sfi", "cet"}));
  check_cmd->add_option("--semantics", check.semantics, "spec | cet");
  check_cmd->add_flag("--strict-trace-equality", check.strict,
                      "termination differences count as violations");
  check_cmd->add_option("--workers,-j", check.workers, "parallel workers");
  check_cmd->add_option("--max-states", check.max_states, "state budget");
  check_cmd->add_option("--max-oracles", check.max_oracles, "oracle budget");
  check_cmd->add_option("--out,-o", check.out_path, "also write the verdict here");

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a violation report");
  replay_cmd->add_option("--report", replay.report_path, "violation JSON")->required();
  replay_cmd->add_option("--program", replay.program_path,
                         "program text (default: embedded in the report)");
  replay_cmd->add_option("--layout", replay.layout_path,
                         "layout JSON (default: embedded in the report)");
  replay_cmd->add_flag("--correct", replay.correct,
                       "replay with the correct oracle instead of the script");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return do_run(run, out);
    if (*harden_cmd) return do_harden(harden, out);
    if (*check_cmd) return do_check(check, out);
    if (*replay_cmd) return do_replay(replay, out);
  } catch (const lang::ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const machine::LayoutError& e) {
    err << "layout error: " << e.what() << "\n";
  } catch (const hardening::HardeningError& e) {
    err << "hardening error: " << e.what() << "\n";
  } catch (const checker::ReplayError& e) {
    err << "replay error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace zfi::cli
