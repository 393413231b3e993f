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

#ifndef ZFI_TESTS_SUPPORT_SUPPORT_HPP_
#define ZFI_TESTS_SUPPORT_SUPPORT_HPP_

#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "zfi/checker/checker.hpp"
#include "zfi/hardening/passes.hpp"
#include "zfi/lang/program.hpp"
#include "zfi/machine/layout.hpp"
#include "zfi/machine/run.hpp"
#include "zfi/oracles/oracles.hpp"

namespace zfi::testing {

using Rng = std::mt19937_64;

std::string corpus_path(const std::string& name);
std::string read_text(const std::string& path);
std::shared_ptr<const lang::Program> load_corpus_program(const std::string& name);
machine::MemoryLayout load_corpus_layout(const std::string& name);

// Heap, stack and host regions sized for width w (3..5).
machine::MemoryLayout small_layout(unsigned w);

// Arbitrary programs of up to `max_len` instructions at addresses 0.., with
// every instruction form represented.
lang::Program random_program(Rng& rng, unsigned w, unsigned max_len);

// Random values for the general registers r0..r3 and every memory cell.
machine::Config random_state(Rng& rng, std::shared_ptr<const lang::Program> p,
                             const machine::MemoryLayout& layout);

// Programs shaped like compiled WebAssembly at w = 7: constant stack and
// globals offsets, heap and table offsets kept in bounds, the heap base
// never written, indirect calls only through jump-table code pointers held
// in r15, forward branches only, and leaf functions.
const machine::MemoryLayout& wasm_layout();
lang::Program random_wasm_program(Rng& rng);
machine::Config random_wasm_state(Rng& rng, std::shared_ptr<const lang::Program> p);

// Source-visible behaviour of an architectural run: the (is_store, address)
// sequence of loads and stores through sandbox bases that do not target a
// pass-reserved register, plus the final configuration.
struct Visible {
  std::vector<std::pair<bool, lang::Value>> accesses;
  machine::RunResult run;
};
Visible visible_run(const machine::Config& start, const machine::MemoryLayout& layout,
                    unsigned max_steps);

// An unoptimized reference for the bounded checker: every state pair, every
// fixed-length decision string over `alphabet` choices, a re-implemented
// oracle. Returns the violating pairs as (init1, init2) index pairs over
// the space, i < j.
struct NaiveResult {
  std::set<std::pair<std::size_t, std::size_t>> violating;
};
NaiveResult naive_check(checker::Property property,
                        std::shared_ptr<const lang::Program> program,
                        const machine::MemoryLayout& layout,
                        const checker::StateSpace& space,
                        const checker::CheckOptions& opts, unsigned alphabet);

}  // namespace zfi::testing

#endif  // ZFI_TESTS_SUPPORT_SUPPORT_HPP_
