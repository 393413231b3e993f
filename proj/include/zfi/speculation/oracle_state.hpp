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

#ifndef ZFI_SPECULATION_ORACLE_STATE_HPP_
#define ZFI_SPECULATION_ORACLE_STATE_HPP_

#include <map>
#include <vector>

#include "zfi/lang/value.hpp"

namespace zfi::speculation {

using lang::Value;

// Predictor state carried in a configuration: for each indirect transfer
// site, the targets it has architecturally reached since the last flush.
// The default-constructed state is the empty state (bottom).
struct OracleState {
  std::map<Value, std::vector<Value>> btb_history;

  bool is_bottom() const { return btb_history.empty(); }
  static OracleState bottom() { return {}; }

  friend bool operator==(const OracleState&, const OracleState&) = default;
};

}  // namespace zfi::speculation

#endif  // ZFI_SPECULATION_ORACLE_STATE_HPP_
