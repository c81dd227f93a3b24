// Copyright 2026 The qdiff Authors
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

// Compilation of additive programs to multisets of plain programs, and the
// resource counts built on it.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdiff/program.hpp"

namespace qdiff {

/// Multiset of plain programs. Normal form: either a single abort, or no
/// member essentially aborts.
struct CompiledMultiset {
  std::vector<Program> members;
  Program source;
  /// True when some essentially aborting sub-result was discarded.
  bool aborting_pruned = false;

  std::size_t size() const { return members.size(); }
  /// Exactly {| abort |}.
  bool is_abort() const { return members.size() == 1 && members.front()->is<AbortStmt>(); }
};

CompiledMultiset compile(const Program& p);

/// Fill and Break for a case node. `abort_reg` is the register used for the
/// abort padding and for the all-abort result.
CompiledMultiset fill_and_break(const Register& measured, const Measurement& meas,
                                const std::vector<CompiledMultiset>& branches, const Register& abort_reg);

/// Number of non-aborting programs: |compile(p)| minus its essentially
/// aborting members.
std::size_t nna(const Program& p);
std::size_t nna(const CompiledMultiset& c);

/// Static count of non-trivial uses of parameter j. Throws SemanticError on
/// additive input.
std::uint64_t occurrence_count(const Program& p, int j);

/// Columns of a resource table for one program.
struct ResourceReport {
  int num_params = 0;
  std::vector<std::uint64_t> oc;    // per parameter, index 0 = th1
  std::vector<std::uint64_t> nna;   // per parameter
  std::uint64_t gate_count = 0;     // while bodies counted T times
  std::uint64_t layer_count = 0;
  std::size_t qubit_count = 0;
  std::size_t line_count = 0;
  int headline_param = 1;
};

/// Counts for p with k parameters (k = 0 means the largest referenced index).
ResourceReport resource_report(const Program& p, int k = 0);

/// Unitary statements, with while bodies multiplied by T and case branches summed.
std::uint64_t gate_count(const Program& p);
/// Depth in rotate/entangle layers: a maximal run of unitaries counts 1, case
/// takes the deepest branch, while multiplies its body by T.
std::uint64_t layer_count(const Program& p);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace qdiff
