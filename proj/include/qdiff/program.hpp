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

// ASTs for bounded, parameterized quantum while-programs and their additive
// extension with the nondeterministic sum "[]".
//
// Nodes are immutable and shared; a Program is a handle to the root node.
// Every node is validated on construction, so any Program value obtained
// through the builders below is well-formed. Sequences are kept in
// right-nested normal form: seq(seq(a, b), c) builds seq(a, seq(b, c)).

#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qdiff/gates.hpp"
#include "qdiff/qmath.hpp"
#include "qdiff/qvar.hpp"

namespace qdiff {

/// theta in R^k. Indexing with value(j) is 1-based to match parameter names.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<double> values);
  static ParamVector zeros(std::size_t k) { return ParamVector(std::vector<double>(k, 0.0)); }

  std::size_t size() const { return values_.size(); }
  double value(int j) const;
  const std::vector<double>& values() const { return values_; }
  /// Copy with theta_j shifted by delta.
  ParamVector shifted(int j, double delta) const;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

/// A named measurement {M_m}. Name "M" is reserved for the computational
/// basis of the measured register.
struct Measurement {
  std::string name;
  std::vector<ComplexMatrix> ops;

  static Measurement computational(std::size_t dim);
  bool is_computational() const { return name == "M"; }
  std::size_t outcomes() const { return ops.size(); }
  std::size_t dim() const { return ops.empty() ? 0 : static_cast<std::size_t>(ops.front().rows()); }

  friend bool operator==(const Measurement& a, const Measurement& b);
};

/// Builds a measurement from literal Kraus operators, rejecting it unless
/// sum_m M_m^dagger M_m = I within 1e-9.
Measurement make_measurement(const std::string& name, std::vector<ComplexMatrix> ops);

struct Node;
using Program = std::shared_ptr<const Node>;

struct AbortStmt {
  Register reg;
};
struct SkipStmt {
  Register reg;
};
struct InitStmt {
  QVar var;
};
struct ApplyStmt {
  Gate gate;
  Register reg;
};
struct SeqStmt {
  Program first;
  Program second;
};
struct CaseStmt {
  Register measured;
  Measurement meas;
  std::vector<Program> branches;
};
struct WhileStmt {
  int bound;
  Register measured;
  Measurement meas;
  Program body;
};
struct SumStmt {
  Program left;
  Program right;
};

struct Node {
  std::variant<AbortStmt, SkipStmt, InitStmt, ApplyStmt, SeqStmt, CaseStmt, WhileStmt, SumStmt> v;

  // Facts about the subtree, filled in by the builders.
  Register vars;            // qvar_set, in order of first appearance
  bool additive = false;    // contains a sum
  bool ess_aborts = false;  // essentially aborts
  bool simple = false;      // no sum, abort or while anywhere below
  int max_param = 0;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&v);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v);
  }
};

// Builders. Each validates the node and throws SemanticError/DimensionError.
Program make_abort(Register reg);
Program make_skip(Register reg);
Program make_init(QVar var);
Program make_apply(Gate gate, Register reg);
Program make_seq(Program first, Program second);
/// Folds a non-empty list into a right-nested sequence.
Program make_seq(const std::vector<Program>& stmts);
Program make_case(Register measured, Measurement meas, std::vector<Program> branches);
Program make_while(int bound, Register measured, Measurement meas, Program body);
Program make_sum(Program left, Program right);

/// Structural equality (matrices compared exactly).
bool structurally_equal(const Program& a, const Program& b);

/// True iff the tree contains a Sum node.
bool is_additive(const Program& p);

/// Variables accessible to p, in order of first appearance.
Register qvar_set(const Program& p);

/// Syntactic "essentially aborts": abort, a sequence with an essentially
/// aborting side, or a case whose branches all essentially abort.
bool essentially_aborts(const Program& p);

/// Unfolds a bounded while into nested cases:
///   while(1) -> case {0 -> skip, 1 -> body; abort}
///   while(T) -> case {0 -> skip, 1 -> body; <expansion of while(T-1)>}
/// Loops nested inside the body are left alone.
Program expand_while(const Program& while_node);

/// Replaces every while node in the tree by its expansion.
Program expand_all_whiles(const Program& p);

/// The three-statement gadget H[A]; CR_sigma(theta_j)[A, target]; H[A].
/// Throws SemanticError if the ancilla collides with the target.
Program expand_gadget(Axis axis, int param, const QVar& ancilla, const Register& target);

/// Largest parameter index referenced (0 if none).
int max_param_index(const Program& p);

/// Number of nodes of each kind, handy for tests and reports.
struct NodeCounts {
  int aborts = 0, skips = 0, inits = 0, applies = 0, seqs = 0, cases = 0, whiles = 0, sums = 0;
};
NodeCounts count_nodes(const Program& p);

}  // namespace qdiff
