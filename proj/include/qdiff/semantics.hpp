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

// Evaluators: denotational semantics, small-step trace enumeration and
// observable semantics (plain, additive and with a derivative ancilla).

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qdiff/program.hpp"
#include "qdiff/qmath.hpp"

namespace qdiff {

/// Tensor layout of a register: wire i carries reg[i], most significant first.
class Layout {
 public:
  /// Throws DimensionError if the total dimension exceeds `max_dim`.
  explicit Layout(Register reg, std::size_t max_dim = kDefaultMaxDimension);

  const Register& vars() const { return vars_; }
  const TensorShape& shape() const { return shape_; }
  std::size_t dim() const { return shape_.total(); }
  /// Wire indices of `reg`; throws SemanticError for variables outside the layout.
  std::vector<int> wires(const Register& reg) const;

 private:
  Register vars_;
  TensorShape shape_;
};

/// A plain program lowered onto a fixed layout: wires resolved and index
/// tables precomputed, so it can be run repeatedly at different theta.
/// The map is linear and accepts any square matrix of the layout's dimension.
class Executable {
 public:
  /// Throws SemanticError for additive programs or variables outside the layout.
  Executable(const Program& p, const Layout& layout);
  ~Executable();
  Executable(Executable&&) noexcept;
  Executable& operator=(Executable&&) noexcept;

  /// [[P(theta)]](rho).
  ComplexMatrix apply(const std::vector<double>& theta, const ComplexMatrix& rho) const;
  /// The Heisenberg dual [[P(theta)]]^*(o).
  ComplexMatrix dual(const std::vector<double>& theta, const ComplexMatrix& o) const;
  /// One quantum trajectory from the unit vector psi: every Kraus or
  /// measurement branch n is taken with probability ||K_n psi||^2 and the
  /// state renormalized. `uniform01` supplies draws in [0, 1). Returns
  /// nullopt when the trajectory reaches an abort.
  std::optional<ComplexVector> trajectory(const std::vector<double>& theta, ComplexVector psi,
                                          const std::function<double()>& uniform01) const;

  struct Node;

 private:
  std::unique_ptr<Node> root_;
  std::size_t dim_;
};

/// The non-aborting compiled members of a (possibly additive) program,
/// lowered onto one layout. Applying it sums the members' outputs.
class MemberExecutable {
 public:
  MemberExecutable(const Program& p, const Layout& layout);

  std::size_t size() const { return members_.size(); }
  const std::vector<Program>& programs() const { return programs_; }
  const Executable& member(std::size_t i) const { return members_[i]; }

  ComplexMatrix apply(const std::vector<double>& theta, const ComplexMatrix& rho) const;
  /// Sum over members of tr(obs [[P_i]](rho)).
  double expectation(const std::vector<double>& theta, const ComplexMatrix& obs, const ComplexMatrix& rho) const;

 private:
  std::vector<Program> programs_;
  std::vector<Executable> members_;
  std::size_t dim_;
};

/// [[p(theta)]](rho) with the layout qvar_set(p).
DensityOperator denote(const Program& p, const ParamVector& theta, const DensityOperator& rho);
/// Same on an explicit layout containing qvar_set(p).
DensityOperator denote(const Program& p, const Layout& layout, const ParamVector& theta, const DensityOperator& rho);

/// One maximal execution trace: its final state and the choices made,
/// e.g. "c1.s0" = case outcome 1 then the left side of a sum.
struct TraceOutcome {
  ComplexMatrix state;
  std::string path;
};

struct FinalMultiset {
  std::vector<TraceOutcome> outcomes;

  std::size_t size() const { return outcomes.size(); }
  /// Sum of all final states.
  ComplexMatrix total(std::size_t dim) const;
  /// Copy without the zero states (max |entry| <= tol).
  FinalMultiset nonzero(double tol = 1e-12) const;
};

/// Enumerates every maximal small-step trace, exploring case outcomes in
/// order and the left side of a sum first. Zero states are kept unless
/// `drop_zero` is set.
FinalMultiset trace_enumerate(const Program& p, const Layout& layout, const ParamVector& theta,
                              const DensityOperator& rho, bool drop_zero = false);

struct MatchResult {
  bool matched = false;
  double max_distance = 0.0;
};

/// Order-insensitive equality of two multisets of states: greedy minimal
/// Frobenius-distance pairing, every pair within `threshold`.
MatchResult match_multisets(const std::vector<ComplexMatrix>& a, const std::vector<ComplexMatrix>& b,
                            double threshold = 1e-9);

/// tr(O [[p]] rho). For additive p, the sum over the compiled members.
double observable_semantics(const Program& p, const Layout& layout, const Observable& o, const DensityOperator& rho,
                            const ParamVector& theta);
/// Convenience form with the layout qvar_set(p).
double observable_semantics(const Program& p, const Observable& o, const DensityOperator& rho,
                            const ParamVector& theta);

/// tr((oA (x) O) [[p]](|0><0|_A (x) rho)) on the layout [ancilla] + v, summed
/// over compiled members when p is additive. `oA` defaults to Z.
double observable_semantics_ancilla(const Program& p, const QVar& ancilla, const Layout& v, const Observable& o,
                                    const DensityOperator& rho, const ParamVector& theta);
double observable_semantics_ancilla(const Program& p, const QVar& ancilla, const Layout& v, const Observable& o,
                                    const DensityOperator& rho, const ParamVector& theta, const Observable& oA);

/// [[p(theta)]]^*(o) for a plain program. Throws SemanticError on a Sum.
ComplexMatrix program_dual_observable(const Program& p, const Layout& layout, const ParamVector& theta,
                                      const ComplexMatrix& o);

/// Ancilla layout [ancilla] + v.
Layout ancilla_layout(const QVar& ancilla, const Layout& v);

}  // namespace qdiff
