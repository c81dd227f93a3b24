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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdiff/qmath.hpp"

namespace qdiff {

/// Rotation generator: a Pauli on one qubit or the same Pauli on two.
enum class Axis { X, Y, Z, XX, YY, ZZ };

/// Number of qubits the bare rotation acts on (1 or 2).
int axis_arity(Axis a);
/// "x", "y", "z", "xx", "yy", "zz"
std::string axis_suffix(Axis a);
std::optional<Axis> axis_from_suffix(const std::string& s);
/// The Pauli (or Pauli tensor Pauli) generator sigma.
ComplexMatrix axis_generator(Axis a);

enum class GateKind {
  Fixed,     // H, X, Y, Z, CNOT or a named literal matrix
  Rot,       // R_sigma(theta) = exp(-i theta/2 sigma)
  CtrlRot,   // |0><0| (x) R(theta) + |1><1| (x) R(theta + pi), control first
  Gadget,    // H_A ; CtrlRot ; H_A, the derivative gadget R'_sigma
};

/// A gate appearing in a unitary statement. Parameter indices are 1-based.
struct Gate {
  GateKind kind = GateKind::Fixed;
  std::string name;       // Fixed only: H, X, Y, Z, CNOT or a literal's name
  ComplexMatrix literal;  // Fixed literals only
  Axis axis = Axis::X;
  int param = 0;

  static Gate fixed(const std::string& name);
  static Gate literal_matrix(const std::string& name, ComplexMatrix u);
  static Gate rot(Axis axis, int param);
  static Gate ctrl_rot(Axis axis, int param);
  static Gate gadget(Axis axis, int param);

  bool is_parameterized() const { return kind != GateKind::Fixed; }
  /// True iff the gate depends on parameter j, i.e. does not "trivially use" it.
  bool uses_param(int j) const { return is_parameterized() && param == j; }
  /// Total dimension of the gate's unitary.
  std::size_t dim() const;
  /// Number of qubit wires for built-in and parameterized gates; 0 for
  /// literal matrices, which accept any register of matching total dimension.
  int arity() const;
  /// Surface name, e.g. "Rx", "Rzz'", "CRyy", "H".
  std::string display_name() const;

  friend bool operator==(const Gate& a, const Gate& b);
};

bool is_builtin_fixed_gate(const std::string& name);

/// R_sigma(theta).
ComplexMatrix rotation_matrix(Axis axis, double theta);
/// |0><0| (x) R_sigma(theta) + |1><1| (x) R_sigma(theta + pi).
ComplexMatrix controlled_shift_rotation(Axis axis, double theta);
/// (H (x) I) C_R_sigma(theta) (H (x) I).
ComplexMatrix gadget_matrix(Axis axis, double theta);
ComplexMatrix hadamard();

/// Unitary of `g` at parameter vector `theta` (0-based storage, 1-based g.param).
ComplexMatrix gate_matrix(const Gate& g, const std::vector<double>& theta);

}  // namespace qdiff
