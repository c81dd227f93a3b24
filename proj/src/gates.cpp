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

#include "qdiff/gates.hpp"

#include <cmath>
#include <numbers>

#include "qdiff/errors.hpp"

namespace qdiff {

namespace {

ComplexMatrix pauli(char c) {
  ComplexMatrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (c) {
    case 'X': m << 0.0, 1.0, 1.0, 0.0; break;
    case 'Y': m << 0.0, -i, i, 0.0; break;
    case 'Z': m << 1.0, 0.0, 0.0, -1.0; break;
    default: throw SemanticError(std::string("unknown Pauli ") + c);
  }
  return m;
}

ComplexMatrix cnot() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 3) = 1.0;
  m(3, 2) = 1.0;
  return m;
}

}  // namespace

int axis_arity(Axis a) { return (a == Axis::X || a == Axis::Y || a == Axis::Z) ? 1 : 2; }

std::string axis_suffix(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
    case Axis::XX: return "xx";
    case Axis::YY: return "yy";
    case Axis::ZZ: return "zz";
  }
  return "?";
}

std::optional<Axis> axis_from_suffix(const std::string& s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  if (s == "xx") return Axis::XX;
  if (s == "yy") return Axis::YY;
  if (s == "zz") return Axis::ZZ;
  return std::nullopt;
}

ComplexMatrix axis_generator(Axis a) {
  switch (a) {
    case Axis::X: return pauli('X');
    case Axis::Y: return pauli('Y');
    case Axis::Z: return pauli('Z');
    case Axis::XX: return tensor(pauli('X'), pauli('X'));
    case Axis::YY: return tensor(pauli('Y'), pauli('Y'));
    case Axis::ZZ: return tensor(pauli('Z'), pauli('Z'));
  }
  throw SemanticError("unknown axis");
}

ComplexMatrix hadamard() {
  ComplexMatrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

// sigma squares to I, so exp(-i theta/2 sigma) = cos(theta/2) I - i sin(theta/2) sigma.
ComplexMatrix rotation_matrix(Axis axis, double theta) {
  const ComplexMatrix g = axis_generator(axis);
  return std::cos(theta / 2) * identity(static_cast<std::size_t>(g.rows())) -
         Complex(0.0, std::sin(theta / 2)) * g;
}

ComplexMatrix controlled_shift_rotation(Axis axis, double theta) {
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return tensor(p0, rotation_matrix(axis, theta)) + tensor(p1, rotation_matrix(axis, theta + std::numbers::pi));
}

ComplexMatrix gadget_matrix(Axis axis, double theta) {
  const auto target_dim = static_cast<std::size_t>(1) << axis_arity(axis);
  const ComplexMatrix ha = tensor(hadamard(), identity(target_dim));
  return ha * controlled_shift_rotation(axis, theta) * ha;
}

bool is_builtin_fixed_gate(const std::string& name) {
  return name == "H" || name == "X" || name == "Y" || name == "Z" || name == "CNOT";
}

Gate Gate::fixed(const std::string& name) {
  if (!is_builtin_fixed_gate(name)) throw SemanticError("unknown gate '" + name + "'");
  Gate g;
  g.kind = GateKind::Fixed;
  g.name = name;
  return g;
}

Gate Gate::literal_matrix(const std::string& name, ComplexMatrix u) {
  if (u.rows() != u.cols() || u.rows() < 2) throw DimensionError("gate '" + name + "' must be a square matrix");
  if (!all_finite(u)) throw NumericError("gate '" + name + "' has non-finite entries");
  const double defect = max_abs_diff(u.adjoint() * u, identity(static_cast<std::size_t>(u.rows())));
  if (defect > 1e-9) throw NumericError("gate '" + name + "' is not unitary (defect " + std::to_string(defect) + ")");
  Gate g;
  g.kind = GateKind::Fixed;
  g.name = name;
  g.literal = std::move(u);
  return g;
}

namespace {
Gate param_gate(GateKind kind, Axis axis, int param) {
  if (param < 1) throw SemanticError("parameter index must be >= 1");
  Gate g;
  g.kind = kind;
  g.axis = axis;
  g.param = param;
  return g;
}
}  // namespace

Gate Gate::rot(Axis axis, int param) { return param_gate(GateKind::Rot, axis, param); }
Gate Gate::ctrl_rot(Axis axis, int param) { return param_gate(GateKind::CtrlRot, axis, param); }
Gate Gate::gadget(Axis axis, int param) { return param_gate(GateKind::Gadget, axis, param); }

int Gate::arity() const {
  switch (kind) {
    case GateKind::Fixed:
      if (literal.size() != 0) return 0;
      return name == "CNOT" ? 2 : 1;
    case GateKind::Rot: return axis_arity(axis);
    case GateKind::CtrlRot:
    case GateKind::Gadget: return axis_arity(axis) + 1;
  }
  return 0;
}

std::size_t Gate::dim() const {
  if (kind == GateKind::Fixed && literal.size() != 0) return static_cast<std::size_t>(literal.rows());
  return static_cast<std::size_t>(1) << arity();
}

std::string Gate::display_name() const {
  switch (kind) {
    case GateKind::Fixed: return name;
    case GateKind::Rot: return "R" + axis_suffix(axis);
    case GateKind::CtrlRot: return "CR" + axis_suffix(axis);
    case GateKind::Gadget: return "R" + axis_suffix(axis) + "'";
  }
  return "?";
}

bool operator==(const Gate& a, const Gate& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == GateKind::Fixed) {
    if (a.name != b.name) return false;
    if (a.literal.rows() != b.literal.rows() || a.literal.cols() != b.literal.cols()) return false;
    return a.literal.size() == 0 || a.literal == b.literal;
  }
  return a.axis == b.axis && a.param == b.param;
}

ComplexMatrix gate_matrix(const Gate& g, const std::vector<double>& theta) {
  auto angle = [&]() {
    if (g.param < 1 || static_cast<std::size_t>(g.param) > theta.size()) {
      throw SemanticError("gate " + g.display_name() + " references th" + std::to_string(g.param) +
                          " but only " + std::to_string(theta.size()) + " parameters are bound");
    }
    return theta[static_cast<std::size_t>(g.param) - 1];
  };
  switch (g.kind) {
    case GateKind::Fixed:
      if (g.literal.size() != 0) return g.literal;
      if (g.name == "H") return hadamard();
      if (g.name == "CNOT") return cnot();
      return pauli(g.name.at(0));
    case GateKind::Rot: return rotation_matrix(g.axis, angle());
    case GateKind::CtrlRot: return controlled_shift_rotation(g.axis, angle());
    case GateKind::Gadget: return gadget_matrix(g.axis, angle());
  }
  throw SemanticError("unknown gate kind");
}

}  // namespace qdiff
