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

#include "qdiff/program.hpp"

#include <algorithm>

#include "qdiff/errors.hpp"

namespace qdiff {

// ---- ParamVector ------------------------------------------------------------

ParamVector::ParamVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericError("parameter vector has a non-finite entry");
  }
}

double ParamVector::value(int j) const {
  if (j < 1 || static_cast<std::size_t>(j) > values_.size()) {
    throw SemanticError("parameter index " + std::to_string(j) + " out of range [1, " +
                        std::to_string(values_.size()) + "]");
  }
  return values_[static_cast<std::size_t>(j) - 1];
}

ParamVector ParamVector::shifted(int j, double delta) const {
  (void)value(j);
  std::vector<double> v = values_;
  v[static_cast<std::size_t>(j) - 1] += delta;
  return ParamVector(std::move(v));
}

// ---- Measurement ------------------------------------------------------------

Measurement Measurement::computational(std::size_t dim) {
  Measurement m;
  m.name = "M";
  for (std::size_t k = 0; k < dim; ++k) m.ops.push_back(DensityOperator::basis(dim, k).matrix());
  return m;
}

bool operator==(const Measurement& a, const Measurement& b) {
  if (a.name != b.name || a.ops.size() != b.ops.size()) return false;
  for (std::size_t i = 0; i < a.ops.size(); ++i) {
    if (a.ops[i].rows() != b.ops[i].rows() || a.ops[i] != b.ops[i]) return false;
  }
  return true;
}

Measurement make_measurement(const std::string& name, std::vector<ComplexMatrix> ops) {
  if (ops.size() < 2) throw SemanticError("measurement '" + name + "' needs at least two outcomes");
  const auto d = ops.front().rows();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (const auto& m : ops) {
    if (m.rows() != d || m.cols() != d) throw DimensionError("measurement '" + name + "' has inconsistent shapes");
    if (!all_finite(m)) throw NumericError("measurement '" + name + "' has non-finite entries");
    acc += m.adjoint() * m;
  }
  const double defect = max_abs_diff(acc, identity(static_cast<std::size_t>(d)));
  if (defect > 1e-9) {
    throw SemanticError("measurement '" + name + "' is not complete: sum M^dagger M differs from I by " +
                        std::to_string(defect));
  }
  return Measurement{name, std::move(ops)};
}

// ---- builders ---------------------------------------------------------------

namespace {

Program wrap(auto stmt) {
  Node n{std::move(stmt), {}, false, false, false, 0};
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AbortStmt>) {
          n.vars = x.reg;
          n.ess_aborts = true;
        } else if constexpr (std::is_same_v<T, SkipStmt>) {
          n.vars = x.reg;
          n.simple = true;
        } else if constexpr (std::is_same_v<T, InitStmt>) {
          n.vars = {x.var};
          n.simple = true;
        } else if constexpr (std::is_same_v<T, ApplyStmt>) {
          n.vars = x.reg;
          n.simple = true;
          n.max_param = x.gate.is_parameterized() ? x.gate.param : 0;
        } else if constexpr (std::is_same_v<T, SeqStmt> || std::is_same_v<T, SumStmt>) {
          Program a, b;
          if constexpr (std::is_same_v<T, SeqStmt>) {
            a = x.first;
            b = x.second;
          } else {
            a = x.left;
            b = x.right;
          }
          n.vars = register_union(a->vars, b->vars);
          n.additive = std::is_same_v<T, SumStmt> || a->additive || b->additive;
          n.ess_aborts = std::is_same_v<T, SeqStmt> && (a->ess_aborts || b->ess_aborts);
          n.simple = std::is_same_v<T, SeqStmt> && a->simple && b->simple;
          n.max_param = std::max(a->max_param, b->max_param);
        } else if constexpr (std::is_same_v<T, CaseStmt>) {
          n.vars = x.measured;
          n.ess_aborts = true;
          n.simple = true;
          for (const auto& b : x.branches) {
            n.vars = register_union(n.vars, b->vars);
            n.additive = n.additive || b->additive;
            n.ess_aborts = n.ess_aborts && b->ess_aborts;
            n.simple = n.simple && b->simple;
            n.max_param = std::max(n.max_param, b->max_param);
          }
        } else {
          n.vars = register_union(x.measured, x.body->vars);
          n.additive = x.body->additive;
          n.max_param = x.body->max_param;
        }
      },
      n.v);
  return std::make_shared<const Node>(std::move(n));
}

void require_nonempty(const Register& reg, const char* what) {
  if (reg.empty()) throw SemanticError(std::string(what) + " needs a non-empty register");
  validate_register(reg);
}

void require_program(const Program& p) {
  if (!p) throw SemanticError("null program");
}

void check_measured(const Register& measured, const Measurement& meas) {
  require_nonempty(measured, "measurement");
  if (meas.dim() != register_dim(measured)) {
    throw DimensionError("measurement '" + meas.name + "' has dimension " + std::to_string(meas.dim()) +
                         " but register " + register_to_string(measured) + " has dimension " +
                         std::to_string(register_dim(measured)));
  }
}

}  // namespace

Program make_abort(Register reg) {
  require_nonempty(reg, "abort");
  return wrap(AbortStmt{std::move(reg)});
}

Program make_skip(Register reg) {
  require_nonempty(reg, "skip");
  return wrap(SkipStmt{std::move(reg)});
}

Program make_init(QVar var) {
  validate_register({var});
  return wrap(InitStmt{std::move(var)});
}

Program make_apply(Gate gate, Register reg) {
  require_nonempty(reg, "unitary");
  const int arity = gate.arity();
  if (arity > 0) {
    if (static_cast<int>(reg.size()) != arity) {
      throw DimensionError("gate " + gate.display_name() + " acts on " + std::to_string(arity) +
                           " qubit(s) but register " + register_to_string(reg) + " has " +
                           std::to_string(reg.size()));
    }
    for (const auto& v : reg) {
      if (v.dim != 2) throw DimensionError("gate " + gate.display_name() + " needs qubits; '" + v.name + "' has dim " + std::to_string(v.dim));
    }
  } else if (register_dim(reg) != gate.dim()) {
    throw DimensionError("gate " + gate.display_name() + " has dimension " + std::to_string(gate.dim()) +
                         " but register " + register_to_string(reg) + " has dimension " +
                         std::to_string(register_dim(reg)));
  }
  return wrap(ApplyStmt{std::move(gate), std::move(reg)});
}

Program make_seq(Program first, Program second) {
  require_program(first);
  require_program(second);
  if (const auto* s = first->as<SeqStmt>()) return make_seq(s->first, make_seq(s->second, std::move(second)));
  return wrap(SeqStmt{std::move(first), std::move(second)});
}

Program make_seq(const std::vector<Program>& stmts) {
  if (stmts.empty()) throw SemanticError("empty statement list");
  Program acc = stmts.back();
  for (std::size_t i = stmts.size() - 1; i-- > 0;) acc = make_seq(stmts[i], acc);
  return acc;
}

Program make_case(Register measured, Measurement meas, std::vector<Program> branches) {
  check_measured(measured, meas);
  if (branches.size() != meas.outcomes()) {
    throw SemanticError("case has " + std::to_string(branches.size()) + " branches but measurement '" + meas.name +
                        "' has " + std::to_string(meas.outcomes()) + " outcomes");
  }
  for (const auto& b : branches) require_program(b);
  return wrap(CaseStmt{std::move(measured), std::move(meas), std::move(branches)});
}

Program make_while(int bound, Register measured, Measurement meas, Program body) {
  if (bound < 1) throw SemanticError("while bound must be >= 1, got " + std::to_string(bound));
  check_measured(measured, meas);
  if (meas.outcomes() != 2) throw SemanticError("while guard measurement must have exactly two outcomes");
  require_program(body);
  return wrap(WhileStmt{bound, std::move(measured), std::move(meas), std::move(body)});
}

Program make_sum(Program left, Program right) {
  require_program(left);
  require_program(right);
  return wrap(SumStmt{std::move(left), std::move(right)});
}

// ---- structural predicates --------------------------------------------------

bool structurally_equal(const Program& a, const Program& b) {
  if (a == b) return true;
  if (!a || !b || a->v.index() != b->v.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b->v);
        if constexpr (std::is_same_v<T, AbortStmt> || std::is_same_v<T, SkipStmt>) {
          return x.reg == y.reg;
        } else if constexpr (std::is_same_v<T, InitStmt>) {
          return x.var == y.var;
        } else if constexpr (std::is_same_v<T, ApplyStmt>) {
          return x.gate == y.gate && x.reg == y.reg;
        } else if constexpr (std::is_same_v<T, SeqStmt>) {
          return structurally_equal(x.first, y.first) && structurally_equal(x.second, y.second);
        } else if constexpr (std::is_same_v<T, CaseStmt>) {
          if (!(x.measured == y.measured) || !(x.meas == y.meas) || x.branches.size() != y.branches.size()) return false;
          for (std::size_t i = 0; i < x.branches.size(); ++i) {
            if (!structurally_equal(x.branches[i], y.branches[i])) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return x.bound == y.bound && x.measured == y.measured && x.meas == y.meas &&
                 structurally_equal(x.body, y.body);
        } else {
          return structurally_equal(x.left, y.left) && structurally_equal(x.right, y.right);
        }
      },
      a->v);
}

bool is_additive(const Program& p) { return p->additive; }

Register qvar_set(const Program& p) { return p->vars; }

bool essentially_aborts(const Program& p) { return p->ess_aborts; }

Program expand_while(const Program& while_node) {
  const auto* w = while_node->as<WhileStmt>();
  if (!w) throw SemanticError("expand_while: not a while statement");
  const Register vars = qvar_set(while_node);
  // Innermost level first: while(1) ends in abort.
  Program tail = make_abort(vars);
  for (int level = 1; level <= w->bound; ++level) {
    Program loop_branch = make_seq(w->body, tail);
    tail = make_case(w->measured, w->meas, {make_skip(vars), loop_branch});
  }
  return tail;
}

Program expand_all_whiles(const Program& p) {
  return std::visit(
      [&](const auto& x) -> Program {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SeqStmt>) {
          return make_seq(expand_all_whiles(x.first), expand_all_whiles(x.second));
        } else if constexpr (std::is_same_v<T, CaseStmt>) {
          std::vector<Program> branches;
          for (const auto& b : x.branches) branches.push_back(expand_all_whiles(b));
          return make_case(x.measured, x.meas, std::move(branches));
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          const Program body = expand_all_whiles(x.body);
          return expand_while(make_while(x.bound, x.measured, x.meas, body));
        } else if constexpr (std::is_same_v<T, SumStmt>) {
          return make_sum(expand_all_whiles(x.left), expand_all_whiles(x.right));
        } else {
          return p;
        }
      },
      p->v);
}

Program expand_gadget(Axis axis, int param, const QVar& ancilla, const Register& target) {
  if (ancilla.dim != 2) throw SemanticError("gadget ancilla must be a qubit");
  if (contains(target, ancilla.name)) {
    throw SemanticError("gadget ancilla '" + ancilla.name + "' collides with the target register");
  }
  Register wires{ancilla};
  wires.insert(wires.end(), target.begin(), target.end());
  return make_seq({make_apply(Gate::fixed("H"), {ancilla}), make_apply(Gate::ctrl_rot(axis, param), wires),
                   make_apply(Gate::fixed("H"), {ancilla})});
}

int max_param_index(const Program& p) { return p->max_param; }

NodeCounts count_nodes(const Program& p) {
  NodeCounts c;
  auto rec = [&](auto&& self, const Program& q) -> void {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, AbortStmt>) {
            ++c.aborts;
          } else if constexpr (std::is_same_v<T, SkipStmt>) {
            ++c.skips;
          } else if constexpr (std::is_same_v<T, InitStmt>) {
            ++c.inits;
          } else if constexpr (std::is_same_v<T, ApplyStmt>) {
            ++c.applies;
          } else if constexpr (std::is_same_v<T, SeqStmt>) {
            ++c.seqs;
            self(self, x.first);
            self(self, x.second);
          } else if constexpr (std::is_same_v<T, CaseStmt>) {
            ++c.cases;
            for (const auto& b : x.branches) self(self, b);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            ++c.whiles;
            self(self, x.body);
          } else {
            ++c.sums;
            self(self, x.left);
            self(self, x.right);
          }
        },
        q->v);
  };
  rec(rec, p);
  return c;
}

}  // namespace qdiff
