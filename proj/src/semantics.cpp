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

#include "qdiff/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdiff/compile.hpp"
#include "qdiff/errors.hpp"

namespace qdiff {

namespace {

std::vector<int> dims_of(const Register& reg) {
  std::vector<int> d;
  d.reserve(reg.size());
  for (const auto& v : reg) d.push_back(v.dim);
  return d;
}

TensorShape checked_shape(const Register& reg, std::size_t max_dim) {
  validate_register(reg);
  std::size_t total = 1;
  for (const auto& v : reg) {
    total *= static_cast<std::size_t>(v.dim);
    if (total > max_dim) {
      throw DimensionError("register " + register_to_string(reg) + " exceeds the simulation limit of dimension " +
                           std::to_string(max_dim));
    }
  }
  return TensorShape(dims_of(reg));
}

// |0><n| for n = 0..d-1: the reset channel on a d-level variable.
std::vector<ComplexMatrix> reset_kraus(int d) {
  std::vector<ComplexMatrix> ks;
  for (int n = 0; n < d; ++n) {
    ComplexMatrix k = ComplexMatrix::Zero(d, d);
    k(0, n) = 1.0;
    ks.push_back(std::move(k));
  }
  return ks;
}

bool is_zero(const ComplexMatrix& m) { return m.squaredNorm() == 0.0; }

}  // namespace

Layout::Layout(Register reg, std::size_t max_dim) : vars_(std::move(reg)), shape_(checked_shape(vars_, max_dim)) {}

std::vector<int> Layout::wires(const Register& reg) const {
  std::vector<int> w;
  w.reserve(reg.size());
  for (const auto& v : reg) {
    const int i = index_of(vars_, v.name);
    if (i < 0) throw SemanticError("variable '" + v.name + "' is not in the layout " + register_to_string(vars_));
    if (vars_[static_cast<std::size_t>(i)].dim != v.dim) {
      throw DimensionError("variable '" + v.name + "' has dimension " + std::to_string(v.dim) + " in the program but " +
                           std::to_string(vars_[static_cast<std::size_t>(i)].dim) + " in the layout");
    }
    w.push_back(i);
  }
  return w;
}

Layout ancilla_layout(const QVar& ancilla, const Layout& v) {
  if (contains(v.vars(), ancilla.name)) throw SemanticError("ancilla '" + ancilla.name + "' is already in the layout");
  if (ancilla.dim != 2) throw SemanticError("ancilla must be a qubit");
  Register reg{ancilla};
  reg.insert(reg.end(), v.vars().begin(), v.vars().end());
  return Layout(std::move(reg), std::numeric_limits<std::size_t>::max());
}

// ---- Executable -------------------------------------------------------------

struct Executable::Node {
  enum class Kind { Abort, Skip, Kraus, Apply, Seq, Case, While } kind;
  std::unique_ptr<LocalAction> act;
  std::vector<ComplexMatrix> ops;  // Kraus operators (Kraus/Case/While)
  Gate gate;
  int bound = 0;
  std::vector<std::unique_ptr<Node>> children;
};

namespace {

using ExecNode = Executable::Node;

std::unique_ptr<ExecNode> lower(const Program& p, const Layout& layout) {
  auto n = std::make_unique<ExecNode>();
  auto local = [&](const Register& reg) {
    const auto w = layout.wires(reg);
    return std::make_unique<LocalAction>(layout.shape(), w);
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AbortStmt>) {
          (void)layout.wires(x.reg);
          n->kind = ExecNode::Kind::Abort;
        } else if constexpr (std::is_same_v<T, SkipStmt>) {
          (void)layout.wires(x.reg);
          n->kind = ExecNode::Kind::Skip;
        } else if constexpr (std::is_same_v<T, InitStmt>) {
          n->kind = ExecNode::Kind::Kraus;
          n->act = local({x.var});
          n->ops = reset_kraus(x.var.dim);
        } else if constexpr (std::is_same_v<T, ApplyStmt>) {
          n->kind = ExecNode::Kind::Apply;
          n->act = local(x.reg);
          n->gate = x.gate;
        } else if constexpr (std::is_same_v<T, SeqStmt>) {
          n->kind = ExecNode::Kind::Seq;
          Program cur = p;
          while (const auto* s = cur->as<SeqStmt>()) {
            n->children.push_back(lower(s->first, layout));
            cur = s->second;
          }
          n->children.push_back(lower(cur, layout));
        } else if constexpr (std::is_same_v<T, CaseStmt>) {
          n->kind = ExecNode::Kind::Case;
          n->act = local(x.measured);
          n->ops = x.meas.ops;
          for (const auto& b : x.branches) n->children.push_back(lower(b, layout));
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          n->kind = ExecNode::Kind::While;
          n->act = local(x.measured);
          n->ops = x.meas.ops;
          n->bound = x.bound;
          n->children.push_back(lower(x.body, layout));
        } else {
          throw SemanticError("additive program given where a plain program is required; compile it first");
        }
      },
      p->v);
  return n;
}

ComplexMatrix run_forward(const ExecNode& n, const std::vector<double>& theta, const ComplexMatrix& rho) {
  switch (n.kind) {
    case ExecNode::Kind::Abort: return ComplexMatrix::Zero(rho.rows(), rho.cols());
    case ExecNode::Kind::Skip: return rho;
    case ExecNode::Kind::Kraus: {
      ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
      for (const auto& k : n.ops) acc += conjugate(rho, k, *n.act);
      return acc;
    }
    case ExecNode::Kind::Apply: return conjugate(rho, gate_matrix(n.gate, theta), *n.act);
    case ExecNode::Kind::Seq: {
      ComplexMatrix cur = rho;
      for (const auto& c : n.children) {
        cur = run_forward(*c, theta, cur);
        if (is_zero(cur)) break;
      }
      return cur;
    }
    case ExecNode::Kind::Case: {
      ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
      for (std::size_t m = 0; m < n.ops.size(); ++m) {
        ComplexMatrix branch = conjugate(rho, n.ops[m], *n.act);
        if (is_zero(branch)) continue;
        acc += run_forward(*n.children[m], theta, branch);
      }
      return acc;
    }
    case ExecNode::Kind::While: {
      ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
      ComplexMatrix cur = rho;
      for (int it = 0; it < n.bound; ++it) {
        acc += conjugate(cur, n.ops[0], *n.act);
        if (it + 1 == n.bound) break;
        cur = conjugate(cur, n.ops[1], *n.act);
        if (is_zero(cur)) break;
        cur = run_forward(*n.children[0], theta, cur);
      }
      return acc;
    }
  }
  throw SemanticError("unknown node");
}

ComplexMatrix run_dual(const ExecNode& n, const std::vector<double>& theta, const ComplexMatrix& o) {
  switch (n.kind) {
    case ExecNode::Kind::Abort: return ComplexMatrix::Zero(o.rows(), o.cols());
    case ExecNode::Kind::Skip: return o;
    case ExecNode::Kind::Kraus: {
      ComplexMatrix acc = ComplexMatrix::Zero(o.rows(), o.cols());
      for (const auto& k : n.ops) acc += conjugate(o, k.adjoint(), *n.act);
      return acc;
    }
    case ExecNode::Kind::Apply: return conjugate(o, gate_matrix(n.gate, theta).adjoint(), *n.act);
    case ExecNode::Kind::Seq: {
      ComplexMatrix cur = o;
      for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) cur = run_dual(**it, theta, cur);
      return cur;
    }
    case ExecNode::Kind::Case: {
      ComplexMatrix acc = ComplexMatrix::Zero(o.rows(), o.cols());
      for (std::size_t m = 0; m < n.ops.size(); ++m) {
        acc += conjugate(run_dual(*n.children[m], theta, o), n.ops[m].adjoint(), *n.act);
      }
      return acc;
    }
    case ExecNode::Kind::While: {
      // W_1 = E0*(O), W_t = E0*(O) + E1*(B*(W_{t-1})).
      const ComplexMatrix e0 = conjugate(o, n.ops[0].adjoint(), *n.act);
      ComplexMatrix w = e0;
      for (int t = 2; t <= n.bound; ++t) {
        w = e0 + conjugate(run_dual(*n.children[0], theta, w), n.ops[1].adjoint(), *n.act);
      }
      return w;
    }
  }
  throw SemanticError("unknown node");
}

// Picks branch n with probability ||K_n psi||^2 and renormalizes. False
// only if every branch has zero weight.
bool sample_branch(ComplexVector& psi, const std::vector<ComplexMatrix>& ops, const LocalAction& act,
                   const std::function<double()>& uniform01, std::size_t* chosen) {
  std::vector<ComplexVector> outs;
  std::vector<double> weights;
  outs.reserve(ops.size());
  double total = 0.0;
  for (const auto& k : ops) {
    ComplexVector v = psi;
    apply_to_vector(v, k, act);
    const double w = v.squaredNorm();
    weights.push_back(w);
    total += w;
    outs.push_back(std::move(v));
  }
  if (total <= 0.0) return false;
  const double u = uniform01() * total;
  double acc = 0.0;
  std::size_t pick = ops.size() - 1;
  for (std::size_t n = 0; n < ops.size(); ++n) {
    acc += weights[n];
    if (u < acc && weights[n] > 0.0) {
      pick = n;
      break;
    }
  }
  while (weights[pick] <= 0.0) --pick;
  psi = outs[pick] / std::sqrt(weights[pick]);
  if (chosen) *chosen = pick;
  return true;
}

bool run_trajectory(const ExecNode& n, const std::vector<double>& theta, ComplexVector& psi,
                    const std::function<double()>& uniform01) {
  switch (n.kind) {
    case ExecNode::Kind::Abort: return false;
    case ExecNode::Kind::Skip: return true;
    case ExecNode::Kind::Kraus: return sample_branch(psi, n.ops, *n.act, uniform01, nullptr);
    case ExecNode::Kind::Apply: apply_to_vector(psi, gate_matrix(n.gate, theta), *n.act); return true;
    case ExecNode::Kind::Seq:
      for (const auto& c : n.children) {
        if (!run_trajectory(*c, theta, psi, uniform01)) return false;
      }
      return true;
    case ExecNode::Kind::Case: {
      std::size_t m = 0;
      if (!sample_branch(psi, n.ops, *n.act, uniform01, &m)) return false;
      return run_trajectory(*n.children[m], theta, psi, uniform01);
    }
    case ExecNode::Kind::While:
      for (int it = 0; it < n.bound; ++it) {
        std::size_t m = 0;
        if (!sample_branch(psi, n.ops, *n.act, uniform01, &m)) return false;
        if (m == 0) return true;
        if (!run_trajectory(*n.children[0], theta, psi, uniform01)) return false;
      }
      return false;
  }
  return false;
}

void check_square(const ComplexMatrix& m, std::size_t dim, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim) {
    throw DimensionError(std::string(what) + " has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         " but the program layout has dimension " + std::to_string(dim));
  }
}

}  // namespace

Executable::Executable(const Program& p, const Layout& layout) : root_(lower(p, layout)), dim_(layout.dim()) {}
Executable::~Executable() = default;
Executable::Executable(Executable&&) noexcept = default;
Executable& Executable::operator=(Executable&&) noexcept = default;

ComplexMatrix Executable::apply(const std::vector<double>& theta, const ComplexMatrix& rho) const {
  check_square(rho, dim_, "input state");
  return run_forward(*root_, theta, rho);
}

ComplexMatrix Executable::dual(const std::vector<double>& theta, const ComplexMatrix& o) const {
  check_square(o, dim_, "observable");
  return run_dual(*root_, theta, o);
}

std::optional<ComplexVector> Executable::trajectory(const std::vector<double>& theta, ComplexVector psi,
                                                    const std::function<double()>& uniform01) const {
  if (static_cast<std::size_t>(psi.size()) != dim_) throw DimensionError("trajectory input has the wrong dimension");
  if (!run_trajectory(*root_, theta, psi, uniform01)) return std::nullopt;
  return psi;
}

MemberExecutable::MemberExecutable(const Program& p, const Layout& layout) : dim_(layout.dim()) {
  if (!is_additive(p)) {
    if (!essentially_aborts(p)) programs_.push_back(p);
  } else {
    for (const auto& m : compile(p).members) {
      if (!essentially_aborts(m)) programs_.push_back(m);
    }
  }
  members_.reserve(programs_.size());
  for (const auto& m : programs_) members_.emplace_back(m, layout);
}

ComplexMatrix MemberExecutable::apply(const std::vector<double>& theta, const ComplexMatrix& rho) const {
  check_square(rho, dim_, "input state");
  ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& m : members_) acc += m.apply(theta, rho);
  return acc;
}

double MemberExecutable::expectation(const std::vector<double>& theta, const ComplexMatrix& obs,
                                     const ComplexMatrix& rho) const {
  check_square(obs, dim_, "observable");
  double total = 0.0;
  for (const auto& m : members_) total += trace_product(obs, m.apply(theta, rho));
  return total;
}

// ---- denotational semantics -----------------------------------------------

DensityOperator denote(const Program& p, const ParamVector& theta, const DensityOperator& rho) {
  return denote(p, Layout(qvar_set(p)), theta, rho);
}

DensityOperator denote(const Program& p, const Layout& layout, const ParamVector& theta, const DensityOperator& rho) {
  return DensityOperator::unchecked(Executable(p, layout).apply(theta.values(), rho.matrix()));
}

// ---- trace enumeration ------------------------------------------------------

namespace {

struct Enumerator {
  const Layout& layout;
  const std::vector<double>& theta;

  void run(const Program& p, const ComplexMatrix& rho, const std::string& path, std::vector<TraceOutcome>& out) {
    auto atomic = [&](const ComplexMatrix& s) { out.push_back({s, path}); };
    auto join = [&](const std::string& step) { return path.empty() ? step : path + "." + step; };
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, SeqStmt>) {
            std::vector<TraceOutcome> mid;
            run(x.first, rho, path, mid);
            for (auto& m : mid) run(x.second, m.state, m.path, out);
          } else if constexpr (std::is_same_v<T, CaseStmt>) {
            const LocalAction act(layout.shape(), layout.wires(x.measured));
            for (std::size_t m = 0; m < x.branches.size(); ++m) {
              run(x.branches[m], conjugate(rho, x.meas.ops[m], act), join("c" + std::to_string(m)), out);
            }
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            run(expand_while(p), rho, path, out);
          } else if constexpr (std::is_same_v<T, SumStmt>) {
            run(x.left, rho, join("s0"), out);
            run(x.right, rho, join("s1"), out);
          } else {
            atomic(Executable(p, layout).apply(theta, rho));
          }
        },
        p->v);
  }
};

}  // namespace

ComplexMatrix FinalMultiset::total(std::size_t dim) const {
  ComplexMatrix acc = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& o : outcomes) acc += o.state;
  return acc;
}

FinalMultiset FinalMultiset::nonzero(double tol) const {
  FinalMultiset out;
  for (const auto& o : outcomes) {
    if (o.state.size() != 0 && o.state.cwiseAbs().maxCoeff() > tol) out.outcomes.push_back(o);
  }
  return out;
}

FinalMultiset trace_enumerate(const Program& p, const Layout& layout, const ParamVector& theta,
                              const DensityOperator& rho, bool drop_zero) {
  check_square(rho.matrix(), layout.dim(), "input state");
  FinalMultiset fm;
  Enumerator{layout, theta.values()}.run(p, rho.matrix(), "", fm.outcomes);
  return drop_zero ? fm.nonzero() : fm;
}

MatchResult match_multisets(const std::vector<ComplexMatrix>& a, const std::vector<ComplexMatrix>& b,
                            double threshold) {
  MatchResult r;
  if (a.size() != b.size()) return r;
  struct Pair {
    double d;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = a[i].rows() == b[j].rows() ? (a[i] - b[j]).norm() : std::numeric_limits<double>::infinity();
      pairs.push_back({d, i, j});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });
  std::vector<bool> used_a(a.size()), used_b(b.size());
  std::size_t matched = 0;
  for (const auto& pr : pairs) {
    if (used_a[pr.i] || used_b[pr.j]) continue;
    used_a[pr.i] = used_b[pr.j] = true;
    r.max_distance = std::max(r.max_distance, pr.d);
    ++matched;
  }
  r.matched = matched == a.size() && r.max_distance <= threshold;
  return r;
}

// ---- observable semantics ----------------------------------------------------

namespace {

double sum_over_members(const Program& p, const Layout& layout, const ComplexMatrix& obs, const ComplexMatrix& rho,
                        const ParamVector& theta) {
  return MemberExecutable(p, layout).expectation(theta.values(), obs, rho);
}

}  // namespace

double observable_semantics(const Program& p, const Layout& layout, const Observable& o, const DensityOperator& rho,
                            const ParamVector& theta) {
  check_square(o.matrix(), layout.dim(), "observable");
  check_square(rho.matrix(), layout.dim(), "input state");
  return sum_over_members(p, layout, o.matrix(), rho.matrix(), theta);
}

double observable_semantics(const Program& p, const Observable& o, const DensityOperator& rho,
                            const ParamVector& theta) {
  return observable_semantics(p, Layout(qvar_set(p)), o, rho, theta);
}

double observable_semantics_ancilla(const Program& p, const QVar& ancilla, const Layout& v, const Observable& o,
                                    const DensityOperator& rho, const ParamVector& theta) {
  return observable_semantics_ancilla(p, ancilla, v, o, rho, theta, Observable::pauli_z());
}

double observable_semantics_ancilla(const Program& p, const QVar& ancilla, const Layout& v, const Observable& o,
                                    const DensityOperator& rho, const ParamVector& theta, const Observable& oA) {
  check_square(o.matrix(), v.dim(), "observable");
  check_square(rho.matrix(), v.dim(), "input state");
  if (oA.dim() != 2) throw DimensionError("ancilla observable must be 2x2");
  const Layout full = ancilla_layout(ancilla, v);
  const ComplexMatrix rho0 = tensor(DensityOperator::basis(2, 0).matrix(), rho.matrix());
  return sum_over_members(p, full, tensor(oA.matrix(), o.matrix()), rho0, theta);
}

ComplexMatrix program_dual_observable(const Program& p, const Layout& layout, const ParamVector& theta,
                                      const ComplexMatrix& o) {
  if (is_additive(p)) throw SemanticError("program_dual_observable requires a program without '[]'");
  return Executable(p, layout).dual(theta.values(), o);
}

}  // namespace qdiff
