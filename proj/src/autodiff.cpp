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

#include "qdiff/autodiff.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "qdiff/errors.hpp"
#include "qdiff/semantics.hpp"

namespace qdiff {

namespace {

Register with_ancilla(const QVar& a, const Register& reg) {
  Register out{a};
  out.insert(out.end(), reg.begin(), reg.end());
  return out;
}

Program diff(const Program& p, int j, const QVar& a) {
  return std::visit(
      [&](const auto& x) -> Program {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AbortStmt> || std::is_same_v<T, SkipStmt>) {
          return make_abort(with_ancilla(a, x.reg));
        } else if constexpr (std::is_same_v<T, InitStmt>) {
          return make_abort(with_ancilla(a, {x.var}));
        } else if constexpr (std::is_same_v<T, ApplyStmt>) {
          if (!x.gate.uses_param(j)) return make_abort(with_ancilla(a, x.reg));
          if (x.gate.kind != GateKind::Rot) {
            throw SemanticError("gate " + x.gate.display_name() + "(th" + std::to_string(j) +
                                ") already carries a derivative ancilla; higher-order derivatives are not supported");
          }
          return make_apply(Gate::gadget(x.gate.axis, j), with_ancilla(a, x.reg));
        } else if constexpr (std::is_same_v<T, SeqStmt>) {
          return make_sum(make_seq(diff(x.first, j, a), x.second), make_seq(x.first, diff(x.second, j, a)));
        } else if constexpr (std::is_same_v<T, CaseStmt>) {
          std::vector<Program> branches;
          branches.reserve(x.branches.size());
          for (const auto& b : x.branches) branches.push_back(diff(b, j, a));
          return make_case(x.measured, x.meas, std::move(branches));
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return diff(expand_while(p), j, a);
        } else {
          return make_sum(diff(x.left, j, a), diff(x.right, j, a));
        }
      },
      p->v);
}

}  // namespace

QVar fresh_ancilla(const Program& p, int j) {
  const Register vars = qvar_set(p);
  for (int n = 1;; ++n) {
    std::string name = "A" + std::to_string(j) + "_" + std::to_string(n);
    if (!contains(vars, name)) return {name, 2};
  }
}

Program differentiate_with(const Program& p, int j, const QVar& ancilla) {
  if (ancilla.dim != 2) throw SemanticError("derivative ancilla must be a qubit");
  if (contains(qvar_set(p), ancilla.name)) {
    throw SemanticError("ancilla '" + ancilla.name + "' already occurs in the program");
  }
  return diff(p, j, ancilla);
}

DiffResult differentiate(const Program& p, int j, int num_params) {
  const int k = num_params > 0 ? num_params : max_param_index(p);
  if (num_params > 0 && max_param_index(p) > num_params) {
    throw SemanticError("program references th" + std::to_string(max_param_index(p)) + " but only " +
                        std::to_string(num_params) + " parameters are declared");
  }
  if (j < 1 || j > k) {
    throw SemanticError("parameter index " + std::to_string(j) + " out of range [1, " + std::to_string(k) + "]");
  }
  DiffResult r;
  r.ancilla = fresh_ancilla(p, j);
  r.param_index = j;
  r.transformed = differentiate_with(p, j, r.ancilla);
  return r;
}

JudgementReport check_judgement(const Program& original, const Program& derivative, const QVar& ancilla, int j,
                                int num_params, const JudgementConfig& cfg) {
  const Register v = qvar_set(original);
  const Register full = with_ancilla(ancilla, v);
  for (const auto& q : qvar_set(derivative)) {
    if (!contains(full, q.name)) {
      throw SemanticError("derivative uses '" + q.name + "', which is neither in the original register nor the ancilla");
    }
  }
  const int k = std::max({num_params, max_param_index(original), j});
  const Layout lv(v);
  const Layout la = ancilla_layout(ancilla, lv);
  const MemberExecutable f(original, lv);
  const MemberExecutable df(derivative, la);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  const ComplexMatrix z = Observable::pauli_z().matrix();
  const ComplexMatrix zero = DensityOperator::basis(2, 0).matrix();

  JudgementReport rep;
  for (int pair = 0; pair < cfg.num_pairs; ++pair) {
    const Observable o = random_observable(lv.dim(), rng);
    const DensityOperator rho = random_density(lv.dim(), rng);
    const ComplexMatrix obs_a = tensor(z, o.matrix());
    const ComplexMatrix rho_a = tensor(zero, rho.matrix());
    for (int pt = 0; pt < cfg.num_points; ++pt) {
      std::vector<double> theta(static_cast<std::size_t>(k));
      for (auto& t : theta) t = angle(rng);
      const double lhs = df.expectation(theta, obs_a, rho_a);
      std::vector<double> plus = theta, minus = theta;
      plus[static_cast<std::size_t>(j) - 1] += cfg.h;
      minus[static_cast<std::size_t>(j) - 1] -= cfg.h;
      const double fd =
          (f.expectation(plus, o.matrix(), rho.matrix()) - f.expectation(minus, o.matrix(), rho.matrix())) / (2 * cfg.h);
      rep.max_error = std::max(rep.max_error, std::abs(lhs - fd));
      ++rep.checks;
    }
  }
  rep.holds = rep.max_error <= cfg.tolerance;
  return rep;
}

bool judgement_holds(const Program& original, const Program& derivative, const QVar& ancilla, int j,
                     int num_params, std::uint64_t seed) {
  JudgementConfig cfg;
  cfg.seed = seed;
  return check_judgement(original, derivative, ancilla, j, num_params, cfg).holds;
}

}  // namespace qdiff
