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

#include "qdiff/compile.hpp"

#include <algorithm>
#include <cstdio>

#include "qdiff/autodiff.hpp"
#include "qdiff/errors.hpp"
#include "qdiff/frontend.hpp"

namespace qdiff {

namespace {

CompiledMultiset single(Program p, const Program& source, bool pruned) {
  CompiledMultiset c;
  c.members.push_back(std::move(p));
  c.source = source;
  c.aborting_pruned = pruned;
  return c;
}

CompiledMultiset abort_of(const Program& source, bool pruned) {
  return single(make_abort(qvar_set(source)), source, pruned);
}

}  // namespace

CompiledMultiset fill_and_break(const Register& measured, const Measurement& meas,
                                const std::vector<CompiledMultiset>& branches, const Register& abort_reg) {
  if (branches.size() != meas.outcomes()) {
    throw SemanticError("fill_and_break: " + std::to_string(branches.size()) + " branch multisets for " +
                        std::to_string(meas.outcomes()) + " outcomes");
  }
  CompiledMultiset out;
  std::vector<std::vector<Program>> live(branches.size());
  std::size_t width = 0;
  for (std::size_t m = 0; m < branches.size(); ++m) {
    out.aborting_pruned = out.aborting_pruned || branches[m].aborting_pruned;
    for (const auto& q : branches[m].members) {
      if (essentially_aborts(q)) {
        if (!q->is<AbortStmt>() || branches[m].members.size() > 1) out.aborting_pruned = true;
        continue;
      }
      live[m].push_back(q);
    }
    width = std::max(width, live[m].size());
  }
  if (width == 0) {
    out.members.push_back(make_abort(abort_reg));
    return out;
  }
  for (std::size_t col = 0; col < width; ++col) {
    std::vector<Program> arms;
    arms.reserve(branches.size());
    for (std::size_t m = 0; m < branches.size(); ++m) {
      arms.push_back(col < live[m].size() ? live[m][col] : make_abort(abort_reg));
    }
    out.members.push_back(make_case(measured, meas, std::move(arms)));
  }
  return out;
}

CompiledMultiset compile(const Program& p) {
  // Without sums, aborts or loops every rule is the identity.
  if (p->simple) return single(p, p, false);
  return std::visit(
      [&](const auto& x) -> CompiledMultiset {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SeqStmt>) {
          const CompiledMultiset a = compile(x.first);
          const CompiledMultiset b = compile(x.second);
          const bool pruned = a.aborting_pruned || b.aborting_pruned;
          if (a.is_abort() || b.is_abort()) return abort_of(p, pruned || !(a.is_abort() && b.is_abort()));
          CompiledMultiset c;
          c.source = p;
          c.aborting_pruned = pruned;
          c.members.reserve(a.size() * b.size());
          for (const auto& q1 : a.members) {
            for (const auto& q2 : b.members) c.members.push_back(make_seq(q1, q2));
          }
          return c;
        } else if constexpr (std::is_same_v<T, CaseStmt>) {
          std::vector<CompiledMultiset> branches;
          branches.reserve(x.branches.size());
          for (const auto& b : x.branches) branches.push_back(compile(b));
          CompiledMultiset c = fill_and_break(x.measured, x.meas, branches, qvar_set(p));
          c.source = p;
          return c;
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          CompiledMultiset c = compile(expand_while(p));
          c.source = p;
          return c;
        } else if constexpr (std::is_same_v<T, SumStmt>) {
          CompiledMultiset a = compile(x.left);
          CompiledMultiset b = compile(x.right);
          const bool pruned = a.aborting_pruned || b.aborting_pruned;
          if (!a.is_abort() && !b.is_abort()) {
            a.members.insert(a.members.end(), b.members.begin(), b.members.end());
            a.source = p;
            a.aborting_pruned = pruned;
            return a;
          }
          if (!a.is_abort()) {
            a.source = p;
            a.aborting_pruned = true;
            return a;
          }
          if (!b.is_abort()) {
            b.source = p;
            b.aborting_pruned = true;
            return b;
          }
          return abort_of(p, true);
        } else {
          return single(p, p, false);
        }
      },
      p->v);
}

std::size_t nna(const CompiledMultiset& c) {
  return static_cast<std::size_t>(
      std::count_if(c.members.begin(), c.members.end(), [](const Program& q) { return !essentially_aborts(q); }));
}

std::size_t nna(const Program& p) { return nna(compile(p)); }

std::uint64_t occurrence_count(const Program& p, int j) {
  return std::visit(
      [&](const auto& x) -> std::uint64_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ApplyStmt>) {
          return x.gate.uses_param(j) ? 1 : 0;
        } else if constexpr (std::is_same_v<T, SeqStmt>) {
          return occurrence_count(x.first, j) + occurrence_count(x.second, j);
        } else if constexpr (std::is_same_v<T, CaseStmt>) {
          std::uint64_t m = 0;
          for (const auto& b : x.branches) m = std::max(m, occurrence_count(b, j));
          return m;
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return static_cast<std::uint64_t>(x.bound) * occurrence_count(x.body, j);
        } else if constexpr (std::is_same_v<T, SumStmt>) {
          throw SemanticError("occurrence count is defined for programs without '[]'");
        } else {
          return 0;
        }
      },
      p->v);
}

std::uint64_t gate_count(const Program& p) {
  return std::visit(
      [&](const auto& x) -> std::uint64_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ApplyStmt>) {
          return 1;
        } else if constexpr (std::is_same_v<T, SeqStmt>) {
          return gate_count(x.first) + gate_count(x.second);
        } else if constexpr (std::is_same_v<T, CaseStmt>) {
          std::uint64_t s = 0;
          for (const auto& b : x.branches) s += gate_count(b);
          return s;
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return static_cast<std::uint64_t>(x.bound) * gate_count(x.body);
        } else if constexpr (std::is_same_v<T, SumStmt>) {
          return gate_count(x.left) + gate_count(x.right);
        } else {
          return 0;
        }
      },
      p->v);
}

std::uint64_t layer_count(const Program& p) {
  if (p->is<SeqStmt>()) {
    std::uint64_t layers = 0;
    bool in_run = false;
    Program cur = p;
    while (true) {
      const auto* s = cur->as<SeqStmt>();
      const Program stmt = s ? s->first : cur;
      if (stmt->is<ApplyStmt>()) {
        if (!in_run) ++layers;
        in_run = true;
      } else {
        const std::uint64_t inner = layer_count(stmt);
        layers += inner;
        if (inner > 0) in_run = false;
      }
      if (!s) break;
      cur = s->second;
    }
    return layers;
  }
  return std::visit(
      [&](const auto& x) -> std::uint64_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ApplyStmt>) {
          return 1;
        } else if constexpr (std::is_same_v<T, CaseStmt>) {
          std::uint64_t m = 0;
          for (const auto& b : x.branches) m = std::max(m, layer_count(b));
          return m;
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return static_cast<std::uint64_t>(x.bound) * layer_count(x.body);
        } else if constexpr (std::is_same_v<T, SumStmt>) {
          return std::max(layer_count(x.left), layer_count(x.right));
        } else {
          return 0;
        }
      },
      p->v);
}

ResourceReport resource_report(const Program& p, int k) {
  ResourceReport r;
  r.num_params = std::max(k, max_param_index(p));
  for (int j = 1; j <= r.num_params; ++j) {
    r.oc.push_back(occurrence_count(p, j));
    r.nna.push_back(nna(differentiate(p, j, r.num_params).transformed));
  }
  r.gate_count = gate_count(p);
  r.layer_count = layer_count(p);
  r.qubit_count = qvar_set(p).size();
  const std::string text = print_program(p);
  r.line_count = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  return r;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qdiff
