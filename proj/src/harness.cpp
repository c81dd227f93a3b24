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

#include "qdiff/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "qdiff/errors.hpp"
#include "qdiff/gradient.hpp"
#include "qdiff/semantics.hpp"

namespace qdiff {

namespace {

QVar qubit(int i) { return {"q" + std::to_string(i), 2}; }

Program rot(Axis axis, int param, const QVar& q) { return make_apply(Gate::rot(axis, param), {q}); }

std::size_t bits_index(const Bits4& z) {
  return static_cast<std::size_t>(z[0] * 8 + z[1] * 4 + z[2] * 2 + z[3]);
}

ComplexMatrix readout_q4() {
  return embed(Observable::projector(2, 1).matrix(), {qubit(4)}, classifier_register());
}

Layout classifier_layout(const Program& p) { return Layout(register_union(classifier_register(), qvar_set(p))); }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Register classifier_register() { return {qubit(1), qubit(2), qubit(3), qubit(4)}; }

Program build_block_Q(const std::vector<int>& params) {
  if (params.size() != 12) {
    throw SemanticError("block Q takes 12 parameter indices, got " + std::to_string(params.size()));
  }
  if (std::set<int>(params.begin(), params.end()).size() != params.size()) {
    throw SemanticError("block Q parameter indices must be distinct");
  }
  const Axis axes[3] = {Axis::X, Axis::Y, Axis::Z};
  std::vector<Program> stmts;
  for (int s = 0; s < 3; ++s) {
    for (int i = 0; i < 4; ++i) stmts.push_back(rot(axes[s], params[static_cast<std::size_t>(4 * s + i)], qubit(i + 1)));
  }
  return make_seq(stmts);
}

namespace {

std::vector<int> range(int first) {
  std::vector<int> r(12);
  for (int i = 0; i < 12; ++i) r[static_cast<std::size_t>(i)] = first + i;
  return r;
}

}  // namespace

Program build_P1() { return make_seq(build_block_Q(range(1)), build_block_Q(range(13))); }

Program build_P2() {
  const Register q1{qubit(1)};
  return make_seq(build_block_Q(range(1)), make_case(q1, Measurement::computational(2),
                                                     {build_block_Q(range(13)), build_block_Q(range(25))}));
}

int label_f(const Bits4& z) { return (z[0] ^ z[3]) ? 0 : 1; }

std::vector<std::pair<Bits4, int>> dataset4() {
  std::vector<std::pair<Bits4, int>> rows;
  for (int n = 0; n < 16; ++n) {
    Bits4 z{(n >> 3) & 1, (n >> 2) & 1, (n >> 1) & 1, n & 1};
    rows.emplace_back(z, label_f(z));
  }
  return rows;
}

Program encode_input(const Bits4& z) {
  std::vector<Program> stmts;
  for (int i = 0; i < 4; ++i) {
    if (z[static_cast<std::size_t>(i)] != 0 && z[static_cast<std::size_t>(i)] != 1) {
      throw SemanticError("input bits must be 0 or 1");
    }
    stmts.push_back(make_init(qubit(i + 1)));
  }
  for (int i = 0; i < 4; ++i) {
    if (z[static_cast<std::size_t>(i)] == 1) stmts.push_back(make_apply(Gate::fixed("X"), {qubit(i + 1)}));
  }
  return make_seq(stmts);
}

double classify(const Program& p, const ParamVector& theta, const Bits4& z) {
  const Program full = make_seq(encode_input(z), p);
  const Layout layout = classifier_layout(p);
  const ComplexMatrix o = embed(Observable::projector(2, 1).matrix(), {qubit(4)}, layout.vars());
  const DensityOperator rho = DensityOperator::basis(layout.dim(), 0);
  return observable_semantics(full, layout, Observable(o), rho, theta);
}

double loss(const Program& p, const ParamVector& theta) {
  double total = 0.0;
  for (const auto& [z, f] : dataset4()) {
    const double d = classify(p, theta, z) - f;
    total += 0.5 * d * d;
  }
  return total;
}

ParamVector initial_parameters(int k, const TrainConfig& cfg) {
  SplitMix64 rng(cfg.seed);
  std::vector<double> v(static_cast<std::size_t>(k));
  for (auto& t : v) t = cfg.init_low + (cfg.init_high - cfg.init_low) * rng.uniform();
  return ParamVector(std::move(v));
}

namespace {

// Loss and its gradient from one engine. By linearity in the input state the
// gradient is a single derivative evaluation per parameter on the weighted
// operator sum_z (l(z) - f(z)) |z><z|.
struct LossEval {
  double loss = 0.0;
  ComplexMatrix weighted;
};

LossEval evaluate(const GradientEngine& engine, const ParamVector& theta, const ComplexMatrix& o) {
  const std::size_t dim = engine.layout().dim();
  if (dim != 16) throw DimensionError("classifier programs must act on q1..q4 only");
  LossEval e;
  e.weighted = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& [z, f] : dataset4()) {
    const std::size_t idx = bits_index(z);
    const double l = engine.value(theta, o, DensityOperator::basis(dim, idx).matrix());
    const double d = l - f;
    e.loss += 0.5 * d * d;
    e.weighted(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = d;
  }
  return e;
}

std::vector<double> gradient_from(const GradientEngine& engine, const ParamVector& theta, const LossEval& e,
                                  const ComplexMatrix& o) {
  const ComplexMatrix obs_a = tensor(Observable::pauli_z().matrix(), o);
  const ComplexMatrix rho_a = tensor(DensityOperator::basis(2, 0).matrix(), e.weighted);
  std::vector<double> g(static_cast<std::size_t>(engine.num_params()));
  for (int j = 1; j <= engine.num_params(); ++j) {
    g[static_cast<std::size_t>(j) - 1] = engine.grad_extended(j, theta.values(), obs_a, rho_a);
  }
  return g;
}

}  // namespace

std::vector<double> loss_gradient(const Program& p, const ParamVector& theta) {
  const GradientEngine engine(p, classifier_layout(p), static_cast<int>(theta.size()));
  const ComplexMatrix o = readout_q4();
  return gradient_from(engine, theta, evaluate(engine, theta, o), o);
}

TrainResult train(const Program& p, int num_params, const TrainConfig& cfg,
                  const std::function<void(int, double)>& on_epoch) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw SemanticError("learning rate must be a finite non-negative number");
  }
  if (cfg.epochs < 1) throw SemanticError("epochs must be >= 1");
  const int k = std::max(num_params, max_param_index(p));
  const GradientEngine engine(p, classifier_layout(p), k);
  const ComplexMatrix o = readout_q4();

  TrainResult r;
  r.initial = initial_parameters(k, cfg);
  std::vector<double> theta = r.initial.values();
  for (int epoch = 0;; ++epoch) {
    const ParamVector th(theta);
    const LossEval e = evaluate(engine, th, o);
    if (!std::isfinite(e.loss)) {
      throw NumericError("loss diverged at epoch " + std::to_string(epoch));
    }
    r.losses.push_back(e.loss);
    if (on_epoch) on_epoch(epoch, e.loss);
    if (epoch == cfg.epochs) break;
    const std::vector<double> g = gradient_from(engine, th, e, o);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= cfg.learning_rate * g[i];
    for (double t : theta) {
      if (!std::isfinite(t)) throw NumericError("parameters diverged at epoch " + std::to_string(epoch + 1));
    }
  }
  r.final_theta = ParamVector(theta);
  return r;
}

// ---- benchmarks ------------------------------------------------------------

std::string to_string(BenchFamily f) {
  switch (f) {
    case BenchFamily::QNN: return "QNN";
    case BenchFamily::VQE: return "VQE";
    case BenchFamily::QAOA: return "QAOA";
  }
  return "?";
}

std::string to_string(BenchScale s) {
  switch (s) {
    case BenchScale::S: return "S";
    case BenchScale::M: return "M";
    case BenchScale::L: return "L";
  }
  return "?";
}

std::string to_string(BenchControl c) {
  switch (c) {
    case BenchControl::Basic: return "basic";
    case BenchControl::Shared: return "shared";
    case BenchControl::If: return "if";
    case BenchControl::While: return "while";
  }
  return "?";
}

BenchFamily parse_family(const std::string& s) {
  const std::string l = lower(s);
  if (l == "qnn") return BenchFamily::QNN;
  if (l == "vqe") return BenchFamily::VQE;
  if (l == "qaoa") return BenchFamily::QAOA;
  throw SemanticError("unknown benchmark family '" + s + "' (expected qnn, vqe or qaoa)");
}

BenchScale parse_scale(const std::string& s) {
  const std::string l = lower(s);
  if (l == "s" || l == "small") return BenchScale::S;
  if (l == "m" || l == "medium") return BenchScale::M;
  if (l == "l" || l == "large") return BenchScale::L;
  throw SemanticError("unknown benchmark scale '" + s + "' (expected s, m or l)");
}

BenchControl parse_control(const std::string& s) {
  const std::string l = lower(s);
  if (l == "basic") return BenchControl::Basic;
  if (l == "shared") return BenchControl::Shared;
  if (l == "if" || l == "i") return BenchControl::If;
  if (l == "while" || l == "w") return BenchControl::While;
  throw SemanticError("unknown benchmark control '" + s + "' (expected basic, shared, if or while)");
}

int bench_qubits(const BenchSpec& spec) {
  const int scale = static_cast<int>(spec.scale);
  switch (spec.family) {
    case BenchFamily::QNN: return 4 + scale;
    case BenchFamily::VQE: return 2 + scale;
    case BenchFamily::QAOA: return 3 + scale;
  }
  return 0;
}

int bench_control_layers(const BenchSpec& spec) { return 1 + static_cast<int>(spec.scale); }

namespace {

class BlockBuilder {
 public:
  BlockBuilder(BenchFamily family, int n, bool share_first) : family_(family), n_(n), share_(share_first) {}

  int num_params() const { return next_ - 1; }

  // Block b acts on the qubits in the order q_{b+1}, ..., q_n, q_1, ...
  Program block(int b) {
    std::vector<QVar> order;
    for (int i = 0; i < n_; ++i) order.push_back(qubit((i + b) % n_ + 1));
    std::vector<Program> s;
    bool first_stage = true;
    auto stage = [&](Axis axis) {
      for (const auto& q : order) s.push_back(rot(axis, first_stage && share_ ? 1 : fresh(), q));
      first_stage = false;
    };
    auto entangle = [&] {
      for (const auto& q : order) s.push_back(make_apply(Gate::fixed("H"), {q}));
      for (int i = 0; i + 1 < n_; ++i) {
        s.push_back(make_apply(Gate::fixed("CNOT"), {order[static_cast<std::size_t>(i)],
                                                     order[static_cast<std::size_t>(i) + 1]}));
      }
    };
    switch (family_) {
      case BenchFamily::QNN:
        stage(Axis::Z);
        stage(Axis::X);
        stage(Axis::Z);
        for (int i = 0; i < n_; ++i) {
          for (int j = i + 1; j < n_; ++j) {
            s.push_back(make_apply(Gate::rot(Axis::XX, fresh()),
                                   {order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]}));
          }
        }
        break;
      case BenchFamily::VQE:
        stage(Axis::X);
        stage(Axis::Z);
        entangle();
        stage(Axis::Z);
        stage(Axis::X);
        stage(Axis::Z);
        break;
      case BenchFamily::QAOA:
        entangle();
        stage(Axis::X);
        break;
    }
    return make_seq(s);
  }

 private:
  int fresh() {
    // Index 1 is reserved for the shared parameter.
    if (share_ && next_ == 1) next_ = 2;
    return next_++;
  }

  BenchFamily family_;
  int n_;
  bool share_;
  int next_ = 1;
};

}  // namespace

BenchProgram generate_bench(const BenchSpec& spec) {
  const int n = bench_qubits(spec);
  if (n < 2) throw SemanticError("unsupported benchmark combination");
  BlockBuilder builder(spec.family, n, spec.control != BenchControl::Basic);
  const Register q1{qubit(1)};
  const Measurement m = Measurement::computational(2);
  std::vector<Program> parts{builder.block(0)};
  int b = 1;
  switch (spec.control) {
    case BenchControl::Basic:
    case BenchControl::Shared:
      break;
    case BenchControl::If:
      for (int l = 0; l < bench_control_layers(spec); ++l) {
        Program left = builder.block(b++);
        Program right = builder.block(b++);
        parts.push_back(make_case(q1, m, {std::move(left), std::move(right)}));
      }
      break;
    case BenchControl::While:
      for (int l = 0; l < bench_control_layers(spec); ++l) parts.push_back(make_while(2, q1, m, builder.block(b++)));
      break;
  }
  BenchProgram out;
  out.program = make_seq(parts);
  out.num_params = builder.num_params();
  if (spec.control != BenchControl::Basic) out.num_params = std::max(out.num_params, 1);
  out.name = to_string(spec.family) + "_" + to_string(spec.scale) + "_" + to_string(spec.control);
  return out;
}

ResourceReport bench_report(const Program& p, int num_params) { return resource_report(p, num_params); }

std::vector<BenchSpec> all_bench_specs() {
  std::vector<BenchSpec> specs;
  for (auto f : {BenchFamily::QNN, BenchFamily::VQE, BenchFamily::QAOA}) {
    for (auto s : {BenchScale::S, BenchScale::M, BenchScale::L}) {
      for (auto c : {BenchControl::Basic, BenchControl::Shared, BenchControl::If, BenchControl::While}) {
        specs.push_back({f, s, c});
      }
    }
  }
  return specs;
}

}  // namespace qdiff
