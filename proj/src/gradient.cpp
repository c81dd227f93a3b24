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

#include "qdiff/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <Eigen/Eigenvalues>

#include "qdiff/errors.hpp"

namespace qdiff {

// ---- SplitMix64 -------------------------------------------------------------

namespace {
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

SplitMix64::SplitMix64(std::uint64_t seed, std::uint64_t stream)
    : state_(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream * 0xd1b54a32d192ed03ULL + 1)) {}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

double SplitMix64::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

// ---- engine -----------------------------------------------------------------

namespace {

void check_plain(const Program& p) {
  if (is_additive(p)) throw SemanticError("gradients are defined for programs without '[]'");
}

int resolve_k(const Program& p, int num_params) {
  const int used = max_param_index(p);
  if (num_params > 0 && used > num_params) {
    throw SemanticError("program references th" + std::to_string(used) + " but only " + std::to_string(num_params) +
                        " parameters are declared");
  }
  return std::max(num_params, used);
}

void check_theta(const GradientEngine& e, const ParamVector& theta, int j) {
  if (static_cast<int>(theta.size()) != e.num_params()) {
    throw SemanticError("expected " + std::to_string(e.num_params()) + " parameter values, got " +
                        std::to_string(theta.size()));
  }
  if (j < 1 || j > e.num_params()) {
    throw SemanticError("parameter index " + std::to_string(j) + " out of range [1, " +
                        std::to_string(e.num_params()) + "]");
  }
}

void check_dims(const Layout& layout, const ComplexMatrix& o, const ComplexMatrix& rho) {
  const auto d = static_cast<Eigen::Index>(layout.dim());
  if (o.rows() != d || o.cols() != d) throw DimensionError("observable does not match the program register");
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("input state does not match the program register");
}

}  // namespace

GradientEngine::GradientEngine(Program p, Layout layout, int num_params)
    : program_((check_plain(p), std::move(p))),
      layout_(std::move(layout)),
      num_params_(resolve_k(program_, num_params)),
      forward_(program_, layout_) {
  plans_.reserve(static_cast<std::size_t>(num_params_));
  for (int j = 1; j <= num_params_; ++j) {
    DiffResult d = differentiate(program_, j, num_params_);
    // A layout variable may share the default ancilla name; pick past it.
    if (contains(layout_.vars(), d.ancilla.name)) {
      Program probe = make_seq(program_, make_skip(layout_.vars()));
      d.ancilla = fresh_ancilla(probe, j);
      d.transformed = differentiate_with(program_, j, d.ancilla);
    }
    MemberExecutable members(d.transformed, ancilla_layout(d.ancilla, layout_));
    const std::size_t m = members.size();
    const std::uint64_t oc = occurrence_count(program_, j);
    plans_.push_back(GradientPlan{std::move(d), std::move(members), m, oc});
  }
}

const GradientPlan& GradientEngine::plan(int j) const {
  if (j < 1 || j > num_params_) {
    throw SemanticError("parameter index " + std::to_string(j) + " out of range [1, " + std::to_string(num_params_) +
                        "]");
  }
  return plans_[static_cast<std::size_t>(j) - 1];
}

double GradientEngine::value(const ParamVector& theta, const ComplexMatrix& o, const ComplexMatrix& rho) const {
  check_dims(layout_, o, rho);
  return trace_product(o, forward_.apply(theta.values(), rho));
}

double GradientEngine::grad(int j, const ParamVector& theta, const ComplexMatrix& o, const ComplexMatrix& rho) const {
  check_theta(*this, theta, j);
  check_dims(layout_, o, rho);
  const GradientPlan& pl = plan(j);
  if (pl.nna == 0) return 0.0;
  const ComplexMatrix obs_a = tensor(Observable::pauli_z().matrix(), o);
  const ComplexMatrix rho_a = tensor(DensityOperator::basis(2, 0).matrix(), rho);
  return pl.members.expectation(theta.values(), obs_a, rho_a);
}

double GradientEngine::grad_extended(int j, const std::vector<double>& theta, const ComplexMatrix& obs_a,
                                     const ComplexMatrix& rho_a) const {
  const GradientPlan& pl = plan(j);
  if (pl.nna == 0) return 0.0;
  return pl.members.expectation(theta, obs_a, rho_a);
}

double grad_exact(const Program& p, const ParamVector& theta, int j, const Observable& o, const DensityOperator& rho) {
  return grad_exact(p, Layout(qvar_set(p)), theta, j, o, rho);
}

double grad_exact(const Program& p, const Layout& layout, const ParamVector& theta, int j, const Observable& o,
                  const DensityOperator& rho) {
  check_plain(p);
  const int k = static_cast<int>(theta.size());
  if (max_param_index(p) > k) {
    throw SemanticError("program references th" + std::to_string(max_param_index(p)) + " but theta has " +
                        std::to_string(k) + " entries");
  }
  if (j < 1 || j > k) throw SemanticError("parameter index " + std::to_string(j) + " out of range [1, " + std::to_string(k) + "]");
  check_dims(layout, o.matrix(), rho.matrix());
  const DiffResult d = differentiate(p, j, k);
  return observable_semantics_ancilla(d.transformed, d.ancilla, layout, o, rho, theta);
}

double finite_difference(const Program& p, const ParamVector& theta, int j, const Observable& o,
                         const DensityOperator& rho, double h) {
  return finite_difference(p, Layout(qvar_set(p)), theta, j, o, rho, h);
}

double finite_difference(const Program& p, const Layout& layout, const ParamVector& theta, int j,
                         const Observable& o, const DensityOperator& rho, double h) {
  if (!(h > 0.0)) throw SemanticError("finite-difference step must be positive");
  const MemberExecutable f(p, layout);
  check_dims(layout, o.matrix(), rho.matrix());
  const double up = f.expectation(theta.shifted(j, h).values(), o.matrix(), rho.matrix());
  const double down = f.expectation(theta.shifted(j, -h).values(), o.matrix(), rho.matrix());
  return (up - down) / (2 * h);
}

// ---- sampling -----------------------------------------------------------------

std::uint64_t sample_count(std::size_t m, double delta, double c) {
  if (!(delta > 0.0)) throw SemanticError("delta must be positive");
  if (!(c > 0.0)) throw SemanticError("shot constant c must be positive");
  const double n = std::ceil(c * static_cast<double>(m) * static_cast<double>(m) / (delta * delta));
  if (n > 1e15) throw NumericError("requested shot count is too large");
  return static_cast<std::uint64_t>(n);
}

namespace {

// rho = sum_i w_i |v_i><v_i|, keeping only positive weights.
struct PureMixture {
  std::vector<double> cumulative;
  std::vector<ComplexVector> states;
  double total = 0.0;
};

PureMixture decompose(const ComplexMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(0.5 * (rho + rho.adjoint())));
  PureMixture mix;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    const double w = es.eigenvalues()(i);
    if (w <= 1e-15) continue;
    mix.total += w;
    mix.cumulative.push_back(mix.total);
    mix.states.push_back(es.eigenvectors().col(i));
  }
  return mix;
}

}  // namespace

SampledEstimate estimate_grad_sampled(const GradientEngine& engine, const ParamVector& theta, int j,
                                      const Observable& o, const DensityOperator& rho, const SamplerConfig& cfg) {
  check_theta(engine, theta, j);
  check_dims(engine.layout(), o.matrix(), rho.matrix());
  if (!(cfg.delta > 0.0)) throw SemanticError("delta must be positive");
  const GradientPlan& pl = engine.plan(j);
  SampledEstimate est;
  est.m = pl.nna;
  if (est.m == 0) {
    est.note = "no non-aborting derivative programs; the derivative is exactly 0";
    return est;
  }
  est.shots = sample_count(est.m, cfg.delta, cfg.c);

  const PureMixture mix = decompose(rho.matrix());
  const ComplexMatrix obs_a = tensor(Observable::pauli_z().matrix(), o.matrix());
  const auto m = static_cast<double>(est.m);
  const std::size_t dim = engine.layout().dim();
  const std::uint64_t n = est.shots;
  std::vector<double> values(n, 0.0);

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      SplitMix64 rng(cfg.seed, t);
      auto uniform = [&rng] { return rng.uniform(); };
      const auto i = std::min(static_cast<std::size_t>(rng.uniform() * m), est.m - 1);
      // Sub-normalized inputs leave probability 1 - tr(rho) of "no state".
      const double u = rng.uniform();
      if (mix.states.empty() || u >= mix.total) continue;
      const auto k = static_cast<std::size_t>(
          std::upper_bound(mix.cumulative.begin(), mix.cumulative.end(), u) - mix.cumulative.begin());
      const ComplexVector& v = mix.states[std::min(k, mix.states.size() - 1)];
      ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(2 * dim));
      psi.head(static_cast<Eigen::Index>(dim)) = v;
      const auto out = pl.members.member(i).trajectory(theta.values(), std::move(psi), uniform);
      if (!out) continue;
      values[t] = m * (out->adjoint() * obs_a * *out)(0, 0).real();
    }
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || n < 1024) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (n + static_cast<std::uint64_t>(jobs) - 1) / static_cast<std::uint64_t>(jobs);
    for (int w = 0; w < jobs; ++w) {
      const std::uint64_t b = std::min(n, chunk * static_cast<std::uint64_t>(w));
      const std::uint64_t e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  est.value = sum / static_cast<double>(n);
  return est;
}

SampledEstimate estimate_grad_sampled(const Program& p, const ParamVector& theta, int j, const Observable& o,
                                      const DensityOperator& rho, double delta, std::uint64_t seed, double c) {
  const GradientEngine engine(p, Layout(qvar_set(p)), static_cast<int>(theta.size()));
  SamplerConfig cfg;
  cfg.delta = delta;
  cfg.c = c;
  cfg.seed = seed;
  return estimate_grad_sampled(engine, theta, j, o, rho, cfg);
}

// ---- reports ----------------------------------------------------------------------

GradientReport grad_all(const Program& p, const ParamVector& theta, const Observable& o, const DensityOperator& rho) {
  return grad_all(GradientEngine(p, Layout(qvar_set(p)), static_cast<int>(theta.size())), theta, o, rho);
}

GradientReport grad_all(const GradientEngine& engine, const ParamVector& theta, const Observable& o,
                        const DensityOperator& rho) {
  GradientReport r;
  r.theta = theta;
  r.method = "exact";
  for (int j = 1; j <= engine.num_params(); ++j) {
    const double g = engine.grad(j, theta, o.matrix(), rho.matrix());
    if (!std::isfinite(g)) throw NumericError("non-finite gradient for th" + std::to_string(j));
    r.grad.push_back(g);
    r.nna.push_back(engine.plan(j).nna);
    r.oc.push_back(engine.plan(j).oc);
    r.shots.push_back(0);
  }
  return r;
}

GradientReport grad_all_sampled(const GradientEngine& engine, const ParamVector& theta, const Observable& o,
                                const DensityOperator& rho, const SamplerConfig& cfg) {
  GradientReport r;
  r.theta = theta;
  r.method = "sampled";
  r.delta = cfg.delta;
  r.c = cfg.c;
  r.seed = cfg.seed;
  for (int j = 1; j <= engine.num_params(); ++j) {
    SamplerConfig per = cfg;
    per.seed = SplitMix64(cfg.seed, static_cast<std::uint64_t>(j))();
    const SampledEstimate e = estimate_grad_sampled(engine, theta, j, o, rho, per);
    if (!std::isfinite(e.value)) throw NumericError("non-finite gradient estimate for th" + std::to_string(j));
    r.grad.push_back(e.value);
    r.nna.push_back(engine.plan(j).nna);
    r.oc.push_back(engine.plan(j).oc);
    r.shots.push_back(e.shots);
  }
  return r;
}

}  // namespace qdiff
