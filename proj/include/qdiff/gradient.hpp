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

// Gradients of tr(O [[p(theta)]] rho): exact evaluation of the compiled
// derivative programs, central finite differences, and the Monte-Carlo
// estimator that samples one derivative program per shot.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdiff/autodiff.hpp"
#include "qdiff/compile.hpp"
#include "qdiff/semantics.hpp"

namespace qdiff {

/// Differentiated, compiled and lowered derivative of one parameter.
struct GradientPlan {
  DiffResult diff;
  MemberExecutable members;  // non-aborting P'_i on [A] + layout
  std::size_t nna = 0;
  std::uint64_t oc = 0;
};

/// Caches the derivative plans of a plain program so repeated gradient
/// evaluations (training loops) only run the simulator.
class GradientEngine {
 public:
  /// `num_params` = k; 0 means the largest referenced index.
  GradientEngine(Program p, Layout layout, int num_params = 0);

  const Program& program() const { return program_; }
  const Layout& layout() const { return layout_; }
  int num_params() const { return num_params_; }
  const GradientPlan& plan(int j) const;

  /// tr(O [[p(theta)]] rho).
  double value(const ParamVector& theta, const ComplexMatrix& o, const ComplexMatrix& rho) const;
  /// sum_i tr((Z_A (x) O) [[P'_i(theta)]](|0><0|_A (x) rho)).
  double grad(int j, const ParamVector& theta, const ComplexMatrix& o, const ComplexMatrix& rho) const;
  /// Same with the ancilla-extended observable and state already built.
  double grad_extended(int j, const std::vector<double>& theta, const ComplexMatrix& obs_a,
                       const ComplexMatrix& rho_a) const;

  const Executable& forward() const { return forward_; }

 private:
  Program program_;
  Layout layout_;
  int num_params_;
  Executable forward_;
  std::vector<GradientPlan> plans_;
};

/// d/d theta_j tr(O [[p]] rho) via the derivative programs. Layout = qvar_set(p).
double grad_exact(const Program& p, const ParamVector& theta, int j, const Observable& o, const DensityOperator& rho);
double grad_exact(const Program& p, const Layout& layout, const ParamVector& theta, int j, const Observable& o,
                  const DensityOperator& rho);

/// (f(theta + h e_j) - f(theta - h e_j)) / 2h with f the observable semantics.
double finite_difference(const Program& p, const ParamVector& theta, int j, const Observable& o,
                         const DensityOperator& rho, double h = 1e-4);
double finite_difference(const Program& p, const Layout& layout, const ParamVector& theta, int j,
                         const Observable& o, const DensityOperator& rho, double h = 1e-4);

inline constexpr double kDefaultShotConstant = 10.0;

/// N = ceil(c m^2 / delta^2).
std::uint64_t sample_count(std::size_t m, double delta, double c = kDefaultShotConstant);

struct SampledEstimate {
  double value = 0.0;
  std::uint64_t shots = 0;  // = input-state preparations
  std::size_t m = 0;
  std::string note;
};

struct SamplerConfig {
  double delta = 0.05;
  double c = kDefaultShotConstant;
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Monte-Carlo estimate of the exact gradient: each shot draws i uniformly
/// from the m derivative programs, runs one trajectory of P'_i from
/// |0>_A (x) psi (psi drawn from the eigen-decomposition of rho) and records
/// m <psi_out|Z_A (x) O|psi_out>, or 0 if it aborts. Shot t uses its own
/// stream seeded from (seed, t), so the result does not depend on `jobs`.
SampledEstimate estimate_grad_sampled(const GradientEngine& engine, const ParamVector& theta, int j,
                                      const Observable& o, const DensityOperator& rho, const SamplerConfig& cfg);
SampledEstimate estimate_grad_sampled(const Program& p, const ParamVector& theta, int j, const Observable& o,
                                      const DensityOperator& rho, double delta, std::uint64_t seed,
                                      double c = kDefaultShotConstant);

struct GradientReport {
  ParamVector theta;
  std::vector<double> grad;
  std::string method;  // "exact" or "sampled"
  std::vector<std::size_t> nna;
  std::vector<std::uint64_t> oc;
  std::vector<std::uint64_t> shots;
  std::optional<double> delta;
  std::optional<double> c;
  std::optional<std::uint64_t> seed;
};

GradientReport grad_all(const Program& p, const ParamVector& theta, const Observable& o, const DensityOperator& rho);
GradientReport grad_all(const GradientEngine& engine, const ParamVector& theta, const Observable& o,
                        const DensityOperator& rho);
GradientReport grad_all_sampled(const GradientEngine& engine, const ParamVector& theta, const Observable& o,
                                const DensityOperator& rho, const SamplerConfig& cfg);

/// Counter-based generator: the t-th stream of a seed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  SplitMix64(std::uint64_t seed, std::uint64_t stream);
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();
  /// Uniform double in [0, 1).
  double uniform();

 private:
  std::uint64_t state_;
};

}  // namespace qdiff
