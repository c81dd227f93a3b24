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


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qdiff/errors.hpp"
#include "qdiff/frontend.hpp"
#include "qdiff/gradient.hpp"
#include "qdiff/harness.hpp"
#include "test_util.hpp"

namespace qdiff {
namespace {

const QVar q1{"q1", 2}, q2{"q2", 2};
const Observable kZ = Observable::pauli_z();
const DensityOperator kZero = DensityOperator::basis(2, 0);

Program rx1() { return make_apply(Gate::rot(Axis::X, 1), {q1}); }

Program simple_case() {
  return parse("case M[q1] = 0 -> Rx(th1)[q1]; Ry(th1)[q1], 1 -> Rz(th1)[q1] end").body;
}

TEST(GradExact, RotationX) {
  const double t = std::numbers::pi / 3;
  EXPECT_NEAR(grad_exact(rx1(), ParamVector({t}), 1, kZ, kZero), -std::sin(t), 1e-12);
  EXPECT_NEAR(finite_difference(rx1(), ParamVector({t}), 1, kZ, kZero), -std::sin(t), 1e-8);
}

TEST(GradExact, UnusedParameterIsZero) {
  EXPECT_EQ(grad_exact(rx1(), ParamVector({0.3, 0.9}), 2, kZ, kZero), 0.0);
}

TEST(GradExact, SimpleCaseMatchesFiniteDifference) {
  const ParamVector th({0.7});
  EXPECT_NEAR(grad_exact(simple_case(), th, 1, kZ, kZero), finite_difference(simple_case(), th, 1, kZ, kZero), 1e-5);
}

TEST(GradExact, Errors) {
  EXPECT_THROW(grad_exact(rx1(), ParamVector({0.1}), 2, kZ, kZero), SemanticError);
  EXPECT_THROW(grad_exact(rx1(), ParamVector({0.1}), 1, kZ, DensityOperator::basis(4, 0)), DimensionError);
  EXPECT_THROW(grad_exact(make_sum(rx1(), rx1()), ParamVector({0.1}), 1, kZ, kZero), SemanticError);
}

TEST(FiniteDifference, Examples) {
  EXPECT_NEAR(finite_difference(rx1(), ParamVector({0.0}), 1, kZ, kZero), 0.0, 1e-12);
  EXPECT_NEAR(finite_difference(rx1(), ParamVector({std::numbers::pi / 2}), 1, kZ, kZero), -1.0, 1e-8);
  EXPECT_EQ(finite_difference(make_skip({q1}), ParamVector({0.4}), 1, kZ, kZero), 0.0);
}

TEST(GradExact, OracleEquivalenceOnCorpus) {
  std::mt19937_64 rng(51);
  for (const auto& g : testing::plain_corpus(50, 31)) {
    const Layout layout(g.vars);
    for (int j = 1; j <= g.k; ++j) {
      for (int t = 0; t < 3; ++t) {
        const ParamVector th = testing::random_theta(g.k, rng);
        const Observable o = random_observable(layout.dim(), rng);
        const DensityOperator rho = random_density(layout.dim(), rng);
        EXPECT_NEAR(grad_exact(g.p, layout, th, j, o, rho), finite_difference(g.p, layout, th, j, o, rho), 1e-5)
            << print_program(g.p);
      }
    }
  }
}

TEST(Engine, AgreesWithFreeFunctionsAndCountsMembers) {
  std::mt19937_64 rng(53);
  for (const auto& g : testing::plain_corpus(30, 32)) {
    const Layout layout(g.vars);
    const GradientEngine engine(g.p, layout, g.k);
    const ParamVector th = testing::random_theta(g.k, rng);
    const Observable o = random_observable(layout.dim(), rng);
    const DensityOperator rho = random_density(layout.dim(), rng);
    for (int j = 1; j <= g.k; ++j) {
      EXPECT_NEAR(engine.grad(j, th, o.matrix(), rho.matrix()), grad_exact(g.p, layout, th, j, o, rho), 1e-12);
      EXPECT_EQ(engine.plan(j).members.size(), engine.plan(j).nna);
      EXPECT_EQ(engine.plan(j).nna, nna(differentiate(g.p, j, g.k).transformed));
      EXPECT_LE(engine.plan(j).nna, engine.plan(j).oc);
    }
  }
}

TEST(Engine, AncillaAvoidsLayoutNames) {
  const Layout layout({q1, QVar{"A1_1", 2}});
  const GradientEngine engine(rx1(), layout, 1);
  EXPECT_EQ(engine.plan(1).diff.ancilla.name, "A1_2");
  EXPECT_NEAR(engine.grad(1, ParamVector({0.5}), embed(kZ.matrix(), {q1}, layout.vars()), DensityOperator::basis(4, 0).matrix()),
              -std::sin(0.5), 1e-12);
}

TEST(GradAll, Examples) {
  const Program p = make_seq(rx1(), make_apply(Gate::rot(Axis::Z, 2), {q1}));
  const GradientReport r = grad_all(p, ParamVector({0.4, 1.2}), kZ, kZero);
  ASSERT_EQ(r.grad.size(), 2u);
  EXPECT_NEAR(r.grad[0], -std::sin(0.4), 1e-12);
  EXPECT_NEAR(r.grad[1], 0.0, 1e-12);
  EXPECT_EQ(r.method, "exact");
  EXPECT_EQ(r.oc, (std::vector<std::uint64_t>{1, 1}));

  const GradientReport s = grad_all(make_skip({q1}), ParamVector({0.1, 0.2}), kZ, kZero);
  EXPECT_EQ(s.grad, (std::vector<double>{0.0, 0.0}));

  const ParamVector th({0.9});
  const GradientReport c = grad_all(simple_case(), th, kZ, kZero);
  ASSERT_EQ(c.grad.size(), 1u);
  EXPECT_NEAR(c.grad[0], finite_difference(simple_case(), th, 1, kZ, kZero), 1e-5);
  EXPECT_EQ(c.nna, std::vector<std::size_t>{2});
}

TEST(Sampler, ShotCount) {
  EXPECT_EQ(sample_count(1, 0.05), 4000u);
  EXPECT_EQ(sample_count(2, 0.05), 16000u);
  EXPECT_EQ(sample_count(3, 0.025), 4 * sample_count(3, 0.05));
  EXPECT_THROW(sample_count(1, 0.0), SemanticError);
}

TEST(Sampler, ZeroMembersGiveExactZero) {
  const SampledEstimate e = estimate_grad_sampled(rx1(), ParamVector({0.3, 0.2}), 2, kZ, kZero, 0.05, 1);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.shots, 0u);
  EXPECT_FALSE(e.note.empty());
}

TEST(Sampler, RejectsNonPositiveDelta) {
  EXPECT_THROW(estimate_grad_sampled(rx1(), ParamVector({0.3}), 1, kZ, kZero, -1.0, 1), SemanticError);
}

TEST(Sampler, ConcentratesOnRotationX) {
  const double t = std::numbers::pi / 3;
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SampledEstimate e = estimate_grad_sampled(rx1(), ParamVector({t}), 1, kZ, kZero, 0.05, seed);
    EXPECT_EQ(e.shots, 4000u);
    if (std::abs(e.value + std::sin(t)) <= 0.05) ++within;
  }
  EXPECT_GE(within, 95);
}

TEST(Sampler, DeterministicAndIndependentOfJobs) {
  const BenchProgram b = generate_bench({BenchFamily::VQE, BenchScale::S, BenchControl::If});
  const Layout layout(qvar_set(b.program));
  const GradientEngine engine(b.program, layout, b.num_params);
  std::mt19937_64 rng(57);
  const ParamVector th = testing::random_theta(b.num_params, rng);
  const Observable o(embed(kZ.matrix(), {q2}, layout.vars()));
  const DensityOperator rho = random_density(layout.dim(), rng);
  SamplerConfig cfg;
  cfg.delta = 0.2;
  cfg.seed = 9;
  const double one = estimate_grad_sampled(engine, th, 1, o, rho, cfg).value;
  cfg.jobs = 4;
  const double four = estimate_grad_sampled(engine, th, 1, o, rho, cfg).value;
  EXPECT_EQ(one, four);
  EXPECT_EQ(estimate_grad_sampled(engine, th, 1, o, rho, cfg).value, four);
}

TEST(Sampler, UnbiasedOnTwoQubitBenchmark) {
  const BenchProgram b = generate_bench({BenchFamily::VQE, BenchScale::S, BenchControl::Shared});
  const Layout layout(qvar_set(b.program));
  ASSERT_EQ(layout.dim(), 4u);
  const GradientEngine engine(b.program, layout, b.num_params);
  ASSERT_EQ(engine.plan(1).nna, 2u);
  std::mt19937_64 rng(59);
  const ParamVector th = testing::random_theta(b.num_params, rng);
  const Observable o(embed(kZ.matrix(), {q1}, layout.vars()));
  const DensityOperator rho = DensityOperator::basis(4, 0);
  const double exact = engine.grad(1, th, o.matrix(), rho.matrix());
  SamplerConfig cfg;
  cfg.delta = 0.2;
  const int runs = 200;
  double sum = 0.0, sq = 0.0;
  for (int s = 0; s < runs; ++s) {
    cfg.seed = 1000 + static_cast<std::uint64_t>(s);
    const double v = estimate_grad_sampled(engine, th, 1, o, rho, cfg).value;
    sum += v;
    sq += v * v;
  }
  const double mean = sum / runs;
  const double se = std::sqrt((sq / runs - mean * mean) / (runs - 1));
  EXPECT_LE(std::abs(mean - exact), 3 * se) << "mean " << mean << " exact " << exact << " se " << se;
}

TEST(Sampler, MixedInputState) {
  std::mt19937_64 rng(61);
  const DensityOperator rho = random_density(2, rng);
  const ParamVector th({0.8});
  const double exact = grad_exact(rx1(), th, 1, kZ, rho);
  const SampledEstimate e = estimate_grad_sampled(rx1(), th, 1, kZ, rho, 0.02, 5);
  EXPECT_NEAR(e.value, exact, 0.02);
}

TEST(SplitMix, StreamsAreReproducibleAndDistinct) {
  SplitMix64 a(7, 3), b(7, 3), c(7, 4);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  SplitMix64 u(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

}  // namespace
}  // namespace qdiff
