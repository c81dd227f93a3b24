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
#include <numeric>
#include <random>
#include <set>

#include "qdiff/autodiff.hpp"
#include "qdiff/compile.hpp"
#include "qdiff/errors.hpp"
#include "qdiff/frontend.hpp"
#include "qdiff/gradient.hpp"
#include "qdiff/harness.hpp"
#include "test_util.hpp"

namespace qdiff {
namespace {

std::vector<int> range12(int first) {
  std::vector<int> r(12);
  std::iota(r.begin(), r.end(), first);
  return r;
}

int count_param_gates(const Program& p) {
  int n = 0;
  const std::string text = print_program(p);
  for (std::size_t pos = 0; (pos = text.find("(th", pos)) != std::string::npos; ++pos) ++n;
  return n;
}

TEST(BlockQ, Structure) {
  const Program q = build_block_Q(range12(1));
  EXPECT_EQ(gate_count(q), 12u);
  for (int j = 1; j <= 12; ++j) EXPECT_EQ(occurrence_count(q, j), 1u);
  EXPECT_EQ(qvar_set(q), classifier_register());
  EXPECT_THROW(build_block_Q({1, 2, 3}), SemanticError);
  std::vector<int> dup = range12(1);
  dup[3] = 1;
  EXPECT_THROW(build_block_Q(dup), SemanticError);
}

TEST(BlockQ, IdentityAtZero) {
  const Program q = build_block_Q(range12(1));
  std::mt19937_64 rng(3);
  const DensityOperator rho = random_density(16, rng);
  const DensityOperator out = denote(q, ParamVector(std::vector<double>(12, 0.0)), rho);
  EXPECT_LT(testing::frobenius(out.matrix() - rho.matrix()), 1e-12);
}

TEST(CaseStudy, Programs) {
  const Program p1 = build_P1(), p2 = build_P2();
  EXPECT_EQ(max_param_index(p1), kP1Params);
  EXPECT_EQ(max_param_index(p2), kP2Params);
  EXPECT_EQ(gate_count(p1), 24u);
  EXPECT_EQ(gate_count(p2), 36u);
  const ResourceReport r = bench_report(p2);
  EXPECT_EQ(r.num_params, 36);
  EXPECT_EQ(r.qubit_count, 4u);
}

TEST(CaseStudy, CompiledDerivativeOfP1FirstBlock) {
  const Program p1 = build_P1();
  const DiffResult d = differentiate(p1, 1, kP2Params);
  const CompiledMultiset c = compile(d.transformed);
  ASSERT_EQ(c.members.size(), 1u);
  const Program qprime = differentiate(build_block_Q(range12(1)), 1, kP2Params).transformed;
  const Program expected = make_seq(compile(qprime).members.at(0), build_block_Q(range12(13)));
  EXPECT_EQ(print_program(c.members[0]), print_program(expected));
}

TEST(CaseStudy, CompiledDerivativeOfP1UnusedParameterAborts) {
  const Program p1 = build_P1();
  for (int j = 25; j <= 36; ++j) {
    const CompiledMultiset c = compile(differentiate(p1, j, kP2Params).transformed);
    ASSERT_EQ(c.members.size(), 1u);
    EXPECT_TRUE(c.members[0]->is<AbortStmt>());
    EXPECT_EQ(nna(c), 0u);
  }
}

TEST(CaseStudy, CompiledDerivativeOfP2SecondBlock) {
  const Program p2 = build_P2();
  const DiffResult d = differentiate(p2, 13, kP2Params);
  const CompiledMultiset c = compile(d.transformed);
  ASSERT_EQ(c.members.size(), 1u);
  Program last = c.members[0];
  while (const auto* s = last->as<SeqStmt>()) last = s->second;
  const auto* cs = last->as<CaseStmt>();
  ASSERT_NE(cs, nullptr);
  ASSERT_EQ(cs->branches.size(), 2u);
  const auto* ab = cs->branches[1]->as<AbortStmt>();
  ASSERT_NE(ab, nullptr);
  const Program qprime = compile(differentiate(build_block_Q(range12(13)), 13, kP2Params).transformed).members.at(0);
  const Program expected = make_seq(build_block_Q(range12(1)),
                                    make_case({QVar{"q1", 2}}, Measurement::computational(2),
                                              {qprime, make_abort(ab->reg)}));
  EXPECT_EQ(print_program(c.members[0]), print_program(expected));
  std::set<std::string> names;
  for (const auto& v : ab->reg) names.insert(v.name);
  EXPECT_EQ(names, (std::set<std::string>{"q1", "q2", "q3", "q4", d.ancilla.name}));
  EXPECT_EQ(nna(c), 1u);
  EXPECT_EQ(occurrence_count(p2, 13), 1u);
}

TEST(Classify, Examples) {
  const ParamVector zero(std::vector<double>(kP2Params, 0.0));
  EXPECT_NEAR(classify(build_P2(), zero, {0, 0, 0, 0}), 0.0, 1e-12);
  EXPECT_NEAR(classify(build_P2(), zero, {0, 0, 0, 1}), 1.0, 1e-12);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const ParamVector th = testing::random_theta(kP2Params, rng);
    for (const auto& [z, f] : dataset4()) {
      (void)f;
      const double l = classify(build_P2(), th, z);
      EXPECT_GE(l, -1e-12);
      EXPECT_LE(l, 1 + 1e-12);
    }
  }
  EXPECT_THROW(encode_input({0, 2, 0, 0}), SemanticError);
}

TEST(Loss, Examples) {
  int mismatches = 0;
  for (const auto& [z, f] : dataset4()) mismatches += (z[3] != f);
  EXPECT_EQ(mismatches, 8);
  EXPECT_NEAR(loss(build_P1(), ParamVector(std::vector<double>(kP1Params, 0.0))), 0.5 * mismatches, 1e-12);
  EXPECT_NEAR(loss(build_P2(), ParamVector(std::vector<double>(kP2Params, 0.0))), 4.0, 1e-12);
  // Rx(pi/2) on q4 turns every input into a fair coin on q4.
  std::vector<double> half(kP1Params, 0.0);
  half[3] = std::numbers::pi / 2;
  EXPECT_NEAR(loss(build_P1(), ParamVector(half)), 2.0, 1e-12);
}

TEST(Loss, LabelTable) {
  EXPECT_EQ(label_f({0, 0, 0, 0}), 1);
  EXPECT_EQ(label_f({1, 0, 0, 0}), 0);
  EXPECT_EQ(label_f({0, 1, 1, 1}), 0);
  EXPECT_EQ(label_f({1, 1, 0, 1}), 1);
  EXPECT_EQ(dataset4().size(), 16u);
}

TEST(Loss, GradientMatchesFiniteDifference) {
  const Program p2 = build_P2();
  std::mt19937_64 rng(7);
  const ParamVector th = testing::random_theta(kP2Params, rng);
  const std::vector<double> g = loss_gradient(p2, th);
  ASSERT_EQ(g.size(), static_cast<std::size_t>(kP2Params));
  std::uniform_int_distribution<int> pick(0, kP2Params - 1);
  const double h = 1e-5;
  for (int t = 0; t < 5; ++t) {
    const int a = pick(rng);
    std::vector<double> plus = th.values(), minus = th.values();
    plus[static_cast<std::size_t>(a)] += h;
    minus[static_cast<std::size_t>(a)] -= h;
    const double fd = (loss(p2, ParamVector(plus)) - loss(p2, ParamVector(minus))) / (2 * h);
    EXPECT_NEAR(g[static_cast<std::size_t>(a)], fd, 1e-4) << "alpha = " << a + 1;
  }
}

TEST(Loss, SmallStepDescends) {
  const Program p2 = build_P2();
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const ParamVector th = testing::random_theta(kP2Params, rng);
    const std::vector<double> g = loss_gradient(p2, th);
    std::vector<double> next = th.values();
    for (std::size_t i = 0; i < next.size(); ++i) next[i] -= 0.01 * g[i];
    EXPECT_LE(loss(p2, ParamVector(next)), loss(p2, th) + 1e-6);
  }
}

TEST(Train, ZeroLearningRateIsFlat) {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 3;
  const TrainResult r = train(build_P1(), kP1Params, cfg);
  ASSERT_EQ(r.losses.size(), 4u);
  for (double l : r.losses) EXPECT_DOUBLE_EQ(l, r.losses[0]);
  EXPECT_EQ(r.final_theta.values(), r.initial.values());
  EXPECT_NEAR(r.losses[0], loss(build_P1(), r.initial), 1e-12);
}

TEST(Train, ShortRunDecreasesAndReportsEpochs) {
  TrainConfig cfg;
  cfg.epochs = 5;
  std::vector<int> seen;
  const TrainResult r = train(build_P2(), kP2Params, cfg, [&](int e, double) { seen.push_back(e); });
  EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3, 4, 5}));
  EXPECT_LT(r.losses.back(), r.losses.front());
  EXPECT_NEAR(r.losses.back(), loss(build_P2(), r.final_theta), 1e-12);
}

TEST(Train, InitialParametersAreSeededAndInRange) {
  TrainConfig cfg;
  const ParamVector a = initial_parameters(36, cfg), b = initial_parameters(36, cfg);
  EXPECT_EQ(a.values(), b.values());
  for (double t : a.values()) {
    EXPECT_GE(t, 0.0);
    EXPECT_LT(t, 2 * std::numbers::pi);
  }
  cfg.seed = 43;
  EXPECT_NE(initial_parameters(36, cfg).values(), a.values());
}

TEST(Train, Errors) {
  TrainConfig cfg;
  cfg.epochs = -1;
  EXPECT_THROW(train(build_P1(), kP1Params, cfg), SemanticError);
  cfg.epochs = 5;
  cfg.learning_rate = -0.1;
  EXPECT_THROW(train(build_P1(), kP1Params, cfg), SemanticError);
  cfg.learning_rate = std::nan("");
  EXPECT_THROW(train(build_P1(), kP1Params, cfg), SemanticError);
}

TEST(Bench, NamesAndParsing) {
  EXPECT_EQ(parse_family("qnn"), BenchFamily::QNN);
  EXPECT_EQ(parse_scale("M"), BenchScale::M);
  EXPECT_EQ(parse_control("While"), BenchControl::While);
  EXPECT_THROW(parse_family("foo"), SemanticError);
  EXPECT_EQ(all_bench_specs().size(), 36u);
  for (const auto& spec : all_bench_specs()) {
    const BenchSpec back{parse_family(to_string(spec.family)), parse_scale(to_string(spec.scale)),
                         parse_control(to_string(spec.control))};
    EXPECT_EQ(generate_bench(back).name, generate_bench(spec).name);
  }
}

TEST(Bench, QnnSmallBasicBlock) {
  const BenchProgram b = generate_bench({BenchFamily::QNN, BenchScale::S, BenchControl::Basic});
  EXPECT_EQ(bench_qubits({BenchFamily::QNN, BenchScale::S, BenchControl::Basic}), 4);
  EXPECT_EQ(qvar_set(b.program).size(), 4u);
  EXPECT_EQ(count_param_gates(b.program), 18);
  EXPECT_EQ(b.num_params, 18);
  EXPECT_EQ(gate_count(b.program), 18u);
}

TEST(Bench, WhileVariantUsesBoundTwo) {
  for (auto f : {BenchFamily::QNN, BenchFamily::VQE, BenchFamily::QAOA}) {
    const BenchSpec spec{f, BenchScale::M, BenchControl::While};
    const BenchProgram b = generate_bench(spec);
    int loops = 0;
    const std::string text = print_program(b.program);
    for (std::size_t pos = 0; (pos = text.find("while", pos)) != std::string::npos; ++pos) ++loops;
    EXPECT_EQ(loops, bench_control_layers(spec));
    EXPECT_EQ(text.find("while (1)"), std::string::npos);
    EXPECT_NE(text.find("while (2)"), std::string::npos);
  }
}

TEST(Bench, SharedParameterAndIfVariant) {
  const BenchProgram basic = generate_bench({BenchFamily::VQE, BenchScale::S, BenchControl::Basic});
  const BenchProgram shared = generate_bench({BenchFamily::VQE, BenchScale::S, BenchControl::Shared});
  const BenchProgram iff = generate_bench({BenchFamily::VQE, BenchScale::S, BenchControl::If});
  EXPECT_EQ(occurrence_count(basic.program, 1), 1u);
  EXPECT_EQ(occurrence_count(shared.program, 1), 2u);
  EXPECT_EQ(gate_count(shared.program), gate_count(basic.program));
  EXPECT_EQ(occurrence_count(iff.program, 1), 4u);
  EXPECT_NE(print_program(iff.program).find("case M[q1]"), std::string::npos);
}

TEST(Bench, RoundTripsThroughText) {
  for (const auto& spec : all_bench_specs()) {
    const BenchProgram b = generate_bench(spec);
    EXPECT_EQ(print_program(parse(print_program(b.program)).body), print_program(b.program)) << b.name;
  }
}

TEST(Bench, ReportColumnsAndOcBound) {
  for (const auto& spec : all_bench_specs()) {
    const BenchProgram b = generate_bench(spec);
    const ResourceReport r = bench_report(b.program, b.num_params);
    ASSERT_EQ(r.oc.size(), static_cast<std::size_t>(b.num_params)) << b.name;
    ASSERT_EQ(r.nna.size(), r.oc.size());
    for (std::size_t i = 0; i < r.oc.size(); ++i) EXPECT_LE(r.nna[i], r.oc[i]) << b.name << " j=" << i + 1;
    EXPECT_GT(r.gate_count, 0u);
    EXPECT_GT(r.line_count, 0u);
    EXPECT_GT(r.layer_count, 0u);
    EXPECT_EQ(r.qubit_count, static_cast<std::size_t>(bench_qubits(spec)));
  }
  const ResourceReport skip = bench_report(make_skip({QVar{"q1", 2}}));
  EXPECT_EQ(skip.gate_count, 0u);
  EXPECT_EQ(skip.num_params, 0);
}

TEST(Bench, WhileGateCountMultipliesBody) {
  const BenchSpec spec{BenchFamily::QAOA, BenchScale::S, BenchControl::While};
  const BenchProgram w = generate_bench(spec);
  const BenchProgram basic = generate_bench({BenchFamily::QAOA, BenchScale::S, BenchControl::Basic});
  EXPECT_EQ(gate_count(w.program), gate_count(basic.program) * (1 + 2 * bench_control_layers(spec)));
}

}  // namespace
}  // namespace qdiff
