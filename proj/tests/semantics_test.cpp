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

#include "qdiff/compile.hpp"
#include "qdiff/errors.hpp"
#include "qdiff/frontend.hpp"
#include "qdiff/semantics.hpp"
#include "test_util.hpp"

namespace qdiff {
namespace {

const QVar q1{"q1", 2}, q2{"q2", 2}, A{"A", 2};
const ParamVector kNoParams;

Program X(const QVar& q) { return make_apply(Gate::fixed("X"), {q}); }

TEST(Layout, Validation) {
  EXPECT_THROW(Layout({QVar{"a", 2}}, 1), DimensionError);
  const Layout l({q1, q2});
  EXPECT_EQ(l.dim(), 4u);
  EXPECT_EQ(l.wires({q2}), std::vector<int>{1});
  EXPECT_THROW(l.wires({A}), SemanticError);
  EXPECT_THROW(Layout(Register(11, QVar{"x", 2})), SemanticError);  // duplicate names
  Register big;
  for (int i = 0; i < 11; ++i) big.push_back({"b" + std::to_string(i), 2});
  EXPECT_THROW(Layout{big}, DimensionError);
}

TEST(Denote, SkipAndAbort) {
  std::mt19937_64 rng(1);
  const DensityOperator rho = random_density(2, rng);
  EXPECT_LT(max_abs_diff(denote(make_skip({q1}), kNoParams, rho).matrix(), rho.matrix()), 1e-15);
  EXPECT_LT(denote(make_abort({q1}), kNoParams, rho).matrix().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Denote, WhileFlipsOneToZero) {
  const Program w = make_while(2, {q1}, Measurement::computational(2), X(q1));
  const DensityOperator out = denote(w, kNoParams, DensityOperator::basis(2, 1));
  EXPECT_LT(max_abs_diff(out.matrix(), DensityOperator::basis(2, 0).matrix()), 1e-15);
}

TEST(Denote, InitResetsBoundedInt) {
  const QVar d{"d", 4};
  std::mt19937_64 rng(3);
  const DensityOperator rho = random_density(4, rng);
  const DensityOperator out = denote(make_init(d), kNoParams, rho);
  EXPECT_LT(max_abs_diff(out.matrix(), DensityOperator::basis(4, 0).matrix()), 1e-14);
}

TEST(Denote, DimensionMismatchThrows) {
  EXPECT_THROW(denote(make_skip({q1, q2}), kNoParams, DensityOperator::basis(2, 0)), DimensionError);
  EXPECT_THROW(denote(make_sum(make_skip({q1}), make_skip({q1})), kNoParams, DensityOperator::basis(2, 0)),
               SemanticError);
}

TEST(Denote, MatchesReferenceOnCorpus) {
  std::mt19937_64 rng(9);
  for (const auto& g : testing::plain_corpus(80, 11)) {
    const Layout layout(g.vars);
    const ParamVector th = testing::random_theta(g.k, rng);
    const DensityOperator rho = random_density(layout.dim(), rng);
    const ComplexMatrix expect = testing::naive_denote(g.p, g.vars, th, rho.matrix());
    EXPECT_LT(max_abs_diff(denote(g.p, layout, th, rho).matrix(), expect), 1e-12) << print_program(g.p);
  }
}

TEST(Denote, WhileEqualsItsExpansion) {
  std::mt19937_64 rng(13);
  for (const auto& g : testing::plain_corpus(80, 12)) {
    const Layout layout(g.vars);
    const ParamVector th = testing::random_theta(g.k, rng);
    const DensityOperator rho = random_density(layout.dim(), rng);
    const ComplexMatrix a = denote(g.p, layout, th, rho).matrix();
    const ComplexMatrix b = denote(expand_all_whiles(g.p), layout, th, rho).matrix();
    EXPECT_LT((a - b).norm(), 1e-10);
  }
}

TEST(Denote, TraceDoesNotIncrease) {
  std::mt19937_64 rng(15);
  for (const auto& g : testing::plain_corpus(80, 13)) {
    const Layout layout(g.vars);
    const DensityOperator rho = random_density(layout.dim(), rng);
    const DensityOperator out = denote(g.p, layout, testing::random_theta(g.k, rng), rho);
    EXPECT_LE(out.trace(), rho.trace() + 1e-9);
    EXPECT_GE(min_eigenvalue(out.matrix()), -1e-9);
  }
}

TEST(TraceEnumerate, SumsToDenotation) {
  std::mt19937_64 rng(17);
  for (const auto& g : testing::plain_corpus(80, 14)) {
    const Layout layout(g.vars);
    const ParamVector th = testing::random_theta(g.k, rng);
    const DensityOperator rho = random_density(layout.dim(), rng);
    const FinalMultiset f = trace_enumerate(g.p, layout, th, rho);
    EXPECT_LT((f.total(layout.dim()) - denote(g.p, layout, th, rho).matrix()).norm(), 1e-9);
  }
}

TEST(TraceEnumerate, SumOfSkipsHasMultiplicityTwo) {
  std::mt19937_64 rng(19);
  const DensityOperator rho = random_density(2, rng);
  const FinalMultiset f = trace_enumerate(make_sum(make_skip({q1}), make_skip({q1})), Layout({q1}), kNoParams, rho);
  ASSERT_EQ(f.size(), 2u);
  for (const auto& o : f.outcomes) EXPECT_LT(max_abs_diff(o.state, rho.matrix()), 1e-15);
  EXPECT_EQ(f.outcomes[0].path, "s0");
  EXPECT_EQ(f.outcomes[1].path, "s1");
}

TEST(TraceEnumerate, GenericCaseExample) {
  // case M[q1,q2] with two outcomes: 0 -> P1 [] P2, 1 -> P3, with random unitaries.
  std::mt19937_64 rng(21);
  const Register v{q1, q2};
  const ComplexMatrix u1 = random_unitary(4, rng), u2 = random_unitary(4, rng), u3 = random_unitary(4, rng);
  const ComplexMatrix basis = random_unitary(4, rng);
  ComplexMatrix m0 = ComplexMatrix::Zero(4, 4), m1 = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i) m0 += basis.col(i) * basis.col(i).adjoint();
  for (int i = 2; i < 4; ++i) m1 += basis.col(i) * basis.col(i).adjoint();
  const Measurement meas = make_measurement("N", {m0, m1});
  const Program p = make_case(v, meas,
                              {make_sum(make_apply(Gate::literal_matrix("U1", u1), v),
                                        make_apply(Gate::literal_matrix("U2", u2), v)),
                               make_apply(Gate::literal_matrix("U3", u3), v)});
  const DensityOperator rho = random_density(4, rng);
  const ComplexMatrix r0 = m0 * rho.matrix() * m0.adjoint(), r1 = m1 * rho.matrix() * m1.adjoint();
  const std::vector<ComplexMatrix> expect{u1 * r0 * u1.adjoint(), u2 * r0 * u2.adjoint(), u3 * r1 * u3.adjoint()};
  const FinalMultiset f = trace_enumerate(p, Layout(v), kNoParams, rho);
  std::vector<ComplexMatrix> got;
  for (const auto& o : f.outcomes) got.push_back(o.state);
  EXPECT_TRUE(match_multisets(got, expect).matched);
  EXPECT_EQ(f.outcomes[0].path, "c0.s0");
  EXPECT_EQ(f.outcomes[2].path, "c1");
}

TEST(TraceEnumerate, ZeroFilter) {
  const Program p = make_case({q1}, Measurement::computational(2), {make_skip({q1}), make_skip({q1})});
  const DensityOperator rho = DensityOperator::basis(2, 0);
  EXPECT_EQ(trace_enumerate(p, Layout({q1}), kNoParams, rho).size(), 2u);
  EXPECT_EQ(trace_enumerate(p, Layout({q1}), kNoParams, rho, true).size(), 1u);
}

TEST(MatchMultisets, OrderInsensitiveAndStrict) {
  std::mt19937_64 rng(23);
  const ComplexMatrix a = random_density(2, rng).matrix(), b = random_density(2, rng).matrix();
  EXPECT_TRUE(match_multisets({a, b, a}, {a, a, b}).matched);
  EXPECT_FALSE(match_multisets({a, b}, {a, a}).matched);
  EXPECT_FALSE(match_multisets({a}, {a, a}).matched);
}

TEST(Additive, CompiledMembersMatchTraces) {
  std::mt19937_64 rng(25);
  for (const auto& g : testing::additive_corpus(80, 15)) {
    const Layout layout(g.vars);
    const ParamVector th = testing::random_theta(g.k, rng);
    const DensityOperator rho = random_density(layout.dim(), rng);
    std::vector<ComplexMatrix> lhs;
    for (const auto& o : trace_enumerate(g.p, layout, th, rho, true).outcomes) lhs.push_back(o.state);
    std::vector<ComplexMatrix> rhs;
    for (const auto& m : compile(g.p).members) {
      for (const auto& o : trace_enumerate(m, layout, th, rho, true).outcomes) rhs.push_back(o.state);
    }
    EXPECT_TRUE(match_multisets(lhs, rhs).matched) << print_program(g.p);
  }
}

TEST(ObservableSemantics, Examples) {
  const Observable z = Observable::pauli_z();
  const DensityOperator zero = DensityOperator::basis(2, 0);
  EXPECT_NEAR(observable_semantics(make_skip({q1}), z, zero, kNoParams), 1.0, 1e-15);
  EXPECT_NEAR(observable_semantics(make_apply(Gate::rot(Axis::X, 1), {q1}), z, zero, ParamVector({std::numbers::pi / 3})),
              0.5, 1e-12);
  EXPECT_NEAR(observable_semantics(make_sum(make_skip({q1}), make_skip({q1})), z, zero, kNoParams), 2.0, 1e-15);
  EXPECT_THROW(observable_semantics(make_skip({q1, q2}), z, DensityOperator::basis(4, 0), kNoParams), DimensionError);
}

TEST(ObservableSemantics, BoundedForNormalizedInputs) {
  std::mt19937_64 rng(27);
  for (const auto& g : testing::plain_corpus(60, 16)) {
    const Layout layout(g.vars);
    const double v = observable_semantics(g.p, layout, random_observable(layout.dim(), rng), random_density(layout.dim(), rng),
                                          testing::random_theta(g.k, rng));
    EXPECT_LE(std::abs(v), 1 + 1e-9);
  }
}

TEST(AncillaSemantics, Examples) {
  const Layout v({q1});
  const Observable z = Observable::pauli_z();
  const DensityOperator zero = DensityOperator::basis(2, 0);
  EXPECT_NEAR(observable_semantics_ancilla(make_skip({A, q1}), A, v, z, zero, kNoParams), 1.0, 1e-15);
  EXPECT_NEAR(observable_semantics_ancilla(make_seq(X(A), make_skip({q1})), A, v, z, zero, kNoParams), -1.0, 1e-15);
  const Program g = make_apply(Gate::gadget(Axis::X, 1), {A, q1});
  const double theta = std::numbers::pi / 3;
  const double h = 1e-5;
  const Program rx = make_apply(Gate::rot(Axis::X, 1), {q1});
  const double fd = (observable_semantics(rx, z, zero, ParamVector({theta + h})) -
                     observable_semantics(rx, z, zero, ParamVector({theta - h}))) /
                    (2 * h);
  EXPECT_NEAR(observable_semantics_ancilla(g, A, v, z, zero, ParamVector({theta})), fd, 1e-8);
  EXPECT_NEAR(fd, -std::sin(theta), 1e-8);
}

TEST(AncillaSemantics, AncillaMustBeFresh) {
  EXPECT_THROW(observable_semantics_ancilla(make_skip({q1}), q1, Layout({q1}), Observable::pauli_z(),
                                            DensityOperator::basis(2, 0), kNoParams),
               SemanticError);
}

TEST(DualObservable, Examples) {
  std::mt19937_64 rng(29);
  const Observable o = random_observable(2, rng);
  EXPECT_LT(max_abs_diff(program_dual_observable(make_skip({q1}), Layout({q1}), kNoParams, o.matrix()), o.matrix()), 1e-15);
  const ComplexMatrix u = random_unitary(2, rng);
  const Program pu = make_apply(Gate::literal_matrix("U", u), {q1});
  EXPECT_LT(max_abs_diff(program_dual_observable(pu, Layout({q1}), kNoParams, o.matrix()), u.adjoint() * o.matrix() * u),
            1e-14);
  EXPECT_THROW(program_dual_observable(make_sum(make_skip({q1}), make_skip({q1})), Layout({q1}), kNoParams, o.matrix()),
               SemanticError);
}

TEST(DualObservable, DualityOnCorpus) {
  std::mt19937_64 rng(31);
  int two_qubit = 0;
  for (const auto& g : testing::plain_corpus(60, 17)) {
    const Layout layout(g.vars);
    if (layout.dim() == 4) ++two_qubit;
    const ParamVector th = testing::random_theta(g.k, rng);
    const Observable o = random_observable(layout.dim(), rng);
    const ComplexMatrix dual = program_dual_observable(g.p, layout, th, o.matrix());
    for (int t = 0; t < 20; ++t) {
      const DensityOperator rho = random_density(layout.dim(), rng);
      EXPECT_NEAR(trace_product(o.matrix(), denote(g.p, layout, th, rho).matrix()), trace_product(dual, rho.matrix()), 1e-10);
    }
  }
  EXPECT_GT(two_qubit, 0);
}

TEST(Trajectories, AverageToDenotation) {
  // Averaging |psi><psi| over trajectories converges to [[p]](|psi0><psi0|).
  const SourceUnit u = parse("qvar q1, q2;\nH[q1]; Ry(th1)[q2]; while (2) M[q1] = 1 do Rx(th2)[q1]; CNOT[q1,q2] done");
  const Layout layout(u.vars);
  const ParamVector th({0.4, 1.1});
  const Executable exe(u.body, layout);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int n = 20000;
  ComplexMatrix acc = ComplexMatrix::Zero(4, 4);
  for (int t = 0; t < n; ++t) {
    const auto out = exe.trajectory(th.values(), testing::ket(4, 0), [&] { return uni(rng); });
    if (out) acc += *out * out->adjoint();
  }
  acc /= n;
  const ComplexMatrix expect = denote(u.body, layout, th, DensityOperator::basis(4, 0)).matrix();
  EXPECT_LT(max_abs_diff(acc, expect), 0.02);
}

}  // namespace
}  // namespace qdiff
