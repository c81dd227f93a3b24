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

#include <numbers>
#include <random>

#include "qdiff/autodiff.hpp"
#include "qdiff/errors.hpp"
#include "qdiff/frontend.hpp"
#include "qdiff/semantics.hpp"
#include "test_util.hpp"

namespace qdiff {
namespace {

const QVar q1{"q1", 2}, q2{"q2", 2};

Program rot(Axis a, int j, const QVar& q) { return make_apply(Gate::rot(a, j), {q}); }

TEST(Differentiate, TrivialStatementsAbort) {
  const DiffResult d = differentiate(make_skip({q1}), 1, 1);
  EXPECT_EQ(d.ancilla.name, "A1_1");
  EXPECT_TRUE(structurally_equal(d.transformed, make_abort({d.ancilla, q1})));
  EXPECT_TRUE(structurally_equal(differentiate(make_init(q1), 1, 1).transformed, make_abort({d.ancilla, q1})));
  EXPECT_TRUE(structurally_equal(differentiate(make_abort({q1}), 1, 1).transformed, make_abort({d.ancilla, q1})));
}

TEST(Differentiate, GateNotUsingParameterAborts) {
  const DiffResult d = differentiate(rot(Axis::X, 1, q1), 2, 2);
  EXPECT_TRUE(structurally_equal(d.transformed, make_abort({{"A2_1", 2}, q1})));
  const DiffResult h = differentiate(make_apply(Gate::fixed("H"), {q1}), 1, 1);
  EXPECT_TRUE(h.transformed->is<AbortStmt>());
}

TEST(Differentiate, RotationsBecomeGadgets) {
  const QVar a{"A1_1", 2};
  EXPECT_TRUE(structurally_equal(differentiate(rot(Axis::Y, 1, q1), 1).transformed,
                                 make_apply(Gate::gadget(Axis::Y, 1), {a, q1})));
  const Program zz = make_apply(Gate::rot(Axis::ZZ, 1), {q1, q2});
  EXPECT_TRUE(structurally_equal(differentiate(zz, 1).transformed, make_apply(Gate::gadget(Axis::ZZ, 1), {a, q1, q2})));
}

TEST(Differentiate, SequenceRule) {
  const QVar a{"A1_1", 2};
  const Program rx = rot(Axis::X, 1, q1), ry = rot(Axis::Y, 1, q1);
  const Program expect = make_sum(make_seq(make_apply(Gate::gadget(Axis::X, 1), {a, q1}), ry),
                                  make_seq(rx, make_apply(Gate::gadget(Axis::Y, 1), {a, q1})));
  EXPECT_TRUE(structurally_equal(differentiate(make_seq(rx, ry), 1).transformed, expect));
}

TEST(Differentiate, CaseAndSumRules) {
  const QVar a{"A1_1", 2};
  const Program c = make_case({q1}, Measurement::computational(2), {rot(Axis::X, 1, q1), make_skip({q2})});
  const Program expect = make_case({q1}, Measurement::computational(2),
                                   {make_apply(Gate::gadget(Axis::X, 1), {a, q1}), make_abort({a, q2})});
  EXPECT_TRUE(structurally_equal(differentiate(c, 1).transformed, expect));
  const Program s = make_sum(rot(Axis::Z, 1, q1), make_skip({q1}));
  EXPECT_TRUE(structurally_equal(differentiate(s, 1).transformed,
                                 make_sum(make_apply(Gate::gadget(Axis::Z, 1), {a, q1}), make_abort({a, q1}))));
}

TEST(Differentiate, WhileGoesThroughExpansion) {
  const Program w = make_while(2, {q1}, Measurement::computational(2), rot(Axis::X, 1, q1));
  const DiffResult d = differentiate(w, 1);
  EXPECT_TRUE(structurally_equal(d.transformed, differentiate_with(expand_while(w), 1, d.ancilla)));
  EXPECT_EQ(count_nodes(d.transformed).whiles, 0);
}

TEST(Differentiate, Errors) {
  EXPECT_THROW(differentiate(rot(Axis::X, 1, q1), 0, 1), SemanticError);
  EXPECT_THROW(differentiate(rot(Axis::X, 1, q1), 3, 2), SemanticError);
  EXPECT_THROW(differentiate(rot(Axis::X, 3, q1), 1, 2), SemanticError);
  const QVar a{"A", 2};
  EXPECT_THROW(differentiate(make_apply(Gate::gadget(Axis::X, 1), {a, q1}), 1), SemanticError);
  EXPECT_THROW(differentiate(make_apply(Gate::ctrl_rot(Axis::X, 1), {a, q1}), 1), SemanticError);
  EXPECT_NO_THROW(differentiate(make_apply(Gate::gadget(Axis::X, 1), {a, q1}), 2, 2));
  EXPECT_THROW(differentiate_with(rot(Axis::X, 1, q1), 1, q1), SemanticError);
}

TEST(FreshAncilla, SkipsNamesInUse) {
  const Program p = make_seq(make_skip({{"A1_1", 2}}), rot(Axis::X, 1, q1));
  EXPECT_EQ(fresh_ancilla(p, 1).name, "A1_2");
  EXPECT_EQ(fresh_ancilla(p, 2).name, "A2_1");
}

TEST(Judgement, Examples) {
  const QVar a{"A1_1", 2};
  EXPECT_TRUE(judgement_holds(make_skip({q1}), make_abort({a, q1}), a, 1, 1, 1));
  EXPECT_TRUE(judgement_holds(rot(Axis::X, 1, q1), make_apply(Gate::gadget(Axis::X, 1), {a, q1}), a, 1, 1, 2));
  EXPECT_FALSE(judgement_holds(rot(Axis::X, 1, q1), make_skip({a, q1}), a, 1, 1, 3));
}

TEST(Judgement, RegisterMismatchThrows) {
  const QVar a{"A1_1", 2};
  EXPECT_THROW(check_judgement(rot(Axis::X, 1, q1), make_skip({a, q2}), a, 1, 1), SemanticError);
}

TEST(Judgement, OneProgramServesEveryDraw) {
  const SourceUnit u = parse("case M[q1] = 0 -> Rx(th1)[q1]; Ry(th1)[q1], 1 -> Rz(th1)[q1] end");
  const DiffResult d = differentiate(u.body, 1, 1);
  const JudgementReport r = check_judgement(u.body, d.transformed, d.ancilla, 1, 1);
  EXPECT_TRUE(r.holds) << r.max_error;
  EXPECT_EQ(r.checks, 125);
}

TEST(Soundness, CorpusEveryParameter) {
  int checked = 0;
  for (const auto& g : testing::plain_corpus(50)) {
    for (int j = 1; j <= g.k; ++j) {
      const DiffResult d = differentiate(g.p, j, g.k);
      JudgementConfig cfg;
      cfg.num_pairs = 5;
      cfg.seed = 100 + static_cast<std::uint64_t>(checked);
      const JudgementReport r = check_judgement(g.p, d.transformed, d.ancilla, j, g.k, cfg);
      EXPECT_TRUE(r.holds) << "j=" << j << " err=" << r.max_error << "\n" << print_program(g.p);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Soundness, AdditiveCorpus) {
  for (const auto& g : testing::additive_corpus(30, 8)) {
    const DiffResult d = differentiate(g.p, 1, g.k);
    JudgementConfig cfg;
    cfg.num_pairs = 3;
    const JudgementReport r = check_judgement(g.p, d.transformed, d.ancilla, 1, g.k, cfg);
    EXPECT_TRUE(r.holds) << r.max_error << "\n" << print_program(g.p);
  }
}

TEST(Linearity, InObservableAndState) {
  std::mt19937_64 rng(41);
  for (const auto& g : testing::plain_corpus(20, 5)) {
    const DiffResult d = differentiate(g.p, 1, g.k);
    const Layout v(g.vars);
    const ParamVector th = testing::random_theta(g.k, rng);
    const Observable o1 = random_observable(v.dim(), rng), o2 = random_observable(v.dim(), rng);
    const DensityOperator r1 = random_density(v.dim(), rng), r2 = random_density(v.dim(), rng);
    const double w = 0.3;
    auto f = [&](const Observable& o, const DensityOperator& r) {
      return observable_semantics_ancilla(d.transformed, d.ancilla, v, o, r, th);
    };
    const Observable mix_o(w * o1.matrix() + (1 - w) * o2.matrix());
    const DensityOperator mix_r(w * r1.matrix() + (1 - w) * r2.matrix());
    EXPECT_NEAR(f(mix_o, r1), w * f(o1, r1) + (1 - w) * f(o2, r1), 1e-9);
    EXPECT_NEAR(f(o1, mix_r), w * f(o1, r1) + (1 - w) * f(o1, r2), 1e-9);
  }
}

}  // namespace
}  // namespace qdiff
