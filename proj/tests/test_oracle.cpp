#include <gtest/gtest.h>

#include "support.hpp"

using namespace loopaccel;
using namespace testing_support;

namespace {

Valuation state(std::initializer_list<std::pair<const char*, long>> xs) {
  Valuation out;
  for (const auto& [v, k] : xs) out[Var(v)] = Integer(k);
  return out;
}

TEST(RunLoop, Examples) {
  RunTrace a = run_loop(corpus_loop("t_nondec"), state({{"x1", 3}, {"x2", 1}}), 100);
  EXPECT_EQ(a.iterations, 3u);
  EXPECT_EQ(a.final_state(), state({{"x1", 0}, {"x2", 4}}));
  EXPECT_EQ(run_loop(corpus_loop("t_inc"), state({{"x", 0}}), 100).iterations, 0u);
  RunTrace c = run_loop(corpus_loop("t_exp"), state({{"x1", 2}, {"x2", 1}}), 100);
  EXPECT_EQ(c.iterations, 2u);
  EXPECT_EQ(c.final_state(), state({{"x1", 0}, {"x2", 4}}));
  ASSERT_EQ(c.states.size(), 3u);
  EXPECT_EQ(c.states[1], state({{"x1", 1}, {"x2", 2}}));
}

TEST(RunLoop, StopsAtBound) {
  RunTrace t = run_loop(corpus_loop("t_inc"), state({{"x", 1}}), 7);
  EXPECT_EQ(t.iterations, 7u);
  EXPECT_EQ(t.final_state(), state({{"x", 8}}));
}

TEST(RunLoop, BigIntegers) {
  // 2^200 needs exact arithmetic.
  RunTrace t = run_loop(corpus_loop("t_exp"), state({{"x1", 200}, {"x2", 1}}), 1000);
  EXPECT_EQ(t.iterations, 200u);
  Integer big = 1;
  big <<= 200;
  EXPECT_EQ(t.final_state().at(Var("x2")), big);
}

TEST(Grid, Size) {
  EXPECT_EQ(grid({Var("a"), Var("b")}, 3).size(), 49u);
  EXPECT_EQ(grid({}, 3).size(), 1u);
  EXPECT_EQ(default_box(3), 3);
  EXPECT_EQ(default_box(4), 2);
}

class Oracle : public ::testing::Test {
 protected:
  SmtClient smt;
};

TEST_F(Oracle, NonDecIsExact) {
  Loop l = corpus_loop("t_nondec");
  VerifyReport rep = verify_acceleration(l, accelerate(l, smt), 3, 8);
  EXPECT_EQ(rep.soundness_count, 0u);
  EXPECT_EQ(rep.exactness_count, 0u);
  EXPECT_EQ(rep.checked, 49u * 8u);
}

TEST_F(Oracle, EvIncCoverageGap) {
  Loop l = corpus_loop("t_evinc");
  VerifyReport rep = verify_formula(l, accelerate(l, smt).formula, l.guard, 3, 10, 1000);
  EXPECT_EQ(rep.soundness_count, 0u);
  ASSERT_GT(rep.exactness_count, 0u);
  for (const auto& v : rep.exactness_violations) EXPECT_LT(v.x.at(Var("x2")), 0);
}

TEST_F(Oracle, BottomIsTriviallySound) {
  Loop l = corpus_loop("t_nondec");
  VerifyReport rep = verify_formula(l, Formula::bottom(), l.guard, 3, 5);
  EXPECT_EQ(rep.soundness_count, 0u);
  EXPECT_GT(rep.exactness_count, 0u);
}

TEST_F(Oracle, DetectsUnsoundFormula) {
  // Claims every run of t_exp of any length is valid.
  Loop l = corpus_loop("t_exp");
  AccelProblem p = canonical_problem(l);
  VerifyReport rep = verify_formula(l, p.bindings, l.guard, 2, 4);
  EXPECT_GT(rep.soundness_count, 0u);
  EXPECT_LE(rep.soundness_violations.size(), 5u);
}

TEST_F(Oracle, PartialResultUsesProcessedGuard) {
  Loop l = corpus_loop("cubic");
  AccelResult r = accelerate(l, smt);
  ASSERT_FALSE(r.success);
  EXPECT_EQ(verify_acceleration(l, r, 2, 6).soundness_count, 0u);
}

TEST_F(Oracle, Certificates) {
  struct Case {
    const char* name;
    Formula cert;
    Valuation witness;
  };
  std::vector<Case> cases{
      {"t_inc", conj({Atom::gt0(V("x"))}), state({{"x", 1}})},
      {"t_fixpoint", conj({Atom::gt0(V("x1")), Atom::eq0(V("x1") - V("x2"))}), state({{"x1", 1}, {"x2", 1}})},
      {"t_evinc", conj({Atom::gt0(V("x1")), Atom::gt0(V("x2") + Q(1))}), state({{"x1", 1}, {"x2", 0}})},
  };
  for (const auto& c : cases) {
    Certificate cert{c.cert, c.witness, {}, 0};
    VerifyReport rep = verify_certificate(corpus_loop(c.name), cert, 1000, smt);
    EXPECT_EQ(rep.soundness_count, 0u) << c.name;
    EXPECT_EQ(rep.recurrence_count, 0u) << c.name;
    EXPECT_EQ(rep.models, 11u) << c.name;
  }
}

TEST_F(Oracle, BadWitnessIsRejected) {
  Certificate cert{conj({Atom::gt0(V("x1"))}), state({{"x1", 3}, {"x2", 1}}), {}, 0};
  try {
    verify_certificate(corpus_loop("t_nondec"), cert, 1000, smt);
    FAIL();
  } catch (const WitnessRejected& e) {
    EXPECT_EQ(e.step(), 3u);
  }
}

TEST_F(Oracle, SampledModelsCanFail) {
  // x > 0 is no certificate for a countdown, but a large witness survives the simulation.
  Loop l = parse_loop("vars: x; guard: x > 0; update: x := x - 1");
  Certificate cert{conj({Atom::gt0(V("x"))}), state({{"x", 5000}}), {}, 0};
  VerifyReport rep = verify_certificate(l, cert, 1000, smt, 5);
  EXPECT_EQ(rep.models, 6u);
  EXPECT_GT(rep.soundness_count, 0u);
}

}  // namespace
