#include <gtest/gtest.h>

#include "support.hpp"

using namespace loopaccel;
using namespace testing_support;

namespace {

TEST(Parse, Increment) {
  Loop l = parse_loop("vars: x; guard: x > 0; update: x := x + 1");
  ASSERT_EQ(l.vars.size(), 1u);
  EXPECT_EQ(l.guard, conj({Atom::gt0(V("x"))}));
  EXPECT_EQ(l.update.of(Var("x")), V("x") + Q(1));
}

TEST(Parse, NonDec) {
  Loop l = parse_loop("vars: x1,x2; guard: x1 > 0 && x2 > 0; update: x1 := x1 - 1; x2 := x2 + 1");
  EXPECT_EQ(l.guard, conj({Atom::gt0(V("x1")), Atom::gt0(V("x2"))}));
  EXPECT_EQ(l.update.of(Var("x1")), V("x1") - Q(1));
  EXPECT_EQ(l.update.of(Var("x2")), V("x2") + Q(1));
}

TEST(Parse, RelationsNormalize) {
  auto guard_of = [](const std::string& g) {
    return parse_loop("vars: x, y; guard: " + g + "; update: x := x").guard;
  };
  EXPECT_EQ(guard_of("x >= 0"), conj({Atom::gt0(V("x") + Q(1))}));
  EXPECT_EQ(guard_of("x < y"), conj({Atom::gt0(V("y") - V("x"))}));
  EXPECT_EQ(guard_of("x <= 2"), conj({Atom::gt0(Q(3) - V("x"))}));
  EXPECT_EQ(guard_of("x == y"), conj({Atom::gt0(V("x") - V("y") + Q(1)), Atom::gt0(V("y") - V("x") + Q(1))}));
  EXPECT_EQ(guard_of("true"), Formula());
}

TEST(Parse, ClauseGroupsAndEqualityDistribution) {
  Loop l = parse_loop("vars: x, y; guard: (x > 0 || y == 1) && y > 0; update: x := x");
  Formula expected{Clause{Atom::gt0(V("x")), Atom::gt0(V("y"))},
                   Clause{Atom::gt0(V("x")), Atom::gt0(Q(2) - V("y"))}, Clause{Atom::gt0(V("y"))}};
  EXPECT_EQ(l.guard, expected);
  // A parenthesized polynomial on the left is not a clause group.
  Loop p = parse_loop("vars: x, y; guard: (x + y) * 2 > 0; update: x := x");
  EXPECT_EQ(p.guard, conj({Atom::gt0(V("x") * Q(2) + V("y") * Q(2))}));
}

TEST(Parse, CommentsPowersAndMissingAssignments) {
  Loop l = parse_loop("# header\nvars: x, x1;  # two\nguard: x > 9 && x1 >= 0;\nupdate: x := x1^2 + 2*x1 + 1;\n");
  EXPECT_EQ(l.update.of(Var("x")), V("x1") * V("x1") + Q(2) * V("x1") + Q(1));
  EXPECT_EQ(l.update.of(Var("x1")), V("x1"));
  EXPECT_EQ(parse_loop("vars: x; guard: x > 0; update: x := -(x - 3)^2;").update.of(Var("x")),
            Q(0) - (V("x") - Q(3)).pow(2));
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_loop("vars: x; guard: x > 0 update: x := x"), SyntaxError);
  try {
    parse_loop("vars: x;\nguard: x >> 0;\nupdate: x := x");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_loop("vars: x; guard: y > 0; update: x := x"), UndeclaredVariable);
  EXPECT_THROW(parse_loop("vars: x; guard: x > 0; update: y := x"), UndeclaredVariable);
  EXPECT_THROW(parse_loop("vars: x; guard: x > 0; update: x := x / 2"), NonPolynomialUpdate);
  EXPECT_THROW(parse_loop("vars: x; guard: x > 0; update: x := 2^x"), NonPolynomialUpdate);
  EXPECT_THROW(parse_loop("vars: n; guard: n > 0; update: n := n"), DisallowedConstruct);
  EXPECT_THROW(parse_loop("vars: x; guard: forall x > 0; update: x := x"), DisallowedConstruct);
  EXPECT_THROW(parse_loop("vars: x; guard: x != 0; update: x := x"), DisallowedConstruct);
  EXPECT_THROW(parse_loop("vars: x, x; guard: x > 0; update: x := x"), DisallowedConstruct);
  EXPECT_THROW(parse_loop("vars: x; guard: x > 0; update: x := x; x := 1"), DisallowedConstruct);
  EXPECT_THROW(parse_loop("vars: x; guard: x > 0 || x < 0; update: x := x"), SyntaxError);
}

TEST(Render, RoundTripOnCorpus) {
  for (const char* name : {"t_exp", "t_nondec", "t_inc", "t_2invs", "t_2cinvs", "t_evdec", "t_evinc",
                           "phases_variant", "phases2_variant", "t_fixpoint", "nt_four", "nl_squares", "cubic",
                           "ev_mon", "rotation"}) {
    Loop l = corpus_loop(name);
    Loop again = parse_loop(render_loop(l));
    EXPECT_EQ(again.vars, l.vars) << name;
    EXPECT_EQ(again.guard, l.guard) << name;
    for (const auto& v : l.vars) EXPECT_EQ(again.update.of(v), l.update.of(v)) << name;
    EXPECT_EQ(render_loop(again), render_loop(l)) << name;
  }
}

TEST(Render, RoundTripWithDisjunction) {
  Loop l = parse_loop("vars: a, b; guard: (a > 0 || b >= 3) && a*b < 7; update: a := a - b^2; b := 3 - a");
  Loop again = parse_loop(render_loop(l));
  EXPECT_EQ(again.guard, l.guard);
}

TEST(ApplyUpdate, Examples) {
  Loop nondec = corpus_loop("t_nondec");
  EXPECT_EQ(apply_update(conj({Atom::gt0(V("x1"))}), nondec.update, 1), conj({Atom::gt0(V("x1") - Q(1))}));
  Formula phi = conj({Atom::gt0(V("x1")), Atom::gt0(V("x2") - Q(3))});
  EXPECT_EQ(apply_update(phi, nondec.update, 0), phi);
  Loop evinc = corpus_loop("t_evinc");
  EXPECT_EQ(apply_update(V("x1"), evinc.update, 2), V("x1") + Q(2) * V("x2") + Q(1));
}

TEST(ApplyUpdate, CompositionProperty) {
  std::mt19937 rng(17);
  for (const char* name : {"t_2cinvs", "nl_squares", "nt_four", "rotation"}) {
    Loop l = corpus_loop(name);
    PolyExp e = random_poly(rng, l.vars, 2);
    for (unsigned j = 0; j <= 2; ++j) {
      for (unsigned k = 0; k <= 2; ++k) {
        PolyExp lhs = apply_update(apply_update(e, l.update, k), l.update, j);
        PolyExp rhs = apply_update(e, l.update, j + k);
        EXPECT_EQ(lhs, rhs);
        for (int s = 0; s < 5; ++s) {
          Valuation env = random_env(rng, l.vars, -3, 3);
          EXPECT_EQ(lhs.eval(env), rhs.eval(env));
        }
      }
    }
  }
}

TEST(Loop, StepMatchesUpdate) {
  Loop l = corpus_loop("t_2cinvs");
  Valuation s{{Var("x1"), 3}, {Var("x2"), 1}, {Var("x3"), 5}};
  Valuation t = l.step(s);
  EXPECT_EQ(t.at(Var("x1")), 2);
  EXPECT_EQ(t.at(Var("x2")), 4);
  EXPECT_EQ(t.at(Var("x3")), 4);
}

}  // namespace
