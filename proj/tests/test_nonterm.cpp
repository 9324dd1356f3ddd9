#include <gtest/gtest.h>

#include "support.hpp"

using namespace loopaccel;
using namespace testing_support;

namespace {

class Nonterm : public ::testing::Test {
 protected:
  SmtClient smt;
};

TEST(VarClosure, Examples) {
  EXPECT_EQ(var_closure(corpus_loop("t_fixpoint"), V("x1")), (std::set<Var>{Var("x1"), Var("x2")}));
  EXPECT_EQ(var_closure(parse_loop("vars: x1, x2; guard: x1 > 0; update: x2 := x1"), V("x1")),
            (std::set<Var>{Var("x1")}));
  EXPECT_EQ(var_closure(corpus_loop("nt_four"), V("x4")), (std::set<Var>{Var("x4")}));
  EXPECT_EQ(var_closure(corpus_loop("cubic"), V("x3")), (std::set<Var>{Var("x1"), Var("x2"), Var("x3")}));
  EXPECT_TRUE(var_closure(corpus_loop("t_inc"), Q(4)).empty());
}

TEST(Simplify, UnitEquations) {
  // x4 + 1 > 0 && x4 = -x4 becomes x4 = 0.
  Formula f = conj({Atom::gt0(V("x4") + Q(1)), Atom::eq0(V("x4") * Q(2))});
  EXPECT_EQ(simplify_equalities(f), conj({Atom::eq0(V("x4"))}));
  Formula g = conj({Atom::eq0(V("x") - Q(3)), Atom::gt0(V("y") - V("x"))});
  EXPECT_EQ(simplify_equalities(g), conj({Atom::eq0(V("x") - Q(3)), Atom::gt0(V("y") - Q(3))}));
  EXPECT_TRUE(simplify_equalities(conj({Atom::eq0(V("x") * Q(2) - Q(1))})).is_bottom());
  EXPECT_TRUE(simplify_equalities(conj({Atom::eq0(V("x")), Atom::gt0(V("x"))})).is_bottom());
  // Nonlinear and multi-variable equations are left alone.
  Formula h = conj({Atom::eq0(V("x1") - V("x2")), Atom::gt0(V("x1"))});
  EXPECT_EQ(simplify_equalities(h), h);
}

TEST_F(Nonterm, MonotonicIncrease) {
  EXPECT_EQ(*nt_monotonic_increase(smt, conj({Atom::gt0(V("x"))}), {}, corpus_loop("t_inc")).added,
            conj({Atom::gt0(V("x"))}));
  EXPECT_TRUE(nt_monotonic_increase(smt, conj({Atom::gt0(V("x1"))}), {}, corpus_loop("nt_four")));
  EXPECT_FALSE(nt_monotonic_increase(smt, conj({Atom::gt0(V("x1"))}), {}, corpus_loop("t_fixpoint")));
}

TEST_F(Nonterm, EventualIncrease) {
  EXPECT_EQ(*nt_eventual_increase(smt, Clause{Atom::gt0(V("x1"))}, {}, corpus_loop("t_evinc")).added,
            conj({Atom::gt0(V("x1")), Atom::gt0(V("x2") + Q(1))}));
  Loop four = corpus_loop("nt_four");
  EXPECT_FALSE(nt_eventual_increase(smt, Clause{Atom::gt0(V("x3"))}, {}, four));
  Attempt a = nt_eventual_increase(smt, Clause{Atom::gt0(V("x3"))}, conj({Atom::gt0(V("x1"))}), four);
  ASSERT_TRUE(a);
  EXPECT_EQ(*a.added, conj({Atom::gt0(V("x3")), Atom::gt0(V("x2") + Q(1))}));
  EXPECT_FALSE(nt_eventual_increase(smt, Clause{Atom::gt0(V("x1"))}, {}, corpus_loop("t_fixpoint")));
}

TEST_F(Nonterm, Fixpoints) {
  Attempt a = nt_fixpoints(smt, Clause{Atom::gt0(V("x1"))}, {}, corpus_loop("t_fixpoint"));
  ASSERT_TRUE(a);
  EXPECT_EQ(*a.added, conj({Atom::gt0(V("x1")), Atom::eq0(V("x1") - V("x2"))}));
  Attempt b = nt_fixpoints(smt, Clause{Atom::gt0(V("x4") + Q(1))}, {}, corpus_loop("nt_four"));
  ASSERT_TRUE(b);
  EXPECT_EQ(*b.added, conj({Atom::eq0(V("x4"))}));
  Attempt c = nt_fixpoints(smt, Clause{Atom::gt0(V("x"))}, {}, corpus_loop("t_inc"));
  EXPECT_FALSE(c);
  ASSERT_EQ(c.queries.size(), 1u);
  EXPECT_TRUE(c.queries[0].verdict.is_proved());
}

TEST_F(Nonterm, PaperCertificates) {
  struct Case {
    const char* name;
    std::vector<Atom> cert;
  };
  std::vector<Case> cases{
      {"t_inc", {Atom::gt0(V("x"))}},
      {"t_evinc", {Atom::gt0(V("x1")), Atom::gt0(V("x2") + Q(1))}},
      {"t_fixpoint", {Atom::gt0(V("x1")), Atom::eq0(V("x1") - V("x2"))}},
      {"nt_four", {Atom::gt0(V("x1")), Atom::gt0(V("x2") + Q(1)), Atom::gt0(V("x3")), Atom::eq0(V("x4"))}},
  };
  for (const auto& c : cases) {
    Loop l = corpus_loop(c.name);
    NontermResult r = prove_nonterm(l, smt);
    ASSERT_TRUE(r.success()) << c.name << ": " << r.failure;
    EXPECT_EQ(r.certificate->formula, Formula::of_atoms(c.cert)) << c.name << ": " << r.certificate->formula.to_string();
    EXPECT_TRUE(r.certificate->formula.holds(r.certificate->witness));
    EXPECT_EQ(r.certificate->simulated_steps, 1000u);
    EXPECT_TRUE(r.leftover.is_top());
    for (const auto& s : r.trace) {
      EXPECT_FALSE(s.added.mentions(kCounter));
      for (const auto& v : l.vars) EXPECT_FALSE(s.added.mentions(v.primed()));
    }
  }
}

TEST_F(Nonterm, NonlinearLoop) {
  Loop l = corpus_loop("nl_squares");
  NontermResult r = prove_nonterm(l, smt);
  ASSERT_TRUE(r.success()) << r.failure;
  EXPECT_TRUE(smt.check_sat(r.certificate->formula).is_not_proved());
  EXPECT_EQ(run_loop(l, r.certificate->witness, 1000).iterations, 1000u);
}

TEST_F(Nonterm, TerminatingLoopsFail) {
  for (const char* name : {"t_nondec", "t_exp", "t_evdec", "t_2invs", "cubic"}) {
    NontermResult r = prove_nonterm(corpus_loop(name), smt);
    EXPECT_FALSE(r.success()) << name;
    EXPECT_FALSE(r.leftover.is_top()) << name;
    EXPECT_FALSE(r.failure.empty());
  }
}

TEST_F(Nonterm, NoClosedFormNeeded) {
  // The rotation has no triangular closed form; a fixpoint still applies when the guard allows it.
  Loop l = parse_loop("vars: x, y; guard: x + y > 0; update: x := y; y := x");
  NontermResult r = prove_nonterm(l, smt);
  ASSERT_TRUE(r.success()) << r.failure;
  EXPECT_EQ(run_loop(l, r.certificate->witness, 1000).iterations, 1000u);
}

TEST_F(Nonterm, DisablingMonotonicIncreaseKeepsVerdicts) {
  NontermConfig no_mi;
  no_mi.priorities = {Technique::EventualIncrease, Technique::Fixpoint};
  for (const char* name : {"t_inc", "t_evinc", "t_fixpoint", "nt_four", "nl_squares", "t_nondec", "t_exp"}) {
    Loop l = corpus_loop(name);
    EXPECT_EQ(prove_nonterm(l, smt).success(), prove_nonterm(l, smt, no_mi).success()) << name;
  }
}

TEST_F(Nonterm, SimulationLength) {
  NontermConfig cfg;
  cfg.sim_steps = 25;
  NontermResult r = prove_nonterm(corpus_loop("t_inc"), smt, cfg);
  ASSERT_TRUE(r.success());
  EXPECT_EQ(r.certificate->simulated_steps, 25u);
}

}  // namespace
