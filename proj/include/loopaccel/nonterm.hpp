#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "loopaccel/accel.hpp"

namespace loopaccel {

struct NontermProblem {
  Loop loop;
  Formula psi;
  Formula checked;
  Formula pending;
  std::vector<ProofStep> trace;
};

// Satisfiable formula over the program variables all of whose models diverge.
struct Certificate {
  Formula formula;
  Valuation witness;
  std::vector<ProofStep> trace;
  std::size_t simulated_steps = 0;
};

struct NontermConfig {
  std::vector<Technique> priorities{Technique::MonotonicIncrease, Technique::EventualIncrease,
                                    Technique::Fixpoint};
  std::size_t sim_steps = 1000;
};

struct NontermResult {
  std::optional<Certificate> certificate;
  Formula leftover;
  std::vector<ProofStep> trace;
  std::string failure;

  bool success() const { return certificate.has_value(); }
};

NontermProblem canonical_nonterm_problem(const Loop& loop);

Attempt nt_monotonic_increase(SmtClient& smt, const Formula& chi, const Formula& checked, const Loop& loop);
Attempt nt_eventual_increase(SmtClient& smt, const Clause& c, const Formula& checked, const Loop& loop);

// Every variable that e depends on under any number of updates.
std::set<Var> var_closure(const Loop& loop, const PolyExp& e);

// Tries each atom of c as designated atom; the first candidate that is not
// unsatisfiable together with `context` wins.
Attempt nt_fixpoints(SmtClient& smt, const Clause& c, const Formula& checked, const Loop& loop,
                     const Formula& context = {});

// Rewrites unit equations c*v + d = 0 into v = -d/c and folds constants.
Formula simplify_equalities(const Formula& f);

NontermResult prove_nonterm(const Loop& loop, SmtClient& smt, const NontermConfig& cfg = {});

}  // namespace loopaccel
