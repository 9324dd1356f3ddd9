#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loopaccel/closed_form.hpp"
#include "loopaccel/expr.hpp"
#include "loopaccel/loop.hpp"
#include "loopaccel/solver.hpp"

namespace loopaccel {

class ClosedFormUnavailable : public Error {
 public:
  using Error::Error;
};

enum class Technique {
  MonotonicIncrease,
  MonotonicDecrease,
  EventualDecrease,
  EventualIncrease,
  MeteringFunction,
  Fixpoint,
};

// Title used in traces, e.g. "Conditional Acceleration via Monotonic Increase".
std::string technique_title(Technique t, bool nonterm = false);
// Short machine name, e.g. "monotonic-increase".
std::string technique_id(Technique t);
std::optional<Technique> technique_from_id(const std::string& id);

// One solver call made while checking a premise. Replaying `premise =>
// conclusion` (or satisfiability of `premise` when kind is Sat) reproduces
// the verdict.
struct SolverQuery {
  enum class Kind { Implication, Sat };
  Kind kind = Kind::Implication;
  Formula premise;
  Formula conclusion;
  SolverVerdict verdict;
};

struct ProofStep {
  Technique technique = Technique::MonotonicIncrease;
  Clause clause;
  std::optional<Atom> designated;
  std::vector<SolverQuery> queries;
  Formula added;
  bool exact = false;
  // Set when the step was undone because it made the result unsatisfiable.
  bool discarded = false;
  std::string note;
};

// Outcome of a single technique application.
struct Attempt {
  std::optional<Formula> added;
  bool exact = false;
  std::optional<Atom> designated;
  std::vector<SolverQuery> queries;

  explicit operator bool() const { return added.has_value(); }
};

struct AccelProblem {
  Loop loop;
  ClosedForm cf;
  // x' = a^n(x) as Eq0 atoms.
  Formula bindings;
  // Conditions collected so far.
  Formula psi;
  Formula checked;
  Formula pending;
  bool exact = true;
  std::vector<ProofStep> trace;

  Formula result_formula() const { return conjunction(bindings, psi); }
};

struct AccelConfig {
  std::vector<Technique> priorities{Technique::MonotonicIncrease, Technique::MonotonicDecrease,
                                    Technique::EventualDecrease, Technique::EventualIncrease};
  // Only consulted when MeteringFunction appears in the priority list.
  std::optional<PolyExp> metering_function;
};

struct AccelResult {
  bool success = false;
  Formula formula;     // bindings && conditions
  Formula conditions;  // without the x' bindings
  std::map<Var, PolyExp> bindings;
  bool exact = false;
  std::vector<ProofStep> trace;
  Formula leftover;
  std::optional<ClosedForm> cf;
  std::string failure;
};

// Canonical problem [[x' = a^n(x) | true | guard]]. Throws ClosedFormUnavailable.
AccelProblem canonical_problem(const Loop& loop);

Attempt try_monotonic_increase(SmtClient& smt, const Formula& chi, const Formula& checked, const Loop& loop);
Attempt try_monotonic_decrease(SmtClient& smt, const Formula& chi, const Formula& checked, const Loop& loop,
                               const ClosedForm& cf);
Attempt try_eventual_decrease(SmtClient& smt, const Clause& c, const Formula& checked, const Loop& loop,
                              const ClosedForm& cf);
Attempt try_eventual_increase(SmtClient& smt, const Clause& c, const Formula& checked, const Loop& loop);
Attempt validate_metering(SmtClient& smt, const Loop& loop, const Formula& chi, const Formula& checked,
                          const PolyExp& mf);

// Applies techniques until every guard clause is processed or nothing applies.
// An update without closed form yields a failed result with the whole guard left over.
AccelResult accelerate(const Loop& loop, SmtClient& smt, const AccelConfig& cfg = {});

}  // namespace loopaccel
