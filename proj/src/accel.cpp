#include "loopaccel/accel.hpp"

namespace loopaccel {

std::string technique_title(Technique t, bool nonterm) {
  switch (t) {
    case Technique::MonotonicIncrease:
      return nonterm ? "Non-Termination via Monotonic Increase" : "Conditional Acceleration via Monotonic Increase";
    case Technique::MonotonicDecrease:
      return "Conditional Acceleration via Monotonic Decrease";
    case Technique::EventualDecrease:
      return "Conditional Acceleration via Eventual Decrease";
    case Technique::EventualIncrease:
      return nonterm ? "Non-Termination via Eventual Increase" : "Conditional Acceleration via Eventual Increase";
    case Technique::MeteringFunction:
      return "Conditional Acceleration via Metering Functions";
    case Technique::Fixpoint:
      return "Non-Termination via Fixpoints";
  }
  return "?";
}

std::string technique_id(Technique t) {
  switch (t) {
    case Technique::MonotonicIncrease:
      return "monotonic-increase";
    case Technique::MonotonicDecrease:
      return "monotonic-decrease";
    case Technique::EventualDecrease:
      return "eventual-decrease";
    case Technique::EventualIncrease:
      return "eventual-increase";
    case Technique::MeteringFunction:
      return "metering-function";
    case Technique::Fixpoint:
      return "fixpoint";
  }
  return "?";
}

std::optional<Technique> technique_from_id(const std::string& id) {
  for (auto t : {Technique::MonotonicIncrease, Technique::MonotonicDecrease, Technique::EventualDecrease,
                 Technique::EventualIncrease, Technique::MeteringFunction, Technique::Fixpoint}) {
    if (technique_id(t) == id) return t;
  }
  return std::nullopt;
}

namespace {

bool implies(SmtClient& smt, Attempt& att, const Formula& premise, const Formula& conclusion) {
  SolverQuery q{SolverQuery::Kind::Implication, premise, conclusion, smt.check_implication(premise, conclusion)};
  bool ok = q.verdict.is_proved();
  att.queries.push_back(std::move(q));
  return ok;
}

Formula single(const Atom& a) { return Formula::of_atoms({a}); }

}  // namespace

AccelProblem canonical_problem(const Loop& loop) {
  AccelProblem p{loop, {}, {}, {}, {}, loop.guard, true, {}};
  try {
    p.cf = solve_closed_form(loop);
  } catch (const NonTriangular& e) {
    throw ClosedFormUnavailable(e.what());
  } catch (const UnsupportedRecurrence& e) {
    throw ClosedFormUnavailable(e.what());
  }
  for (const auto& v : loop.vars) p.bindings.add(Atom::eq0(PolyExp(v.primed()) - p.cf.of(v)));
  return p;
}

Attempt try_monotonic_increase(SmtClient& smt, const Formula& chi, const Formula& checked, const Loop& loop) {
  Attempt att;
  Formula next = apply_update(chi, loop.update, 1);
  if (implies(smt, att, conjunction(checked, chi), next)) {
    att.added = chi;
    att.exact = true;
  }
  return att;
}

Attempt try_monotonic_decrease(SmtClient& smt, const Formula& chi, const Formula& checked, const Loop& loop,
                               const ClosedForm& cf) {
  Attempt att;
  Formula next = apply_update(chi, loop.update, 1);
  if (implies(smt, att, conjunction(checked, next), chi)) {
    att.added = chi.subst(cf.shifted(-1));
    att.exact = true;
  }
  return att;
}

Attempt try_eventual_decrease(SmtClient& smt, const Clause& c, const Formula& checked, const Loop& loop,
                              const ClosedForm& cf) {
  Attempt att;
  auto prev = cf.shifted(-1);
  for (const auto& a : c.atoms()) {
    if (a.kind() != Atom::Kind::Gt0) continue;
    PolyExp e0 = a.lhs();
    PolyExp e1 = apply_update(e0, loop.update, 1);
    PolyExp e2 = apply_update(e0, loop.update, 2);
    Formula premise = checked;
    premise.add(Atom::ge(e0, e1));
    if (implies(smt, att, premise, single(Atom::ge(e1, e2)))) {
      att.added = Formula::of_atoms({a, Atom::gt0(e0.subst(prev))});
      att.exact = c.size() == 1;
      att.designated = a;
      return att;
    }
  }
  return att;
}

Attempt try_eventual_increase(SmtClient& smt, const Clause& c, const Formula& checked, const Loop& loop) {
  Attempt att;
  for (const auto& a : c.atoms()) {
    if (a.kind() != Atom::Kind::Gt0) continue;
    PolyExp e0 = a.lhs();
    PolyExp e1 = apply_update(e0, loop.update, 1);
    PolyExp e2 = apply_update(e0, loop.update, 2);
    Formula premise = checked;
    premise.add(Atom::le(e0, e1));
    if (implies(smt, att, premise, single(Atom::le(e1, e2)))) {
      att.added = Formula::of_atoms({a, Atom::le(e0, e1)}).folded();
      att.exact = false;
      att.designated = a;
      return att;
    }
  }
  return att;
}

Attempt validate_metering(SmtClient& smt, const Loop& loop, const Formula& chi, const Formula& checked,
                          const PolyExp& mf) {
  Attempt att;
  PolyExp mf_next = apply_update(mf, loop.update, 1);
  // mf(x) - mf(a(x)) <= 1 under the guard part.
  if (!implies(smt, att, conjunction(checked, chi), single(Atom::le(mf - mf_next, PolyExp(1L))))) return att;
  // mf(x) <= 0 wherever chi fails, one clause of chi at a time.
  for (const auto& c : chi.clauses()) {
    Formula premise = checked;
    for (const auto& a : c.atoms()) premise.add(Clause(a.negation()));
    if (!implies(smt, att, premise, single(Atom::le(mf, PolyExp(0L))))) return att;
  }
  att.added = single(Atom::gt0(mf - PolyExp(kCounter) + PolyExp(1L)));
  att.exact = false;
  return att;
}

namespace {

Attempt run_technique(SmtClient& smt, Technique t, const Clause& c, const AccelProblem& p,
                      const AccelConfig& cfg) {
  Formula chi{c};
  switch (t) {
    case Technique::MonotonicIncrease:
      return try_monotonic_increase(smt, chi, p.checked, p.loop);
    case Technique::MonotonicDecrease:
      return try_monotonic_decrease(smt, chi, p.checked, p.loop, p.cf);
    case Technique::EventualDecrease:
      return try_eventual_decrease(smt, c, p.checked, p.loop, p.cf);
    case Technique::EventualIncrease:
      return try_eventual_increase(smt, c, p.checked, p.loop);
    case Technique::MeteringFunction:
      if (!cfg.metering_function) return {};
      return validate_metering(smt, p.loop, chi, p.checked, *cfg.metering_function);
    case Technique::Fixpoint:
      return {};
  }
  return {};
}

}  // namespace

AccelResult accelerate(const Loop& loop, SmtClient& smt, const AccelConfig& cfg) {
  AccelResult res;
  AccelProblem p;
  try {
    p = canonical_problem(loop);
  } catch (const ClosedFormUnavailable& e) {
    res.leftover = loop.guard;
    res.failure = std::string("no closed form: ") + e.what();
    return res;
  }

  // Technique-major scan: the highest-priority technique that applies to any
  // pending clause wins; restart after every accepted step.
  bool progress = true;
  while (progress && !p.pending.is_top()) {
    progress = false;
    for (Technique t : cfg.priorities) {
      for (const Clause& c : p.pending.clauses()) {
        Attempt att = run_technique(smt, t, c, p, cfg);
        if (!att) continue;
        ProofStep step{t, c, att.designated, std::move(att.queries), *att.added, att.exact, false, {}};
        if (t == Technique::EventualIncrease) {
          Formula candidate = conjunction(p.result_formula(), step.added);
          SolverVerdict sat = smt.check_sat_over_n(candidate);
          step.queries.push_back({SolverQuery::Kind::Sat, candidate, {}, sat});
          if (sat.is_proved()) {
            step.discarded = true;
            step.note = "result unsatisfiable";
            p.trace.push_back(std::move(step));
            continue;
          }
          if (sat.is_unknown()) step.note = "satisfiability unknown (" + sat.reason + ")";
        }
        Clause done = c;
        p.pending.remove(done);
        p.checked.add(done);
        p.psi.add(step.added);
        p.exact = p.exact && step.exact;
        p.trace.push_back(std::move(step));
        progress = true;
        break;
      }
      if (progress) break;
    }
  }

  res.success = p.pending.is_top();
  res.conditions = p.psi.folded();
  res.formula = conjunction(p.bindings, res.conditions);
  for (const auto& v : loop.vars) res.bindings.emplace(v.primed(), p.cf.of(v));
  res.exact = res.success && p.exact;
  res.trace = std::move(p.trace);
  res.leftover = p.pending;
  res.cf = p.cf;
  if (!res.success) res.failure = "no technique applies to the remaining clauses";
  return res;
}

}  // namespace loopaccel
