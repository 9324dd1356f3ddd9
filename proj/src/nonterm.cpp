#include "loopaccel/nonterm.hpp"

namespace loopaccel {

NontermProblem canonical_nonterm_problem(const Loop& loop) { return {loop, {}, {}, loop.guard, {}}; }

Attempt nt_monotonic_increase(SmtClient& smt, const Formula& chi, const Formula& checked, const Loop& loop) {
  return try_monotonic_increase(smt, chi, checked, loop);
}

Attempt nt_eventual_increase(SmtClient& smt, const Clause& c, const Formula& checked, const Loop& loop) {
  return try_eventual_increase(smt, c, checked, loop);
}

std::set<Var> var_closure(const Loop& loop, const PolyExp& e) {
  std::set<Var> out = e.vars();
  out.erase(kCounter);
  while (true) {
    std::set<Var> next = out;
    for (const auto& v : out) {
      for (const auto& w : loop.update.of(v).vars()) next.insert(w);
    }
    if (next.size() == out.size()) return out;
    out = std::move(next);
  }
}

namespace {

// c*v + d with integers c != 0, d; nullopt otherwise.
std::optional<std::pair<Var, Rational>> unit_solution(const Atom& a) {
  if (a.kind() != Atom::Kind::Eq0 || a.lhs().has_exponential()) return std::nullopt;
  auto vars = a.lhs().vars();
  if (vars.size() != 1 || a.lhs().total_degree() != 1) return std::nullopt;
  const Var& v = *vars.begin();
  auto parts = a.lhs().coefficients_in(v);
  return std::make_pair(v, -parts[0].constant_value() / parts[1].constant_value());
}

}  // namespace

Formula simplify_equalities(const Formula& f) {
  Formula cur = f.folded();
  std::set<Var> done;
  while (!cur.is_bottom()) {
    std::optional<std::pair<Var, Rational>> sol;
    Clause unit;
    for (const auto& c : cur.clauses()) {
      if (c.size() != 1) continue;
      auto s = unit_solution(c.atoms()[0]);
      if (s && !done.count(s->first)) {
        sol = s;
        unit = c;
        break;
      }
    }
    if (!sol) break;
    auto [v, value] = *sol;
    done.insert(v);
    // Over the integers a fractional solution leaves nothing.
    if (value.get_den() != 1) return Formula::bottom();
    std::map<Var, PolyExp> sigma{{v, PolyExp(value)}};
    Formula next;
    for (const auto& c : cur.clauses()) next.add(c == unit ? c : c.map([&](const Atom& a) { return a.subst(sigma); }));
    cur = next.folded();
  }
  return cur;
}

Attempt nt_fixpoints(SmtClient& smt, const Clause& c, const Formula& checked, const Loop& loop,
                     const Formula& context) {
  (void)checked;
  Attempt att;
  for (const auto& a : c.atoms()) {
    if (a.kind() != Atom::Kind::Gt0) continue;
    Formula added{Clause{a}};
    for (const auto& v : var_closure(loop, a.lhs())) added.add(Atom::eq0(PolyExp(v) - loop.update.of(v)));
    added = simplify_equalities(added);
    Formula candidate = conjunction(context, added);
    SolverVerdict sat = smt.check_sat(candidate);
    att.queries.push_back({SolverQuery::Kind::Sat, candidate, {}, sat});
    if (sat.is_proved()) continue;
    att.added = added;
    att.designated = a;
    return att;
  }
  return att;
}

namespace {

Attempt run_nt(SmtClient& smt, Technique t, const Clause& c, const NontermProblem& p) {
  switch (t) {
    case Technique::MonotonicIncrease:
      return nt_monotonic_increase(smt, Formula{c}, p.checked, p.loop);
    case Technique::EventualIncrease:
      return nt_eventual_increase(smt, c, p.checked, p.loop);
    case Technique::Fixpoint:
      return nt_fixpoints(smt, c, p.checked, p.loop, p.psi);
    default:
      return {};
  }
}

std::size_t simulate(const Loop& loop, Valuation state, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    if (!loop.guard_holds(state)) return i;
    state = loop.step(state);
  }
  return k;
}

}  // namespace

NontermResult prove_nonterm(const Loop& loop, SmtClient& smt, const NontermConfig& cfg) {
  NontermProblem p = canonical_nonterm_problem(loop);
  NontermResult res;
  std::optional<SolverVerdict> last_sat;

  bool progress = true;
  while (progress && !p.pending.is_top()) {
    progress = false;
    for (Technique t : cfg.priorities) {
      for (const Clause& c : p.pending.clauses()) {
        Attempt att = run_nt(smt, t, c, p);
        if (!att) continue;
        Formula added = simplify_equalities(*att.added);
        ProofStep step{t, c, att.designated, std::move(att.queries), added, false, false, {}};
        Formula candidate = conjunction(p.psi, added).folded();
        SolverVerdict sat = smt.check_sat(candidate);
        step.queries.push_back({SolverQuery::Kind::Sat, candidate, {}, sat});
        if (sat.is_proved()) {
          step.discarded = true;
          step.note = "result unsatisfiable";
          p.trace.push_back(std::move(step));
          continue;
        }
        if (sat.is_unknown()) step.note = "satisfiability unknown (" + sat.reason + ")";
        last_sat = sat;
        Clause done = c;
        p.pending.remove(done);
        p.checked.add(done);
        p.psi = candidate;
        p.trace.push_back(std::move(step));
        progress = true;
        break;
      }
      if (progress) break;
    }
  }

  res.trace = p.trace;
  res.leftover = p.pending;
  if (!p.pending.is_top()) {
    res.failure = "no technique applies to the remaining clauses";
    return res;
  }
  SolverVerdict model = last_sat && last_sat->is_not_proved() ? *last_sat : smt.check_sat(p.psi);
  if (!model.is_not_proved()) {
    res.failure = model.is_proved() ? "certificate is unsatisfiable" : "satisfiability of the certificate unknown";
    return res;
  }
  Certificate cert{p.psi, model.model, p.trace, 0};
  for (const auto& v : loop.vars) cert.witness.try_emplace(v, Integer(0));
  cert.simulated_steps = simulate(loop, cert.witness, cfg.sim_steps);
  res.certificate = std::move(cert);
  return res;
}

}  // namespace loopaccel
