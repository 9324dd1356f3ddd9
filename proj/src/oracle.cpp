#include "loopaccel/oracle.hpp"

#include <sstream>

namespace loopaccel {

RunTrace run_loop(const Loop& loop, const Valuation& x0, std::size_t max_steps) {
  RunTrace t;
  t.states.push_back(x0);
  while (t.iterations < max_steps && loop.guard_holds(t.states.back())) {
    t.states.push_back(loop.step(t.states.back()));
    ++t.iterations;
  }
  return t;
}

std::vector<Valuation> iterate(const Loop& loop, const Valuation& x0, std::size_t n) {
  std::vector<Valuation> out{x0};
  for (std::size_t i = 0; i < n; ++i) out.push_back(loop.step(out.back()));
  return out;
}

std::vector<Valuation> grid(const std::vector<Var>& vars, std::int64_t box) {
  std::vector<Valuation> out{Valuation{}};
  for (const auto& v : vars) {
    std::vector<Valuation> next;
    for (const auto& partial : out) {
      for (std::int64_t k = -box; k <= box; ++k) {
        Valuation x = partial;
        x[v] = Integer(static_cast<long>(k));
        next.push_back(std::move(x));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::int64_t default_box(std::size_t dimension) { return dimension <= 3 ? 3 : 2; }

namespace {

std::string render_state(const Valuation& s) {
  std::ostringstream out;
  out << "(";
  bool first = true;
  for (const auto& [v, k] : s) {
    out << (first ? "" : ", ") << v.name() << "=" << k.get_str();
    first = false;
  }
  out << ")";
  return out.str();
}

}  // namespace

VerifyReport verify_formula(const Loop& loop, const Formula& psi, const Formula& guard_part, std::int64_t box,
                            std::int64_t max_n, std::size_t max_exemplars) {
  VerifyReport rep;
  rep.kind = "acceleration";
  rep.box = box;
  rep.max_n = max_n;
  for (const auto& x : grid(loop.vars, box)) {
    auto states = iterate(loop, x, static_cast<std::size_t>(max_n));
    bool valid = true;  // guard_part held at steps 0..n-1
    for (std::int64_t n = 1; n <= max_n; ++n) {
      valid = valid && guard_part.holds(states[static_cast<std::size_t>(n - 1)]);
      Valuation env = x;
      env[kCounter] = Integer(static_cast<long>(n));
      for (const auto& v : loop.vars) env[v.primed()] = states[static_cast<std::size_t>(n)].at(v);
      bool holds = psi.holds(env);
      ++rep.checked;
      if (holds && !valid) {
        if (rep.soundness_violations.size() < max_exemplars) {
          rep.soundness_violations.push_back({x, n, "no valid run of length n", "formula holds"});
        }
        ++rep.soundness_count;
      } else if (!holds && valid) {
        if (rep.exactness_violations.size() < max_exemplars) {
          rep.exactness_violations.push_back(
              {x, n, "formula holds", "formula false on valid run to " + render_state(states[n])});
        }
        ++rep.exactness_count;
      }
    }
  }
  return rep;
}

VerifyReport verify_acceleration(const Loop& loop, const AccelResult& result, std::int64_t box,
                                 std::int64_t max_n) {
  // A partial result only approximates the processed part of the guard.
  Formula processed;
  for (const auto& c : loop.guard.clauses()) {
    if (!result.leftover.contains(c)) processed.add(c);
  }
  return verify_formula(loop, result.formula, processed, box, max_n, 5);
}

VerifyReport verify_certificate(const Loop& loop, const Certificate& cert, std::size_t k, SmtClient& smt,
                                std::size_t extra_models) {
  VerifyReport rep;
  rep.kind = "certificate";
  rep.steps = k;
  auto fill = [&](Valuation m) {
    for (const auto& v : loop.vars) m.try_emplace(v, Integer(0));
    return m;
  };
  Valuation witness = fill(cert.witness);
  if (!cert.formula.holds(witness)) throw WitnessRejected("witness does not satisfy the certificate", 0);
  RunTrace t = run_loop(loop, witness, k);
  if (t.iterations < k) {
    throw WitnessRejected("witness " + render_state(witness) + " leaves the guard after " +
                              std::to_string(t.iterations) + " steps",
                          t.iterations);
  }
  std::vector<Valuation> models{witness};
  Formula query = cert.formula;
  auto block = [&](const Valuation& m) {
    Clause differ;
    for (const auto& v : loop.vars) {
      PolyExp d = PolyExp(v) - PolyExp(Rational(m.at(v)));
      differ.add(Atom::gt0(d));
      differ.add(Atom::gt0(-d));
    }
    query.add(differ);
  };
  block(witness);
  while (models.size() < extra_models + 1) {
    SolverVerdict v = smt.check_sat(query);
    if (!v.is_not_proved()) break;
    Valuation m = fill(v.model);
    models.push_back(m);
    block(m);
  }
  for (const auto& m : models) {
    ++rep.checked;
    RunTrace run = run_loop(loop, m, k);
    if (run.iterations < k) {
      ++rep.soundness_count;
      if (rep.soundness_violations.size() < 5) {
        rep.soundness_violations.push_back({m, static_cast<std::int64_t>(run.iterations), "guard true for " +
                                                std::to_string(k) + " steps", "guard false"});
      }
    }
    if (!cert.formula.holds(loop.step(m))) {
      ++rep.recurrence_count;
      if (rep.recurrence_violations.size() < 5) {
        rep.recurrence_violations.push_back({m, 1, "certificate holds after one step", "certificate false"});
      }
    }
  }
  rep.models = models.size();
  return rep;
}

VerifyReport check_closed_form(const Loop& loop, const ClosedForm& cf, std::int64_t box, std::int64_t max_n) {
  VerifyReport rep;
  rep.kind = "closed-form";
  rep.box = box;
  rep.max_n = max_n;
  for (const auto& x : grid(loop.vars, box)) {
    auto states = iterate(loop, x, static_cast<std::size_t>(max_n));
    for (std::int64_t n = 0; n <= max_n; ++n) {
      ++rep.checked;
      Valuation got;
      bool ok = true;
      try {
        got = cf.eval(x, n);
        ok = got == states[static_cast<std::size_t>(n)];
      } catch (const NonIntegerResult&) {
        ok = false;
      }
      if (!ok) {
        ++rep.soundness_count;
        if (rep.soundness_violations.size() < 5) {
          rep.soundness_violations.push_back(
              {x, n, render_state(states[static_cast<std::size_t>(n)]), render_state(got)});
        }
      }
    }
  }
  return rep;
}

}  // namespace loopaccel
