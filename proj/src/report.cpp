#include "loopaccel/report.hpp"

#include <sstream>

namespace loopaccel {

using json = nlohmann::ordered_json;

namespace {

json verdict_json(const SolverVerdict& v) {
  json j;
  switch (v.kind) {
    case SolverVerdict::Kind::Proved:
      j["verdict"] = "proved";
      break;
    case SolverVerdict::Kind::NotProved:
      j["verdict"] = "not-proved";
      j["model"] = to_json(v.model);
      break;
    case SolverVerdict::Kind::Unknown:
      j["verdict"] = "unknown";
      j["reason"] = v.reason;
      break;
  }
  return j;
}

std::string state_text(const Valuation& v) {
  std::string out;
  for (const auto& [var, k] : v) out += (out.empty() ? "" : ", ") + var.name() + "=" + k.get_str();
  return out.empty() ? "(any)" : out;
}

json violations_json(const std::vector<Violation>& vs) {
  json arr = json::array();
  for (const auto& v : vs) {
    arr.push_back({{"x", to_json(v.x)}, {"n", v.n}, {"expected", v.expected}, {"got", v.got}});
  }
  return arr;
}

}  // namespace

json to_json(const Valuation& v) {
  json j = json::object();
  for (const auto& [var, k] : v) {
    if (k.fits_slong_p()) {
      j[var.name()] = k.get_si();
    } else {
      j[var.name()] = k.get_str();
    }
  }
  return j;
}

json to_json(const Formula& f) {
  json arr = json::array();
  for (const auto& c : f.clauses()) arr.push_back(c.to_string());
  return arr;
}

json to_json(const ProofStep& s, bool with_queries, bool nonterm) {
  json j{{"technique", technique_id(s.technique)},
         {"title", technique_title(s.technique, nonterm)},
         {"clause", s.clause.to_string()},
         {"designated", s.designated ? json(s.designated->to_string()) : json(nullptr)},
         {"added", to_json(s.added)},
         {"discarded", s.discarded}};
  if (!nonterm) j["exact"] = s.exact;
  if (!s.note.empty()) j["note"] = s.note;
  if (with_queries) {
    json qs = json::array();
    for (const auto& q : s.queries) {
      json jq{{"kind", q.kind == SolverQuery::Kind::Implication ? "implication" : "sat"},
              {"premise", q.premise.to_string()}};
      if (q.kind == SolverQuery::Kind::Implication) jq["conclusion"] = q.conclusion.to_string();
      json verdict = verdict_json(q.verdict);
      for (const auto& [k, v] : verdict.items()) jq[k] = v;
      qs.push_back(jq);
    }
    j["queries"] = qs;
  }
  return j;
}

json to_json(const AccelResult& r, bool with_queries) {
  json bindings = json::object();
  for (const auto& [v, e] : r.bindings) bindings[v.name()] = e.to_string();
  json trace = json::array();
  for (const auto& s : r.trace) trace.push_back(to_json(s, with_queries, false));
  return {{"status", r.success ? "accelerated" : "failed"},
          {"exact", r.exact},
          {"formula", r.formula.to_string()},
          {"conditions", to_json(r.conditions)},
          {"bindings", bindings},
          {"leftover", to_json(r.leftover)},
          {"failure", r.success ? json(nullptr) : json(r.failure)},
          {"trace", trace}};
}

json to_json(const NontermResult& r, bool with_queries) {
  json trace = json::array();
  for (const auto& s : r.trace) trace.push_back(to_json(s, with_queries, true));
  json j{{"status", r.success() ? "certificate" : "failed"}, {"leftover", to_json(r.leftover)}};
  if (r.success()) {
    const auto& c = *r.certificate;
    j["certificate"] = {{"formula", c.formula.to_string()},
                        {"clauses", to_json(c.formula)},
                        {"witness", to_json(c.witness)},
                        {"trace", trace},
                        {"simulated_steps", c.simulated_steps}};
    j["failure"] = nullptr;
  } else {
    j["failure"] = r.failure;
    j["trace"] = trace;
  }
  return j;
}

json to_json(const VerifyReport& r) {
  json j{{"kind", r.kind},
         {"checked", r.checked},
         {"soundness_violations", r.soundness_count},
         {"exactness_violations", r.exactness_count},
         {"soundness_exemplars", violations_json(r.soundness_violations)},
         {"exactness_exemplars", violations_json(r.exactness_violations)}};
  if (r.kind == "certificate") {
    j["steps"] = r.steps;
    j["models"] = r.models;
    j["recurrence_violations"] = r.recurrence_count;
    j["recurrence_exemplars"] = violations_json(r.recurrence_violations);
  } else {
    j["box"] = r.box;
    j["max_n"] = r.max_n;
  }
  return j;
}

json loop_json(const Loop& loop) {
  json vars = json::array();
  json update = json::object();
  for (const auto& v : loop.vars) {
    vars.push_back(v.name());
    update[v.name()] = loop.update.of(v).to_string();
  }
  return {{"vars", vars}, {"guard", loop.guard.to_string()}, {"update", update}};
}

std::string render_step(const ProofStep& s, bool nonterm) {
  std::ostringstream out;
  out << technique_title(s.technique, nonterm) << " on " << s.clause.to_string();
  if (s.designated && s.clause.size() > 1) out << " [designated " << s.designated->to_string() << "]";
  out << ": " << (s.discarded ? "discarded " : "added ") << s.added.to_string();
  if (!s.note.empty()) out << " (" << s.note << ")";
  return out.str();
}

namespace {

void trace_text(std::ostringstream& out, const std::vector<ProofStep>& trace, bool nonterm) {
  out << "trace:\n";
  std::size_t i = 1;
  for (const auto& s : trace) {
    out << "  " << i++ << ". " << render_step(s, nonterm) << "\n";
    for (const auto& q : s.queries) {
      if (q.kind == SolverQuery::Kind::Implication) {
        out << "       " << q.premise.to_string() << "  ==>  " << q.conclusion.to_string() << ": "
            << q.verdict.to_string() << "\n";
      } else {
        out << "       sat? " << q.premise.to_string() << ": "
            << (q.verdict.is_proved() ? "unsat" : q.verdict.is_not_proved() ? "sat" : q.verdict.to_string())
            << "\n";
      }
    }
  }
}

}  // namespace

std::string render_text(const AccelResult& r, bool with_trace) {
  std::ostringstream out;
  if (r.success) {
    out << "acceleration: accelerated\n";
    out << "exact: " << (r.exact ? "true" : "false") << "\n";
    out << "formula: " << r.conditions.to_string() << "\n";
    out << "bindings:\n";
    for (const auto& [v, e] : r.bindings) out << "  " << v.name() << " = " << e.to_string() << "\n";
  } else {
    out << "acceleration: failed\n";
    out << "reason: " << r.failure << "\n";
    out << "leftover: " << r.leftover.to_string() << "\n";
  }
  if (with_trace) trace_text(out, r.trace, false);
  return out.str();
}

std::string render_text(const NontermResult& r, bool with_trace) {
  std::ostringstream out;
  if (r.success()) {
    const auto& c = *r.certificate;
    out << "nonterm: certificate found\n";
    out << "certificate: " << c.formula.to_string() << "\n";
    out << "witness: " << state_text(c.witness) << "\n";
    out << "simulated: " << c.simulated_steps << " steps\n";
  } else {
    out << "nonterm: no certificate found\n";
    out << "reason: " << r.failure << "\n";
    out << "leftover: " << r.leftover.to_string() << "\n";
  }
  if (with_trace) trace_text(out, r.trace, true);
  return out.str();
}

std::string render_text(const VerifyReport& r) {
  std::ostringstream out;
  out << "verify (" << r.kind << "): checked " << r.checked;
  if (r.kind == "certificate") {
    out << " models for " << r.steps << " steps";
  } else {
    out << " points, box " << r.box << ", max-n " << r.max_n;
  }
  out << "; soundness violations " << r.soundness_count;
  if (r.kind == "certificate") {
    out << ", recurrence violations " << r.recurrence_count;
  } else {
    out << ", exactness violations " << r.exactness_count;
  }
  out << "\n";
  for (const auto& v : r.soundness_violations) {
    out << "  unsound at " << state_text(v.x) << ", n=" << v.n << ": expected " << v.expected << ", got " << v.got
        << "\n";
  }
  for (const auto& v : r.exactness_violations) {
    out << "  inexact at " << state_text(v.x) << ", n=" << v.n << ": " << v.got << "\n";
  }
  for (const auto& v : r.recurrence_violations) {
    out << "  not recurrent at " << state_text(v.x) << "\n";
  }
  return out.str();
}

std::string render_smtlib(const AccelResult& r) {
  std::ostringstream out;
  out << "; accelerated loop, " << (r.success ? (r.exact ? "exact" : "under-approximation") : "partial") << "\n";
  for (const auto& [v, e] : r.bindings) out << "; " << v.name() << " = " << e.to_string() << "\n";
  Formula conditions;
  for (const auto& c : r.conditions.clauses()) {
    bool plain = true;
    for (const auto& a : c.atoms()) plain = plain && !a.lhs().has_exponential();
    if (plain) {
      conditions.add(c);
    } else {
      out << "; dropped: " << c.to_string() << "\n";
    }
  }
  // The formula describes runs of length n >= 1.
  conditions.add(Atom::gt0(PolyExp(kCounter)));
  out << to_smtlib(conditions);
  return out.str();
}

std::string render_smtlib(const NontermResult& r) {
  if (!r.success()) return "; no certificate found\n";
  return "; certificate of non-termination\n" + to_smtlib(r.certificate->formula);
}

}  // namespace loopaccel
