#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "loopaccel/accel.hpp"
#include "loopaccel/nonterm.hpp"
#include "loopaccel/oracle.hpp"

namespace loopaccel {

inline constexpr int kSchemaVersion = 1;

nlohmann::ordered_json to_json(const Valuation& v);
nlohmann::ordered_json to_json(const Formula& f);  // list of clause strings
nlohmann::ordered_json to_json(const ProofStep& s, bool with_queries, bool nonterm);
nlohmann::ordered_json to_json(const AccelResult& r, bool with_queries);
nlohmann::ordered_json to_json(const NontermResult& r, bool with_queries);
nlohmann::ordered_json to_json(const VerifyReport& r);
nlohmann::ordered_json loop_json(const Loop& loop);

std::string render_text(const AccelResult& r, bool with_trace);
std::string render_text(const NontermResult& r, bool with_trace);
std::string render_text(const VerifyReport& r);
std::string render_step(const ProofStep& s, bool nonterm);

// Exponential-free part of the result as a QF_NIA script; the closed-form
// bindings appear as comments.
std::string render_smtlib(const AccelResult& r);
std::string render_smtlib(const NontermResult& r);

}  // namespace loopaccel
