#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <sys/types.h>
#include <vector>

#include "loopaccel/expr.hpp"

namespace loopaccel {

class SolverUnavailable : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class UnsupportedTerm : public Error {
 public:
  using Error::Error;
};

// Outcome of a validity or satisfiability query. For check_sat, NotProved
// carries a satisfying model and Proved means unsat.
struct SolverVerdict {
  enum class Kind { Proved, NotProved, Unknown };

  Kind kind = Kind::Unknown;
  Valuation model;
  std::string reason;  // timeout | incomplete | io, only for Unknown

  static SolverVerdict proved() { return {Kind::Proved, {}, {}}; }
  static SolverVerdict not_proved(Valuation m) { return {Kind::NotProved, std::move(m), {}}; }
  static SolverVerdict unknown(std::string why) { return {Kind::Unknown, {}, std::move(why)}; }

  bool is_proved() const { return kind == Kind::Proved; }
  bool is_not_proved() const { return kind == Kind::NotProved; }
  bool is_unknown() const { return kind == Kind::Unknown; }
  std::string to_string() const;
};

struct SolverConfig {
  std::string binary = "z3";
  std::vector<std::string> args;  // empty: chosen from the binary name
  int timeout_ms = 10000;

  // Default config with LOOPACCEL_SMT_BIN applied.
  static SolverConfig from_environment();
  std::vector<std::string> effective_args() const;
};

// SMT-LIB2 rendering of a quantifier-free polynomial formula, declaring
// every variable as Int. Throws UnsupportedTerm on exponentials.
std::string to_smtlib(const Formula& phi);
std::string smt_term(const PolyExp& e);
std::string smt_atom(const Atom& a);
std::string smt_symbol(const Var& v);

// One solver process behind pipes. Not shareable across threads.
class SmtClient {
 public:
  explicit SmtClient(SolverConfig cfg = SolverConfig::from_environment());
  ~SmtClient();
  SmtClient(const SmtClient&) = delete;
  SmtClient& operator=(const SmtClient&) = delete;

  SolverVerdict check_sat(const Formula& phi);
  // Proved iff premise && !conclusion is unsat.
  SolverVerdict check_implication(const Formula& premise, const Formula& conclusion);
  // Satisfiability of a formula that may mention n and exponentials: the
  // n-free part decides unsat, instantiating n decides sat, else Unknown.
  SolverVerdict check_sat_over_n(const Formula& phi, const std::vector<std::int64_t>& ns = {1, 2, 3});

  const SolverConfig& config() const { return cfg_; }
  std::size_t queries() const { return queries_; }

 private:
  SolverVerdict run(const std::string& asserts, const std::set<Var>& vars,
                    const std::function<bool(const Valuation&)>& recheck);
  void spawn();
  void kill_process();
  bool send(const std::string& text);
  enum class ReadStatus { Ok, Timeout, Eof };
  ReadStatus read_line(std::string& line, long deadline_ms);
  ReadStatus read_sexpr(std::string& out, long deadline_ms);

  SolverConfig cfg_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::size_t queries_ = 0;
  bool ever_answered_ = false;
};

}  // namespace loopaccel
