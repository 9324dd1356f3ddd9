#include "loopaccel/solver.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace loopaccel {

std::string SolverVerdict::to_string() const {
  switch (kind) {
    case Kind::Proved:
      return "proved";
    case Kind::NotProved: {
      std::string out = "not-proved";
      bool first = true;
      for (const auto& [v, val] : model) {
        out += first ? " {" : ", ";
        out += v.name() + "=" + val.get_str();
        first = false;
      }
      if (!first) out += "}";
      return out;
    }
    case Kind::Unknown:
      return "unknown (" + reason + ")";
  }
  return "unknown";
}

SolverConfig SolverConfig::from_environment() {
  SolverConfig cfg;
  if (const char* bin = std::getenv("LOOPACCEL_SMT_BIN"); bin != nullptr && *bin != '\0') cfg.binary = bin;
  return cfg;
}

std::vector<std::string> SolverConfig::effective_args() const {
  if (!args.empty()) return args;
  std::string base = binary.substr(binary.find_last_of('/') == std::string::npos ? 0 : binary.find_last_of('/') + 1);
  if (base.rfind("z3", 0) == 0) return {"-in", "-smt2"};
  if (base.rfind("cvc", 0) == 0) return {"--lang=smt2", "--incremental", "--produce-models"};
  if (base.rfind("yices", 0) == 0) return {"--incremental"};
  return {};
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool simple_symbol(const std::string& s) {
  static const std::set<std::string> kReserved{"and", "or", "not", "let", "ite", "true", "false",
                                               "assert", "forall", "exists", "distinct", "div", "mod",
                                               "abs", "_", "!", "as", "par"};
  if (s.empty() || kReserved.count(s)) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::string smt_int(const Integer& k) {
  if (k < 0) return "(- " + Integer(-k).get_str() + ")";
  return k.get_str();
}

// Magnitude of a term with an integer coefficient, sign handled by the caller.
std::string smt_unsigned_term(const Monomial& mono, const Integer& mag) {
  std::vector<std::string> factors;
  if (mag != 1 || mono.is_one()) factors.push_back(mag.get_str());
  for (const auto& [v, p] : mono.powers()) {
    for (unsigned i = 0; i < p; ++i) factors.push_back(smt_symbol(v));
  }
  if (factors.size() == 1) return factors[0];
  std::string out = "(*";
  for (const auto& f : factors) out += " " + f;
  return out + ")";
}

std::vector<Var> sorted_vars(const std::set<Var>& vars) { return {vars.begin(), vars.end()}; }

std::string assert_formula(const Formula& phi) {
  std::string out;
  for (const auto& c : phi.clauses()) {
    if (c.size() == 1) {
      out += "(assert " + smt_atom(c.atoms()[0]) + ")\n";
    } else {
      out += "(assert (or";
      for (const auto& a : c.atoms()) out += " " + smt_atom(a);
      out += "))\n";
    }
  }
  return out;
}

std::string formula_term(const Formula& phi) {
  if (phi.is_top()) return "true";
  std::vector<std::string> parts;
  for (const auto& c : phi.clauses()) {
    if (c.size() == 1) {
      parts.push_back(smt_atom(c.atoms()[0]));
    } else {
      std::string s = "(or";
      for (const auto& a : c.atoms()) s += " " + smt_atom(a);
      parts.push_back(s + ")");
    }
  }
  if (parts.size() == 1) return parts[0];
  std::string out = "(and";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

std::string declarations(const std::set<Var>& vars) {
  std::string out;
  for (const auto& v : sorted_vars(vars)) out += "(declare-const " + smt_symbol(v) + " Int)\n";
  return out;
}

void reject_exponentials(const Formula& phi) {
  if (phi.has_exponential()) throw UnsupportedTerm("exponential term in solver query: " + phi.to_string());
}

}  // namespace

std::string smt_symbol(const Var& v) {
  if (simple_symbol(v.name())) return v.name();
  return "|" + v.name() + "|";
}

std::string smt_term(const PolyExp& e) {
  if (e.has_exponential()) throw UnsupportedTerm("exponential term: " + e.to_string());
  if (!e.has_integer_coefficients()) throw UnsupportedTerm("rational coefficient in " + e.to_string());
  if (e.is_zero()) return "0";
  std::string acc;
  bool first = true;
  for (const auto& [key, coef] : e.terms()) {
    Integer num = coef.get_num();
    Integer mag = abs(num);
    std::string t = smt_unsigned_term(key.mono, mag);
    if (first) {
      acc = num < 0 ? (key.mono.is_one() ? smt_int(num) : "(- " + t + ")") : t;
      first = false;
    } else {
      acc = "(" + std::string(num < 0 ? "-" : "+") + " " + acc + " " + t + ")";
    }
  }
  return acc;
}

std::string smt_atom(const Atom& a) {
  // Scaling by the positive denominator lcm keeps both > 0 and = 0.
  PolyExp lhs = a.lhs().scaled(Rational(a.lhs().denominator_lcm()));
  return std::string(a.kind() == Atom::Kind::Gt0 ? "(> " : "(= ") + smt_term(lhs) + " 0)";
}

std::string to_smtlib(const Formula& phi) {
  reject_exponentials(phi);
  std::string out = "(set-option :produce-models true)\n(set-logic QF_NIA)\n";
  out += declarations(phi.vars());
  out += assert_formula(phi);
  out += "(check-sat)\n(get-model)\n";
  return out;
}

// ---------------------------------------------------------------------------
// Process client

namespace {

long now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

void fill_missing(Valuation& model, const std::set<Var>& vars) {
  for (const auto& v : vars) model.try_emplace(v, Integer(0));
}

// Minimal s-expression model reader: finds every (define-fun name () Int value).
Valuation parse_model(const std::string& text) {
  Valuation model;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto read_atom = [&]() -> std::string {
    skip_ws();
    if (i < text.size() && text[i] == '|') {
      std::size_t end = text.find('|', i + 1);
      if (end == std::string::npos) throw ProtocolError("unterminated quoted symbol in model");
      std::string s = text.substr(i + 1, end - i - 1);
      i = end + 1;
      return s;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
           text[i] != ')') {
      ++i;
    }
    return text.substr(start, i - start);
  };
  auto read_literal = [&]() -> Integer {
    std::string lit = read_atom();
    try {
      return Integer(lit);
    } catch (const std::invalid_argument&) {
      throw ProtocolError("non-integer model value " + lit);
    }
  };
  auto read_value = [&]() -> Integer {
    skip_ws();
    if (i < text.size() && text[i] == '(') {
      ++i;
      std::string op = read_atom();
      if (op != "-") throw ProtocolError("unexpected model value operator " + op);
      Integer v = -read_literal();
      skip_ws();
      if (i >= text.size() || text[i] != ')') throw ProtocolError("malformed negative model value");
      ++i;
      return v;
    }
    return read_literal();
  };
  const std::string key = "define-fun";
  while ((i = text.find(key, i)) != std::string::npos) {
    i += key.size();
    std::string name = read_atom();
    skip_ws();
    if (text.compare(i, 2, "()") != 0) {
      // Function with arguments; not produced for our queries.
      continue;
    }
    i += 2;
    std::string sort = read_atom();
    if (sort != "Int") continue;
    model[Var(name)] = read_value();
  }
  return model;
}

}  // namespace

SmtClient::SmtClient(SolverConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.timeout_ms <= 0) throw Error("solver timeout must be positive");
  std::signal(SIGPIPE, SIG_IGN);
}

SmtClient::~SmtClient() { kill_process(); }

void SmtClient::spawn() {
  int in_pipe[2];
  int out_pipe[2];
  int err_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) throw SolverUnavailable("pipe failed");
  if (pipe2(err_pipe, O_CLOEXEC) != 0) throw SolverUnavailable("pipe failed");
  std::vector<std::string> args = cfg_.effective_args();
  pid_t pid = fork();
  if (pid < 0) throw SolverUnavailable("fork failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDERR_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(cfg_.binary.c_str()));
    for (auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    int err = errno;
    ssize_t ignored = write(err_pipe[1], &err, sizeof err);
    (void)ignored;
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  int child_errno = 0;
  ssize_t got = read(err_pipe[0], &child_errno, sizeof child_errno);
  close(err_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof child_errno)) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    waitpid(pid, nullptr, 0);
    throw SolverUnavailable("cannot run solver '" + cfg_.binary + "': " + std::strerror(child_errno));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
}

void SmtClient::kill_process() {
  if (pid_ < 0) return;
  close(to_child_);
  close(from_child_);
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
  pid_ = -1;
  to_child_ = from_child_ = -1;
  buffer_.clear();
}

bool SmtClient::send(const std::string& text) {
  std::size_t off = 0;
  while (off < text.size()) {
    ssize_t w = write(to_child_, text.data() + off, text.size() - off);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(w);
  }
  return true;
}

SmtClient::ReadStatus SmtClient::read_line(std::string& line, long deadline_ms) {
  while (true) {
    std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return ReadStatus::Ok;
    }
    long left = deadline_ms - now_ms();
    if (left <= 0) return ReadStatus::Timeout;
    pollfd pfd{from_child_, POLLIN, 0};
    int r = poll(&pfd, 1, static_cast<int>(left));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) return ReadStatus::Timeout;
    char chunk[4096];
    ssize_t got = read(from_child_, chunk, sizeof chunk);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) return ReadStatus::Eof;
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

SmtClient::ReadStatus SmtClient::read_sexpr(std::string& out, long deadline_ms) {
  out.clear();
  int depth = 0;
  bool started = false;
  std::string line;
  while (true) {
    ReadStatus st = read_line(line, deadline_ms);
    if (st != ReadStatus::Ok) return st;
    out += line + "\n";
    bool quoted = false;
    for (char c : line) {
      if (c == '|') quoted = !quoted;
      if (quoted) continue;
      if (c == '(') {
        ++depth;
        started = true;
      } else if (c == ')') {
        --depth;
      }
    }
    if (started && depth <= 0) return ReadStatus::Ok;
  }
}

SolverVerdict SmtClient::run(const std::string& asserts, const std::set<Var>& vars,
                             const std::function<bool(const Valuation&)>& recheck) {
  ++queries_;
  if (pid_ < 0) spawn();
  std::string script = "(reset)\n(set-option :produce-models true)\n(set-logic QF_NIA)\n";
  script += declarations(vars);
  script += asserts;
  script += "(check-sat)\n";
  long deadline = now_ms() + cfg_.timeout_ms;
  auto io_failure = [&]() -> SolverVerdict {
    kill_process();
    if (!ever_answered_) throw SolverUnavailable("solver '" + cfg_.binary + "' exited without answering");
    return SolverVerdict::unknown("io");
  };
  if (!send(script)) return io_failure();
  std::string line;
  while (true) {
    ReadStatus st = read_line(line, deadline);
    if (st == ReadStatus::Timeout) {
      kill_process();
      return SolverVerdict::unknown("timeout");
    }
    if (st == ReadStatus::Eof) return io_failure();
    std::string word = line;
    word.erase(0, word.find_first_not_of(" \t\r"));
    word.erase(word.find_last_not_of(" \t\r") + 1);
    if (word.empty() || word == "success") continue;
    if (word.rfind("(error", 0) == 0) {
      kill_process();
      throw ProtocolError("solver reported: " + word);
    }
    if (word == "unsat") {
      ever_answered_ = true;
      return SolverVerdict::proved();
    }
    if (word == "unknown") {
      ever_answered_ = true;
      return SolverVerdict::unknown("incomplete");
    }
    if (word == "sat") break;
    kill_process();
    throw ProtocolError("unexpected solver reply: " + word);
  }
  ever_answered_ = true;
  if (!send("(get-model)\n")) return io_failure();
  std::string text;
  ReadStatus st = read_sexpr(text, deadline);
  if (st == ReadStatus::Timeout) {
    kill_process();
    return SolverVerdict::unknown("timeout");
  }
  if (st == ReadStatus::Eof) return io_failure();
  if (text.find("(error") != std::string::npos) {
    kill_process();
    throw ProtocolError("solver reported: " + text);
  }
  Valuation model = parse_model(text);
  Valuation restricted;
  for (const auto& v : vars) {
    auto it = model.find(v);
    restricted[v] = it == model.end() ? Integer(0) : it->second;
  }
  fill_missing(restricted, vars);
  // Never trust a model that does not re-evaluate correctly.
  if (!recheck(restricted)) return SolverVerdict::unknown("incomplete");
  return SolverVerdict::not_proved(std::move(restricted));
}

SolverVerdict SmtClient::check_sat(const Formula& phi) {
  reject_exponentials(phi);
  Formula f = phi.folded();
  if (f.is_bottom()) return SolverVerdict::proved();
  return run(assert_formula(f), f.vars(), [&](const Valuation& m) { return f.holds(m); });
}

SolverVerdict SmtClient::check_implication(const Formula& premise, const Formula& conclusion) {
  reject_exponentials(premise);
  reject_exponentials(conclusion);
  Formula p = premise.folded();
  Formula c = conclusion.folded();
  if (p.is_bottom() || c.is_top()) return SolverVerdict::proved();
  std::set<Var> vars = p.vars();
  for (const auto& v : c.vars()) vars.insert(v);
  std::string asserts = assert_formula(p);
  asserts += "(assert (not " + formula_term(c) + "))\n";
  return run(asserts, vars, [&](const Valuation& m) { return p.holds(m) && !c.holds(m); });
}

SolverVerdict SmtClient::check_sat_over_n(const Formula& phi, const std::vector<std::int64_t>& ns) {
  Formula f = phi.folded();
  if (f.is_bottom()) return SolverVerdict::proved();
  Formula projection;
  for (const auto& c : f.clauses()) {
    bool free = true;
    for (const auto& a : c.atoms()) {
      if (a.lhs().mentions(kCounter) || a.lhs().has_exponential()) free = false;
    }
    if (free) projection.add(c);
  }
  SolverVerdict proj = check_sat(projection);
  if (proj.is_proved() || proj.is_unknown()) return proj;
  if (!f.mentions(kCounter) && !f.has_exponential()) return proj;
  for (auto n : ns) {
    Formula inst = f.map_atoms([&](const Atom& a) { return a.instantiate_n(n); });
    SolverVerdict v = check_sat(inst);
    if (v.is_not_proved()) {
      v.model[kCounter] = Integer(static_cast<long>(n));
      return v;
    }
  }
  return SolverVerdict::unknown("incomplete");
}

}  // namespace loopaccel
