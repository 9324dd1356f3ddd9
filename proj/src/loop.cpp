#include "loopaccel/loop.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace loopaccel {

SyntaxError::SyntaxError(const std::string& what, std::size_t line, std::size_t col)
    : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + what),
      line_(line),
      col_(col) {}

const PolyExp& Update::of(const Var& v) const {
  auto it = assignments.find(v);
  if (it == assignments.end()) throw UnboundVariable("no update for " + v.name());
  return it->second;
}

Loop Loop::make(std::vector<Var> vars, Formula guard, Update update) {
  std::set<Var> declared;
  for (const auto& v : vars) {
    if (v.is_counter()) throw DisallowedConstruct("'n' is reserved for the iteration counter");
    if (v.is_primed()) throw DisallowedConstruct("primed names are reserved: " + v.name());
    if (!declared.insert(v).second) throw DisallowedConstruct("duplicate variable " + v.name());
  }
  for (const auto& v : guard.vars()) {
    if (declared.count(v) == 0) throw UndeclaredVariable("guard mentions undeclared " + v.name());
  }
  for (const auto& c : guard.clauses()) {
    for (const auto& a : c.atoms()) {
      if (a.kind() != Atom::Kind::Gt0) throw DisallowedConstruct("guard atoms must be strict");
    }
  }
  for (const auto& [v, rhs] : update.assignments) {
    if (declared.count(v) == 0) throw UndeclaredVariable("update of undeclared " + v.name());
    if (rhs.has_exponential() || !rhs.has_integer_coefficients()) {
      throw NonPolynomialUpdate("update of " + v.name() + " is not an integer polynomial");
    }
    for (const auto& w : rhs.vars()) {
      if (declared.count(w) == 0) throw UndeclaredVariable("update mentions undeclared " + w.name());
    }
  }
  for (const auto& v : vars) update.assignments.try_emplace(v, PolyExp(v));
  return Loop{std::move(vars), std::move(guard), std::move(update)};
}

Valuation Loop::step(const Valuation& state) const {
  Valuation next = state;
  for (const auto& v : vars) next[v] = update.of(v).eval(state);
  return next;
}

Loop Loop::with_guard(Formula g) const {
  Loop copy = *this;
  copy.guard = std::move(g);
  return copy;
}

namespace {

enum class Tok {
  Ident,
  Int,
  Comma,
  Semi,
  Colon,
  Assign,
  Plus,
  Minus,
  Star,
  Caret,
  LParen,
  RParen,
  Gt,
  Ge,
  Lt,
  Le,
  EqEq,
  And,
  Or,
  Other,
  End
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t col;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::Other, std::string(1, c), line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      out.push_back(t);
      advance(j - i);
      continue;
    }
    auto two = src.substr(i, 2);
    struct Sym {
      std::string_view text;
      Tok kind;
    };
    static constexpr Sym kSyms[] = {
        {":=", Tok::Assign}, {">=", Tok::Ge},  {"<=", Tok::Le},     {"==", Tok::EqEq},
        {"&&", Tok::And},    {"||", Tok::Or},  {",", Tok::Comma},   {";", Tok::Semi},
        {":", Tok::Colon},   {"+", Tok::Plus}, {"-", Tok::Minus},   {"*", Tok::Star},
        {"^", Tok::Caret},   {"(", Tok::LParen}, {")", Tok::RParen}, {">", Tok::Gt},
        {"<", Tok::Lt},
    };
    bool matched = false;
    for (const auto& s : kSyms) {
      if ((s.text.size() == 2 && two == s.text) || (s.text.size() == 1 && c == s.text[0])) {
        t.kind = s.kind;
        t.text = std::string(s.text);
        out.push_back(t);
        advance(s.text.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      // Keep multi-character operators like "!=" together for a clearer error.
      if ((c == '!' || c == '/') && i + 1 < src.size() && src[i + 1] == '=') t.text += '=';
      out.push_back(t);
      advance(t.text.size());
    }
  }
  out.push_back(Token{Tok::End, "<end of input>", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  PolyExp parse_standalone(const std::vector<Var>& vars) {
    declared_.insert(vars.begin(), vars.end());
    in_update_ = true;
    PolyExp e = parse_poly();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after polynomial");
    return e;
  }

  Loop parse() {
    keyword("vars");
    std::vector<Var> vars;
    do {
      const Token& t = expect(Tok::Ident, "variable name");
      check_name(t);
      Var v(t.text);
      if (declared_.count(v)) throw DisallowedConstruct("duplicate variable " + t.text);
      declared_.insert(v);
      vars.push_back(v);
    } while (accept(Tok::Comma));
    expect(Tok::Semi, "';'");

    keyword("guard");
    Formula guard = parse_cnf();
    expect(Tok::Semi, "';'");

    keyword("update");
    in_update_ = true;
    Update update;
    do {
      if (peek().kind == Tok::End) break;
      const Token& t = expect(Tok::Ident, "assigned variable");
      Var v(t.text);
      if (!declared_.count(v)) throw UndeclaredVariable(where(t) + "undeclared variable " + t.text);
      expect(Tok::Assign, "':='");
      PolyExp rhs = parse_poly();
      if (!update.assignments.emplace(v, rhs).second) {
        throw DisallowedConstruct(where(t) + "variable " + t.text + " is assigned twice");
      }
    } while (accept(Tok::Semi));
    if (peek().kind != Tok::End) fail("expected ';' or end of input");
    return Loop::make(std::move(vars), std::move(guard), std::move(update));
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }
  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail("expected " + what + ", found '" + peek().text + "'");
    return toks_[pos_++];
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    if (t.text == "/" || t.text == "!" || t.text == "!=" || t.text == "/=") {
      std::string msg2 = where(t) + "operator '" + t.text + "' is not supported";
      if (in_update_ && t.text == "/") throw NonPolynomialUpdate(msg2);
      throw DisallowedConstruct(msg2);
    }
    throw SyntaxError(msg, t.line, t.col);
  }
  static std::string where(const Token& t) {
    return std::to_string(t.line) + ":" + std::to_string(t.col) + ": ";
  }
  void keyword(const std::string& word) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || t.text != word) fail("expected '" + word + ":'");
    ++pos_;
    expect(Tok::Colon, "':'");
  }
  void check_name(const Token& t) const {
    static const std::set<std::string> kQuantifiers{"forall", "exists"};
    if (kQuantifiers.count(t.text)) throw DisallowedConstruct(where(t) + "quantifiers are not supported");
    if (t.text == "n") throw DisallowedConstruct(where(t) + "'n' is reserved for the iteration counter");
    if (t.text == "true" || t.text == "false") {
      throw DisallowedConstruct(where(t) + "'" + t.text + "' cannot be a variable");
    }
  }

  Formula parse_cnf() {
    Formula out;
    do {
      for (const auto& c : parse_clause()) out.add(c);
    } while (accept(Tok::And));
    if (peek().kind == Tok::Or) fail("disjunctions must be parenthesized");
    return out.folded();
  }

  // A clause group may expand into several clauses because equalities split
  // into two inequalities and are distributed over the disjunction.
  std::vector<Clause> parse_clause() {
    if (peek().kind == Tok::LParen) {
      std::size_t saved = pos_;
      try {
        ++pos_;
        std::vector<std::vector<Atom>> disjuncts{parse_atom()};
        bool grouped = false;
        while (accept(Tok::Or)) {
          disjuncts.push_back(parse_atom());
          grouped = true;
        }
        expect(Tok::RParen, "')'");
        Tok next = peek().kind;
        if (grouped || next == Tok::And || next == Tok::Semi) return distribute(disjuncts);
      } catch (const SyntaxError&) {
      }
      pos_ = saved;
    }
    return distribute({parse_atom()});
  }

  static std::vector<Clause> distribute(const std::vector<std::vector<Atom>>& disjuncts) {
    std::vector<std::vector<Atom>> acc{{}};
    for (const auto& conj : disjuncts) {
      std::vector<std::vector<Atom>> next;
      for (const auto& partial : acc) {
        for (const auto& a : conj) {
          auto extended = partial;
          extended.push_back(a);
          next.push_back(std::move(extended));
        }
      }
      acc = std::move(next);
    }
    std::vector<Clause> out;
    for (const auto& atoms : acc) out.emplace_back(atoms);
    return out;
  }

  // One surface comparison as a conjunction of strict atoms.
  std::vector<Atom> parse_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Ident && (t.text == "true" || t.text == "false")) {
      ++pos_;
      return {Atom::gt0(PolyExp(t.text == "true" ? 1L : 0L))};
    }
    if (t.kind == Tok::Ident && (t.text == "forall" || t.text == "exists")) {
      throw DisallowedConstruct(where(t) + "quantifiers are not supported");
    }
    PolyExp lhs = parse_poly();
    Tok rel = peek().kind;
    if (rel != Tok::Gt && rel != Tok::Ge && rel != Tok::Lt && rel != Tok::Le && rel != Tok::EqEq) {
      fail("expected a comparison operator");
    }
    ++pos_;
    PolyExp rhs = parse_poly();
    PolyExp one(1L);
    switch (rel) {
      case Tok::Gt:
        return {Atom::gt0(lhs - rhs)};
      case Tok::Ge:
        return {Atom::gt0(lhs - rhs + one)};
      case Tok::Lt:
        return {Atom::gt0(rhs - lhs)};
      case Tok::Le:
        return {Atom::gt0(rhs - lhs + one)};
      default:
        return {Atom::gt0(lhs - rhs + one), Atom::gt0(rhs - lhs + one)};
    }
  }

  PolyExp parse_poly() {
    PolyExp acc = parse_term();
    while (true) {
      if (accept(Tok::Plus)) {
        acc += parse_term();
      } else if (accept(Tok::Minus)) {
        acc -= parse_term();
      } else {
        return acc;
      }
    }
  }

  PolyExp parse_term() {
    PolyExp acc = parse_unary();
    while (accept(Tok::Star)) acc *= parse_unary();
    return acc;
  }

  PolyExp parse_unary() {
    if (accept(Tok::Minus)) return -parse_unary();
    return parse_power();
  }

  PolyExp parse_power() {
    PolyExp base = parse_primary();
    if (accept(Tok::Caret)) {
      const Token& t = peek();
      if (t.kind != Tok::Int) {
        std::string msg = where(t) + "exponents must be non-negative integer literals";
        if (in_update_) throw NonPolynomialUpdate(msg);
        throw SyntaxError("exponents must be non-negative integer literals", t.line, t.col);
      }
      ++pos_;
      unsigned long k = std::stoul(t.text);
      if (k > 64) throw DisallowedConstruct(where(t) + "exponent too large");
      return base.pow(static_cast<unsigned>(k));
    }
    return base;
  }

  PolyExp parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      ++pos_;
      return PolyExp(Rational(Integer(t.text)));
    }
    if (t.kind == Tok::Ident) {
      check_name(t);
      Var v(t.text);
      if (!declared_.count(v)) throw UndeclaredVariable(where(t) + "undeclared variable " + t.text);
      ++pos_;
      return PolyExp(v);
    }
    if (accept(Tok::LParen)) {
      PolyExp inner = parse_poly();
      expect(Tok::RParen, "')'");
      return inner;
    }
    fail("expected a polynomial, found '" + t.text + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<Var> declared_;
  bool in_update_ = false;
};

}  // namespace

Loop parse_loop(std::string_view text) { return Parser(text).parse(); }

PolyExp parse_polynomial(std::string_view text, const std::vector<Var>& vars) {
  return Parser(text).parse_standalone(vars);
}

Loop load_loop(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_loop(buf.str());
}

std::string render_loop(const Loop& loop) {
  std::ostringstream out;
  out << "vars: ";
  for (std::size_t i = 0; i < loop.vars.size(); ++i) out << (i ? ", " : "") << loop.vars[i].name();
  out << ";\nguard: " << loop.guard.to_string() << ";\nupdate:";
  for (std::size_t i = 0; i < loop.vars.size(); ++i) {
    const Var& v = loop.vars[i];
    out << (i ? ";" : "") << " " << v.name() << " := " << loop.update.of(v).to_string();
  }
  out << ";\n";
  return out.str();
}

PolyExp apply_update(const PolyExp& e, const Update& u, unsigned k) {
  PolyExp out = e;
  for (unsigned i = 0; i < k; ++i) out = out.subst(u.assignments);
  return out;
}

Formula apply_update(const Formula& phi, const Update& u, unsigned k) {
  if (k == 0) return phi;
  return phi.map_atoms([&](const Atom& a) {
    return Atom(a.kind(), apply_update(a.lhs(), u, k));
  });
}

}  // namespace loopaccel
