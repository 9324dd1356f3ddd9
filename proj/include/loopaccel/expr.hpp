#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace loopaccel {

using Integer = mpz_class;
using Rational = mpq_class;

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonIntegerResult : public Error {
 public:
  using Error::Error;
};

class UnboundVariable : public Error {
 public:
  using Error::Error;
};

class UnsupportedComposition : public Error {
 public:
  using Error::Error;
};

// A program variable, a primed post-state variable, or the iteration counter `n`.
// Program variables order before primed ones, and the counter orders last.
class Var {
 public:
  Var() = default;
  explicit Var(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  bool is_counter() const { return name_ == "n"; }
  bool is_primed() const { return !name_.empty() && name_.back() == '\''; }
  Var primed() const { return Var(name_ + "'"); }

  std::strong_ordering operator<=>(const Var& other) const;
  bool operator==(const Var& other) const { return name_ == other.name_; }

 private:
  int rank() const { return is_counter() ? 2 : (is_primed() ? 1 : 0); }
  std::string name_;
};

inline const Var kCounter{"n"};

using Valuation = std::map<Var, Integer>;

// Product of variable powers, sorted by variable, exponents positive.
class Monomial {
 public:
  Monomial() = default;
  static Monomial of(const Var& v, unsigned power = 1);

  const std::vector<std::pair<Var, unsigned>>& powers() const { return powers_; }
  unsigned degree() const;
  unsigned degree_in(const Var& v) const;
  bool is_one() const { return powers_.empty(); }
  Monomial without(const Var& v) const;
  Monomial operator*(const Monomial& other) const;

  bool operator==(const Monomial&) const = default;

  // Graded order: higher total degree first, then lexicographic on variables.
  static bool render_less(const Monomial& a, const Monomial& b);

 private:
  std::vector<std::pair<Var, unsigned>> powers_;
};

// The n-dependent factor of a term: either b^n (b != 0, b = 1 for none) or
// the indicator [n = j], which is 1 at n = j and 0 elsewhere.
struct ExpFactor {
  std::int64_t base = 1;
  std::optional<std::int64_t> indicator;

  bool is_one() const { return base == 1 && !indicator; }
  bool operator==(const ExpFactor&) const = default;
};

struct TermKey {
  Monomial mono;
  ExpFactor exp;
  bool operator==(const TermKey&) const = default;
};

struct TermKeyLess {
  bool operator()(const TermKey& a, const TermKey& b) const;
};

// Poly-exponential expression: a finite sum of rational coefficient times
// monomial times b^n (or an indicator on n). Kept canonical: no zero
// coefficients; an indicator term never carries n or b^n.
class PolyExp {
 public:
  using Terms = std::map<TermKey, Rational, TermKeyLess>;

  PolyExp() = default;
  PolyExp(long value) : PolyExp(Rational(value)) {}  // NOLINT: implicit constants read naturally
  explicit PolyExp(const Rational& value);
  explicit PolyExp(const Var& v);

  static PolyExp exponential(std::int64_t base);
  static PolyExp indicator(std::int64_t at);
  static PolyExp term(const Rational& coef, Monomial mono, ExpFactor exp = {});

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  // Value of a constant expression; throws if the expression is not constant.
  Rational constant_value() const;
  bool has_exponential() const;
  bool mentions(const Var& v) const;
  std::set<Var> vars() const;
  unsigned degree_in(const Var& v) const;
  unsigned total_degree() const;
  bool has_integer_coefficients() const;
  // Least positive integer L such that L * e has integer coefficients.
  Integer denominator_lcm() const;

  PolyExp operator-() const;
  PolyExp& operator+=(const PolyExp& other);
  PolyExp& operator-=(const PolyExp& other);
  PolyExp& operator*=(const PolyExp& other);
  friend PolyExp operator+(PolyExp a, const PolyExp& b) { return a += b; }
  friend PolyExp operator-(PolyExp a, const PolyExp& b) { return a -= b; }
  friend PolyExp operator*(PolyExp a, const PolyExp& b) { return a *= b; }
  PolyExp pow(unsigned k) const;
  PolyExp scaled(const Rational& factor) const;

  bool operator==(const PolyExp& other) const { return terms_ == other.terms_; }

  Rational eval_rational(const Valuation& env) const;
  // Exact integer value. Throws NonIntegerResult when the value is fractional.
  Integer eval(const Valuation& env) const;

  // Simultaneous substitution of program variables. Mapping the counter is
  // rejected; use shift_n / instantiate_n for that.
  PolyExp subst(const std::map<Var, PolyExp>& sigma) const;
  // n |-> n + k.
  PolyExp shift_n(std::int64_t k) const;
  // n |-> value for a concrete natural value.
  PolyExp instantiate_n(std::int64_t value) const;
  // Coefficients of e viewed as a polynomial in `v`: result[p] multiplies v^p.
  std::vector<PolyExp> coefficients_in(const Var& v) const;

  std::string to_string() const;

 private:
  void add_term(const TermKey& key, const Rational& coef);
  Terms terms_;
};

// Atomic constraint `lhs > 0` or `lhs = 0`.
class Atom {
 public:
  enum class Kind { Gt0, Eq0 };

  Atom(Kind kind, PolyExp lhs);
  static Atom gt0(PolyExp e) { return Atom(Kind::Gt0, std::move(e)); }
  static Atom eq0(PolyExp e) { return Atom(Kind::Eq0, std::move(e)); }
  // a >= b, encoded over the integers as L*(a - b) + 1 > 0.
  static Atom ge(const PolyExp& a, const PolyExp& b);
  // a <= b.
  static Atom le(const PolyExp& a, const PolyExp& b) { return ge(b, a); }
  static Atom falsum() { return gt0(PolyExp(0L)); }

  Kind kind() const { return kind_; }
  const PolyExp& lhs() const { return lhs_; }
  bool is_constant() const { return lhs_.is_constant(); }
  // Only meaningful when is_constant().
  bool constant_truth() const;
  bool holds(const Valuation& env) const;
  std::set<Var> vars() const { return lhs_.vars(); }
  Atom subst(const std::map<Var, PolyExp>& sigma) const { return {kind_, lhs_.subst(sigma)}; }
  Atom shift_n(std::int64_t k) const { return {kind_, lhs_.shift_n(k)}; }
  Atom instantiate_n(std::int64_t v) const { return {kind_, lhs_.instantiate_n(v)}; }
  // The negation as a disjunction of atoms (integer semantics).
  std::vector<Atom> negation() const;

  bool operator==(const Atom&) const = default;
  bool operator<(const Atom& other) const;
  std::string to_string() const;

 private:
  Kind kind_;
  PolyExp lhs_;
};

// Disjunction of atoms with set semantics; insertion order is kept for
// deterministic rendering and designated-atom choice.
class Clause {
 public:
  Clause() = default;
  Clause(std::initializer_list<Atom> atoms);
  explicit Clause(const std::vector<Atom>& atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  void add(const Atom& a);
  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }
  bool holds(const Valuation& env) const;
  std::set<Var> vars() const;
  template <typename F>
  Clause map(F&& f) const {
    Clause out;
    for (const auto& a : atoms_) out.add(f(a));
    return out;
  }

  bool operator==(const Clause& other) const;
  std::string to_string() const;

 private:
  std::vector<Atom> atoms_;
};

// Conjunction of clauses with set semantics. The empty conjunction is true.
class Formula {
 public:
  Formula() = default;
  Formula(std::initializer_list<Clause> clauses);
  explicit Formula(const std::vector<Clause>& clauses);
  static Formula of_atoms(const std::vector<Atom>& atoms);
  static Formula bottom();

  const std::vector<Clause>& clauses() const { return clauses_; }
  void add(const Clause& c);
  void add(const Atom& a) { add(Clause{a}); }
  void add(const Formula& f);
  bool remove(const Clause& c);
  bool contains(const Clause& c) const;
  bool is_top() const { return clauses_.empty(); }
  bool is_bottom() const;
  std::size_t size() const { return clauses_.size(); }
  bool holds(const Valuation& env) const;
  bool has_exponential() const;
  bool mentions(const Var& v) const;
  std::set<Var> vars() const;

  // Drops true atoms and satisfied clauses; an unsatisfiable constant clause
  // collapses the whole conjunction to bottom.
  Formula folded() const;
  template <typename F>
  Formula map_atoms(F&& f) const {
    Formula out;
    for (const auto& c : clauses_) out.add(c.map(f));
    return out;
  }
  Formula subst(const std::map<Var, PolyExp>& sigma) const {
    return map_atoms([&](const Atom& a) { return a.subst(sigma); });
  }

  // Set equality.
  bool operator==(const Formula& other) const;
  std::string to_string() const;

 private:
  std::vector<Clause> clauses_;
};

Formula conjunction(Formula a, const Formula& b);

std::string render_rational(const Rational& q);

}  // namespace loopaccel
