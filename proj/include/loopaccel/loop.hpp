#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "loopaccel/expr.hpp"

namespace loopaccel {

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t col);
  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t line_;
  std::size_t col_;
};

class UndeclaredVariable : public Error {
 public:
  using Error::Error;
};

class NonPolynomialUpdate : public Error {
 public:
  using Error::Error;
};

class DisallowedConstruct : public Error {
 public:
  using Error::Error;
};

// Deterministic update x_i <- a_i(x). Right-hand sides are integer
// polynomials over the loop variables.
struct Update {
  std::map<Var, PolyExp> assignments;

  const PolyExp& of(const Var& v) const;
};

// Single-path loop `while guard do x <- update`. Every guard atom is `e > 0`.
struct Loop {
  std::vector<Var> vars;
  Formula guard;
  Update update;

  // Validates the invariants (declared variables, total update, polynomial
  // right-hand sides) and returns the loop.
  static Loop make(std::vector<Var> vars, Formula guard, Update update);

  bool guard_holds(const Valuation& state) const { return guard.holds(state); }
  Valuation step(const Valuation& state) const;
  std::size_t dimension() const { return vars.size(); }
  Loop with_guard(Formula g) const;
};

Loop parse_loop(std::string_view text);
// A polynomial over the given variables in the update syntax.
PolyExp parse_polynomial(std::string_view text, const std::vector<Var>& vars);
Loop load_loop(const std::string& path);
std::string render_loop(const Loop& loop);

// k-fold application of the update to every program variable.
PolyExp apply_update(const PolyExp& e, const Update& u, unsigned k);
Formula apply_update(const Formula& phi, const Update& u, unsigned k);

}  // namespace loopaccel
