#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "loopaccel/expr.hpp"
#include "loopaccel/loop.hpp"

namespace loopaccel {

class NonTriangular : public Error {
 public:
  NonTriangular(const std::string& what, std::vector<Var> cycle)
      : Error(what), cycle_(std::move(cycle)) {}
  const std::vector<Var>& cycle() const { return cycle_; }

 private:
  std::vector<Var> cycle_;
};

class UnsupportedRecurrence : public Error {
 public:
  using Error::Error;
};

// Component-wise closed form of the n-fold update, valid for every n >= 0.
struct ClosedForm {
  std::vector<Var> vars;
  std::map<Var, PolyExp> components;
  // Order in which components were solved (dependencies first).
  std::vector<Var> order;

  const PolyExp& of(const Var& v) const;
  // Closed form of a^(n+k).
  std::map<Var, PolyExp> shifted(std::int64_t k) const;
  Valuation eval(const Valuation& x, std::int64_t n) const;
};

// The y with y(0) = 0 and y(n+1) = c*y(n) + f(n) for all n >= 0.
PolyExp solve_linear_recurrence(std::int64_t c, const PolyExp& f);

// Closed form in n of sum_{k=0}^{n-1} q(k) * b^k. `index` names the
// summation variable inside q.
PolyExp sum_polyexp(const PolyExp& q, std::int64_t b, const Var& index = Var("k"));

ClosedForm solve_closed_form(const Loop& loop);

}  // namespace loopaccel
