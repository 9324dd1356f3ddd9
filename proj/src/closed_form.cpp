#include "loopaccel/closed_form.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace loopaccel {

const PolyExp& ClosedForm::of(const Var& v) const {
  auto it = components.find(v);
  if (it == components.end()) throw UnboundVariable("no closed form for " + v.name());
  return it->second;
}

std::map<Var, PolyExp> ClosedForm::shifted(std::int64_t k) const {
  std::map<Var, PolyExp> out;
  for (const auto& [v, e] : components) out.emplace(v, e.shift_n(k));
  return out;
}

Valuation ClosedForm::eval(const Valuation& x, std::int64_t n) const {
  Valuation env = x;
  env[kCounter] = Integer(static_cast<long>(n));
  Valuation out;
  for (const auto& v : vars) out[v] = of(v).eval(env);
  return out;
}

namespace {

Rational rpow(std::int64_t base, std::int64_t e) {
  Rational b(static_cast<long>(base));
  Rational out(1);
  bool inv = e < 0;
  for (std::int64_t i = 0; i < (inv ? -e : e); ++i) out *= b;
  return inv ? Rational(1) / out : out;
}

// Dense Gaussian elimination; the systems here are tiny and always regular.
std::vector<Rational> solve_system(std::vector<std::vector<Rational>> a, std::vector<Rational> rhs) {
  std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) throw UnsupportedRecurrence("singular ansatz system");
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / a[i][i];
  return x;
}

Rational ipow(const Rational& m, unsigned p) {
  Rational out(1);
  for (unsigned i = 0; i < p; ++i) out *= m;
  return out;
}

PolyExp poly_in_n(const std::vector<Rational>& coef, std::size_t offset = 0) {
  PolyExp out;
  PolyExp n(kCounter);
  for (std::size_t i = 0; i < coef.size(); ++i) out += PolyExp(coef[i]) * n.pow(static_cast<unsigned>(i + offset));
  return out;
}

// y(n+1) = c*y(n) + n^p * b^n, y(0) = 0, c != 0.
PolyExp solve_power_term(std::int64_t c, unsigned p, std::int64_t b) {
  PolyExp bn = PolyExp::exponential(b);
  if (b != c) {
    // y = r(n) b^n - r(0) c^n with b*r(m+1) - c*r(m) = m^p.
    std::vector<std::vector<Rational>> a(p + 1, std::vector<Rational>(p + 1));
    std::vector<Rational> rhs(p + 1);
    for (unsigned m = 0; m <= p; ++m) {
      for (unsigned i = 0; i <= p; ++i) {
        a[m][i] = Rational(static_cast<long>(b)) * ipow(Rational(m + 1), i) -
                  Rational(static_cast<long>(c)) * ipow(Rational(m), i);
      }
      rhs[m] = ipow(Rational(m), p);
    }
    auto r = solve_system(a, rhs);
    return poly_in_n(r) * bn - PolyExp(r[0]) * PolyExp::exponential(c);
  }
  // y = r(n) b^n with r(0) = 0 and b*(r(m+1) - r(m)) = m^p.
  std::vector<std::vector<Rational>> a(p + 1, std::vector<Rational>(p + 1));
  std::vector<Rational> rhs(p + 1);
  for (unsigned m = 0; m <= p; ++m) {
    for (unsigned i = 1; i <= p + 1; ++i) {
      a[m][i - 1] = Rational(static_cast<long>(b)) * (ipow(Rational(m + 1), i) - ipow(Rational(m), i));
    }
    rhs[m] = ipow(Rational(m), p);
  }
  auto r = solve_system(a, rhs);
  return poly_in_n(r, 1) * bn;
}

// y(n+1) = c*y(n) + [n=j], c != 0.
PolyExp solve_indicator_term(std::int64_t c, std::int64_t j) {
  PolyExp out = PolyExp(rpow(c, -1 - j)) * PolyExp::exponential(c);
  for (std::int64_t m = 0; m <= j; ++m) out -= PolyExp(rpow(c, m - 1 - j)) * PolyExp::indicator(m);
  return out;
}

}  // namespace

PolyExp solve_linear_recurrence(std::int64_t c, const PolyExp& f) {
  PolyExp y;
  if (c == 0) {
    PolyExp s = f.shift_n(-1);
    y = s - PolyExp::indicator(0) * s.instantiate_n(0);
  } else {
    for (const auto& [key, coef] : f.terms()) {
      PolyExp rest = PolyExp::term(coef, key.mono.without(kCounter));
      if (key.exp.indicator) {
        y += rest * solve_indicator_term(c, *key.exp.indicator);
      } else {
        y += rest * solve_power_term(c, key.mono.degree_in(kCounter), key.exp.base);
      }
    }
  }
  // Exact symbolic check of both the initial value and the recurrence.
  PolyExp residue = y.shift_n(1) - PolyExp(Rational(static_cast<long>(c))) * y - f;
  if (!y.instantiate_n(0).is_zero() || !residue.is_zero()) {
    throw UnsupportedRecurrence("recurrence solution failed its self-check: " + y.to_string());
  }
  return y;
}

PolyExp sum_polyexp(const PolyExp& q, std::int64_t b, const Var& index) {
  if (b == 0) throw UnsupportedRecurrence("summation base must be nonzero");
  if (q.has_exponential()) throw UnsupportedRecurrence("summand must be polynomial in the index");
  PolyExp f = q;
  if (!index.is_counter()) {
    if (q.mentions(kCounter)) throw UnsupportedRecurrence("summand mentions n besides the index");
    f = q.subst({{index, PolyExp(kCounter)}});
  }
  return solve_linear_recurrence(1, f * PolyExp::exponential(b));
}

namespace {

struct Split {
  std::int64_t coef = 0;
  PolyExp rest;
  std::set<Var> deps;
};

Split split_update(const Var& v, const PolyExp& rhs) {
  auto parts = rhs.coefficients_in(v);
  Split s;
  if (parts.size() > 2) {
    throw UnsupportedRecurrence("update of " + v.name() + " is nonlinear in " + v.name());
  }
  s.rest = parts.empty() ? PolyExp() : parts[0];
  if (parts.size() == 2) {
    if (!parts[1].is_constant()) {
      throw UnsupportedRecurrence("update of " + v.name() + " scales " + v.name() + " by a non-constant");
    }
    Rational c = parts[1].constant_value();
    if (c.get_den() != 1 || !c.get_num().fits_slong_p()) {
      throw UnsupportedRecurrence("self-coefficient of " + v.name() + " is not a machine integer");
    }
    s.coef = c.get_num().get_si();
  }
  s.deps = s.rest.vars();
  return s;
}

}  // namespace

ClosedForm solve_closed_form(const Loop& loop) {
  std::map<Var, Split> splits;
  for (const auto& v : loop.vars) splits.emplace(v, split_update(v, loop.update.of(v)));

  // Kahn's algorithm, ties broken by declaration order.
  std::vector<Var> order;
  std::set<Var> done;
  while (order.size() < loop.vars.size()) {
    bool progressed = false;
    for (const auto& v : loop.vars) {
      if (done.count(v)) continue;
      const auto& deps = splits.at(v).deps;
      if (std::all_of(deps.begin(), deps.end(), [&](const Var& w) { return done.count(w) > 0; })) {
        order.push_back(v);
        done.insert(v);
        progressed = true;
        break;
      }
    }
    if (progressed) continue;
    // Walk unresolved dependencies until a variable repeats.
    Var cur;
    for (const auto& v : loop.vars) {
      if (!done.count(v)) {
        cur = v;
        break;
      }
    }
    std::vector<Var> path;
    while (std::find(path.begin(), path.end(), cur) == path.end()) {
      path.push_back(cur);
      for (const auto& w : splits.at(cur).deps) {
        if (!done.count(w)) {
          cur = w;
          break;
        }
      }
    }
    std::vector<Var> cycle(std::find(path.begin(), path.end(), cur), path.end());
    std::ostringstream msg;
    msg << "update is not triangular; dependency cycle: ";
    for (const auto& w : cycle) msg << w.name() << " -> ";
    msg << cur.name() << " (general linear updates would need a Jordan normal form, which is not supported)";
    throw NonTriangular(msg.str(), cycle);
  }

  ClosedForm cf;
  cf.vars = loop.vars;
  cf.order = order;
  for (const auto& v : order) {
    const Split& s = splits.at(v);
    PolyExp inhom;
    try {
      inhom = s.rest.subst(cf.components);
    } catch (const UnsupportedComposition& e) {
      throw UnsupportedRecurrence(std::string("closed form of ") + v.name() + ": " + e.what());
    }
    PolyExp comp = PolyExp::exponential(s.coef) * PolyExp(v) + solve_linear_recurrence(s.coef, inhom);
    cf.components.emplace(v, std::move(comp));
  }
  return cf;
}

}  // namespace loopaccel
