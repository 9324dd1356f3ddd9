#include "loopaccel/expr.hpp"

#include <algorithm>
#include <sstream>

namespace loopaccel {

namespace {

Rational rational_pow(std::int64_t base, std::int64_t exponent) {
  Integer b(static_cast<long>(base));
  Integer p;
  if (exponent >= 0) {
    mpz_pow_ui(p.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(exponent));
    return Rational(p);
  }
  mpz_pow_ui(p.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(-exponent));
  Rational r(Integer(1), p);
  r.canonicalize();
  return r;
}

Integer integer_pow(const Integer& base, unsigned long exponent) {
  Integer p;
  mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(), exponent);
  return p;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw UnsupportedComposition("exponential base overflows 64 bits");
  }
  return r;
}

}  // namespace

std::strong_ordering Var::operator<=>(const Var& other) const {
  if (auto c = rank() <=> other.rank(); c != 0) return c;
  return name_ <=> other.name_;
}

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::of(const Var& v, unsigned power) {
  Monomial m;
  if (power > 0) m.powers_.emplace_back(v, power);
  return m;
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (const auto& [v, p] : powers_) d += p;
  return d;
}

unsigned Monomial::degree_in(const Var& v) const {
  for (const auto& [w, p] : powers_) {
    if (w == v) return p;
  }
  return 0;
}

Monomial Monomial::without(const Var& v) const {
  Monomial m;
  for (const auto& vp : powers_) {
    if (!(vp.first == v)) m.powers_.push_back(vp);
  }
  return m;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial m;
  auto a = powers_.begin();
  auto b = other.powers_.begin();
  while (a != powers_.end() || b != other.powers_.end()) {
    if (b == other.powers_.end() || (a != powers_.end() && a->first < b->first)) {
      m.powers_.push_back(*a++);
    } else if (a == powers_.end() || b->first < a->first) {
      m.powers_.push_back(*b++);
    } else {
      m.powers_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  return m;
}

bool Monomial::render_less(const Monomial& a, const Monomial& b) {
  unsigned da = a.degree();
  unsigned db = b.degree();
  if (da != db) return da > db;
  std::size_t i = 0;
  for (; i < a.powers_.size() && i < b.powers_.size(); ++i) {
    const auto& [va, pa] = a.powers_[i];
    const auto& [vb, pb] = b.powers_[i];
    if (!(va == vb)) return va < vb;
    if (pa != pb) return pa > pb;
  }
  return false;
}

bool TermKeyLess::operator()(const TermKey& a, const TermKey& b) const {
  bool ia = a.exp.indicator.has_value();
  bool ib = b.exp.indicator.has_value();
  if (ia != ib) return !ia;
  if (Monomial::render_less(a.mono, b.mono)) return true;
  if (Monomial::render_less(b.mono, a.mono)) return false;
  bool ba = a.exp.base != 1;
  bool bb = b.exp.base != 1;
  if (ba != bb) return !ba;
  if (a.exp.base != b.exp.base) return a.exp.base < b.exp.base;
  if (ia) return *a.exp.indicator < *b.exp.indicator;
  return false;
}

// ---------------------------------------------------------------------------
// PolyExp

PolyExp::PolyExp(const Rational& value) {
  if (value != 0) terms_.emplace(TermKey{}, value);
}

PolyExp::PolyExp(const Var& v) { terms_.emplace(TermKey{Monomial::of(v), {}}, Rational(1)); }

PolyExp PolyExp::exponential(std::int64_t base) {
  if (base == 0) return indicator(0);
  PolyExp e;
  e.add_term(TermKey{Monomial(), ExpFactor{base, std::nullopt}}, Rational(1));
  return e;
}

PolyExp PolyExp::indicator(std::int64_t at) {
  PolyExp e;
  if (at >= 0) e.add_term(TermKey{Monomial(), ExpFactor{1, at}}, Rational(1));
  return e;
}

PolyExp PolyExp::term(const Rational& coef, Monomial mono, ExpFactor exp) {
  PolyExp e;
  e.add_term(TermKey{std::move(mono), exp}, coef);
  return e;
}

void PolyExp::add_term(const TermKey& raw, const Rational& raw_coef) {
  if (raw_coef == 0) return;
  TermKey key = raw;
  Rational coef = raw_coef;
  if (key.exp.base == 0) {
    throw std::logic_error("zero exponential base must be an indicator");
  }
  if (key.exp.indicator) {
    std::int64_t j = *key.exp.indicator;
    if (j < 0) return;
    unsigned pn = key.mono.degree_in(kCounter);
    if (pn > 0) {
      coef *= Rational(integer_pow(Integer(static_cast<long>(j)), pn));
      key.mono = key.mono.without(kCounter);
    }
    if (key.exp.base != 1) {
      coef *= rational_pow(key.exp.base, j);
      key.exp.base = 1;
    }
    if (coef == 0) return;
  }
  auto [it, inserted] = terms_.try_emplace(key, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0) terms_.erase(it);
  }
}

bool PolyExp::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == TermKey{});
}

Rational PolyExp::constant_term() const {
  auto it = terms_.find(TermKey{});
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational PolyExp::constant_value() const {
  if (!is_constant()) throw std::logic_error("expression is not constant: " + to_string());
  return constant_term();
}

bool PolyExp::has_exponential() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return !t.first.exp.is_one(); });
}

bool PolyExp::mentions(const Var& v) const {
  if (v.is_counter() && has_exponential()) return true;
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const auto& t) { return t.first.mono.degree_in(v) > 0; });
}

std::set<Var> PolyExp::vars() const {
  std::set<Var> out;
  for (const auto& [key, coef] : terms_) {
    for (const auto& [v, p] : key.mono.powers()) out.insert(v);
    if (!key.exp.is_one()) out.insert(kCounter);
  }
  return out;
}

unsigned PolyExp::degree_in(const Var& v) const {
  unsigned d = 0;
  for (const auto& [key, coef] : terms_) d = std::max(d, key.mono.degree_in(v));
  return d;
}

unsigned PolyExp::total_degree() const {
  unsigned d = 0;
  for (const auto& [key, coef] : terms_) d = std::max(d, key.mono.degree());
  return d;
}

bool PolyExp::has_integer_coefficients() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.second.get_den() == 1; });
}

Integer PolyExp::denominator_lcm() const {
  Integer l = 1;
  for (const auto& [key, coef] : terms_) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), coef.get_den_mpz_t());
  }
  return l;
}

PolyExp PolyExp::operator-() const { return scaled(Rational(-1)); }

PolyExp& PolyExp::operator+=(const PolyExp& other) {
  for (const auto& [key, coef] : other.terms_) add_term(key, coef);
  return *this;
}

PolyExp& PolyExp::operator-=(const PolyExp& other) {
  for (const auto& [key, coef] : other.terms_) add_term(key, -coef);
  return *this;
}

PolyExp& PolyExp::operator*=(const PolyExp& other) {
  PolyExp out;
  for (const auto& [ka, ca] : terms_) {
    for (const auto& [kb, cb] : other.terms_) {
      ExpFactor exp;
      if (ka.exp.indicator && kb.exp.indicator && *ka.exp.indicator != *kb.exp.indicator) continue;
      exp.indicator = ka.exp.indicator ? ka.exp.indicator : kb.exp.indicator;
      exp.base = checked_mul(ka.exp.base, kb.exp.base);
      out.add_term(TermKey{ka.mono * kb.mono, exp}, ca * cb);
    }
  }
  terms_ = std::move(out.terms_);
  return *this;
}

PolyExp PolyExp::pow(unsigned k) const {
  PolyExp result(1L);
  PolyExp base = *this;
  while (k > 0) {
    if (k & 1u) result *= base;
    k >>= 1u;
    if (k > 0) base *= base;
  }
  return result;
}

PolyExp PolyExp::scaled(const Rational& factor) const {
  PolyExp out;
  if (factor == 0) return out;
  for (const auto& [key, coef] : terms_) out.terms_.emplace(key, coef * factor);
  return out;
}

Rational PolyExp::eval_rational(const Valuation& env) const {
  Rational sum = 0;
  std::optional<Integer> n_value;
  auto counter = [&]() -> const Integer& {
    if (!n_value) {
      auto it = env.find(kCounter);
      if (it == env.end()) throw UnboundVariable("unbound variable n");
      n_value = it->second;
    }
    return *n_value;
  };
  for (const auto& [key, coef] : terms_) {
    Rational value = coef;
    for (const auto& [v, p] : key.mono.powers()) {
      auto it = env.find(v);
      if (it == env.end()) throw UnboundVariable("unbound variable " + v.name());
      value *= Rational(integer_pow(it->second, p));
    }
    if (key.exp.indicator) {
      if (counter() != *key.exp.indicator) value = 0;
    } else if (key.exp.base != 1) {
      const Integer& n = counter();
      if (!n.fits_slong_p()) throw Error("counter value out of range");
      value *= rational_pow(key.exp.base, n.get_si());
    }
    sum += value;
  }
  return sum;
}

Integer PolyExp::eval(const Valuation& env) const {
  Rational r = eval_rational(env);
  if (r.get_den() != 1) {
    throw NonIntegerResult("expression " + to_string() + " evaluates to " + render_rational(r));
  }
  return r.get_num();
}

PolyExp PolyExp::subst(const std::map<Var, PolyExp>& sigma) const {
  if (sigma.count(kCounter) != 0) {
    throw UnsupportedComposition("the counter n cannot be substituted; use shift_n");
  }
  std::map<std::pair<Var, unsigned>, PolyExp> powers;
  auto power_of = [&](const Var& v, unsigned p) -> const PolyExp& {
    auto key = std::make_pair(v, p);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    auto s = sigma.find(v);
    PolyExp base = s == sigma.end() ? PolyExp(v) : s->second;
    return powers.emplace(key, base.pow(p)).first->second;
  };
  PolyExp out;
  for (const auto& [key, coef] : terms_) {
    PolyExp t = term(coef, Monomial(), key.exp);
    for (const auto& [v, p] : key.mono.powers()) t *= power_of(v, p);
    out += t;
  }
  return out;
}

PolyExp PolyExp::shift_n(std::int64_t k) const {
  if (k == 0) return *this;
  PolyExp n_plus_k = PolyExp(kCounter) + PolyExp(Rational(static_cast<long>(k)));
  PolyExp out;
  for (const auto& [key, coef] : terms_) {
    ExpFactor exp = key.exp;
    Rational c = coef;
    if (exp.indicator) {
      exp.indicator = *exp.indicator - k;
      if (*exp.indicator < 0) continue;
    } else if (exp.base != 1) {
      c *= rational_pow(exp.base, k);
    }
    unsigned pn = key.mono.degree_in(kCounter);
    PolyExp t = term(c, key.mono.without(kCounter), exp);
    if (pn > 0) t *= n_plus_k.pow(pn);
    out += t;
  }
  return out;
}

PolyExp PolyExp::instantiate_n(std::int64_t value) const {
  PolyExp out;
  for (const auto& [key, coef] : terms_) {
    Rational c = coef;
    if (key.exp.indicator) {
      if (*key.exp.indicator != value) continue;
    } else if (key.exp.base != 1) {
      c *= rational_pow(key.exp.base, value);
    }
    unsigned pn = key.mono.degree_in(kCounter);
    if (pn > 0) c *= Rational(integer_pow(Integer(static_cast<long>(value)), pn));
    out.add_term(TermKey{key.mono.without(kCounter), {}}, c);
  }
  return out;
}

std::vector<PolyExp> PolyExp::coefficients_in(const Var& v) const {
  std::vector<PolyExp> out(degree_in(v) + 1);
  for (const auto& [key, coef] : terms_) {
    unsigned p = key.mono.degree_in(v);
    out[p].add_term(TermKey{key.mono.without(v), key.exp}, coef);
  }
  return out;
}

std::string render_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string PolyExp::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [key, coef] : terms_) {
    std::vector<std::string> factors;
    for (const auto& [v, p] : key.mono.powers()) {
      factors.push_back(p == 1 ? v.name() : v.name() + "^" + std::to_string(p));
    }
    if (key.exp.base != 1) {
      factors.push_back(key.exp.base < 0 ? "(" + std::to_string(key.exp.base) + ")^n"
                                         : std::to_string(key.exp.base) + "^n");
    }
    if (key.exp.indicator) factors.push_back("[n=" + std::to_string(*key.exp.indicator) + "]");
    Rational mag = abs(coef);
    bool negative = coef < 0;
    std::string body;
    for (std::size_t i = 0; i < factors.size(); ++i) body += (i ? "*" : "") + factors[i];
    std::string text;
    if (factors.empty()) {
      text = render_rational(mag);
    } else if (mag == 1) {
      text = body;
    } else {
      text = render_rational(mag) + "*" + body;
    }
    if (first) {
      out << (negative ? "-" : "") << text;
    } else {
      out << (negative ? " - " : " + ") << text;
    }
    first = false;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Atom

Atom::Atom(Kind kind, PolyExp lhs) : kind_(kind), lhs_(std::move(lhs)) {
  if (kind_ == Kind::Eq0 && !lhs_.is_zero()) {
    // Scale to primitive integer coefficients with a positive leading term.
    Rational factor(lhs_.denominator_lcm());
    PolyExp scaled = lhs_.scaled(factor);
    Integer g = 0;
    for (const auto& [key, coef] : scaled.terms()) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), coef.get_num_mpz_t());
    }
    Rational div(Integer(1), g);
    if (scaled.terms().begin()->second < 0) div = -div;
    lhs_ = scaled.scaled(div);
  }
}

Atom Atom::ge(const PolyExp& a, const PolyExp& b) {
  PolyExp d = a - b;
  return gt0(d.scaled(Rational(d.denominator_lcm())) + PolyExp(1L));
}

bool Atom::constant_truth() const {
  Rational c = lhs_.constant_value();
  return kind_ == Kind::Gt0 ? c > 0 : c == 0;
}

bool Atom::holds(const Valuation& env) const {
  Rational v = lhs_.eval_rational(env);
  return kind_ == Kind::Gt0 ? v > 0 : v == 0;
}

std::vector<Atom> Atom::negation() const {
  PolyExp scaled = lhs_.scaled(Rational(lhs_.denominator_lcm()));
  if (kind_ == Kind::Gt0) return {gt0(PolyExp(1L) - scaled)};
  return {gt0(scaled), gt0(-scaled)};
}

bool Atom::operator<(const Atom& other) const {
  if (kind_ != other.kind_) return kind_ < other.kind_;
  return lhs_.to_string() < other.lhs_.to_string();
}

std::string Atom::to_string() const {
  return lhs_.to_string() + (kind_ == Kind::Gt0 ? " > 0" : " == 0");
}

// ---------------------------------------------------------------------------
// Clause / Formula

Clause::Clause(std::initializer_list<Atom> atoms) {
  for (const auto& a : atoms) add(a);
}

Clause::Clause(const std::vector<Atom>& atoms) {
  for (const auto& a : atoms) add(a);
}

void Clause::add(const Atom& a) {
  if (std::find(atoms_.begin(), atoms_.end(), a) == atoms_.end()) atoms_.push_back(a);
}

bool Clause::holds(const Valuation& env) const {
  return std::any_of(atoms_.begin(), atoms_.end(), [&](const Atom& a) { return a.holds(env); });
}

std::set<Var> Clause::vars() const {
  std::set<Var> out;
  for (const auto& a : atoms_) {
    auto vs = a.vars();
    out.insert(vs.begin(), vs.end());
  }
  return out;
}

bool Clause::operator==(const Clause& other) const {
  if (atoms_.size() != other.atoms_.size()) return false;
  return std::all_of(atoms_.begin(), atoms_.end(), [&](const Atom& a) {
    return std::find(other.atoms_.begin(), other.atoms_.end(), a) != other.atoms_.end();
  });
}

std::string Clause::to_string() const {
  if (atoms_.empty()) return "false";
  if (atoms_.size() == 1) return atoms_.front().to_string();
  std::string out = "(";
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    out += (i ? " || " : "") + atoms_[i].to_string();
  }
  return out + ")";
}

Formula::Formula(std::initializer_list<Clause> clauses) {
  for (const auto& c : clauses) add(c);
}

Formula::Formula(const std::vector<Clause>& clauses) {
  for (const auto& c : clauses) add(c);
}

Formula Formula::of_atoms(const std::vector<Atom>& atoms) {
  Formula f;
  for (const auto& a : atoms) f.add(a);
  return f;
}

Formula Formula::bottom() { return Formula{Clause{Atom::falsum()}}; }

void Formula::add(const Clause& c) {
  if (!contains(c)) clauses_.push_back(c);
}

void Formula::add(const Formula& f) {
  for (const auto& c : f.clauses_) add(c);
}

bool Formula::remove(const Clause& c) {
  auto it = std::find(clauses_.begin(), clauses_.end(), c);
  if (it == clauses_.end()) return false;
  clauses_.erase(it);
  return true;
}

bool Formula::contains(const Clause& c) const {
  return std::find(clauses_.begin(), clauses_.end(), c) != clauses_.end();
}

bool Formula::is_bottom() const {
  return std::any_of(clauses_.begin(), clauses_.end(), [](const Clause& c) {
    return std::all_of(c.atoms().begin(), c.atoms().end(),
                       [](const Atom& a) { return a.is_constant() && !a.constant_truth(); });
  });
}

bool Formula::holds(const Valuation& env) const {
  return std::all_of(clauses_.begin(), clauses_.end(),
                     [&](const Clause& c) { return c.holds(env); });
}

bool Formula::has_exponential() const {
  for (const auto& c : clauses_) {
    for (const auto& a : c.atoms()) {
      if (a.lhs().has_exponential()) return true;
    }
  }
  return false;
}

bool Formula::mentions(const Var& v) const {
  for (const auto& c : clauses_) {
    for (const auto& a : c.atoms()) {
      if (a.lhs().mentions(v)) return true;
    }
  }
  return false;
}

std::set<Var> Formula::vars() const {
  std::set<Var> out;
  for (const auto& c : clauses_) {
    auto vs = c.vars();
    out.insert(vs.begin(), vs.end());
  }
  return out;
}

Formula Formula::folded() const {
  Formula out;
  for (const auto& c : clauses_) {
    Clause kept;
    bool satisfied = false;
    for (const auto& a : c.atoms()) {
      if (a.is_constant()) {
        if (a.constant_truth()) {
          satisfied = true;
          break;
        }
        continue;
      }
      kept.add(a);
    }
    if (satisfied) continue;
    if (kept.empty()) return bottom();
    out.add(kept);
  }
  return out;
}

bool Formula::operator==(const Formula& other) const {
  if (clauses_.size() != other.clauses_.size()) return false;
  return std::all_of(clauses_.begin(), clauses_.end(),
                     [&](const Clause& c) { return other.contains(c); });
}

std::string Formula::to_string() const {
  if (clauses_.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    out += (i ? " && " : "") + clauses_[i].to_string();
  }
  return out;
}

Formula conjunction(Formula a, const Formula& b) {
  a.add(b);
  return a;
}

}  // namespace loopaccel
