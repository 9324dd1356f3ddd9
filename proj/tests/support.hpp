#pragma once

#include <random>
#include <string>

#include "loopaccel/accel.hpp"
#include "loopaccel/closed_form.hpp"
#include "loopaccel/nonterm.hpp"
#include "loopaccel/oracle.hpp"

namespace testing_support {

using namespace loopaccel;

inline std::string corpus(const std::string& name) { return std::string(LOOPACCEL_CORPUS_DIR) + "/" + name; }
inline Loop corpus_loop(const std::string& name) { return load_loop(corpus(name + ".loop")); }

inline PolyExp V(const std::string& name) { return PolyExp(Var(name)); }
inline PolyExp N() { return PolyExp(kCounter); }
inline PolyExp Q(long p, long q = 1) { return PolyExp(Rational(p, q)); }

inline Formula conj(std::initializer_list<Atom> atoms) { return Formula::of_atoms(atoms); }

// Random polynomial over the given variables with small integer coefficients.
inline PolyExp random_poly(std::mt19937& rng, const std::vector<Var>& vars, unsigned max_deg = 2,
                           int terms = 3) {
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<unsigned> deg(0, max_deg);
  std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
  PolyExp out;
  for (int t = 0; t < terms; ++t) {
    PolyExp m(static_cast<long>(coef(rng)));
    unsigned d = deg(rng);
    for (unsigned i = 0; i < d; ++i) m *= PolyExp(vars[pick(rng)]);
    out += m;
  }
  return out;
}

inline Valuation random_env(std::mt19937& rng, const std::vector<Var>& vars, int lo = -6, int hi = 6) {
  std::uniform_int_distribution<int> val(lo, hi);
  Valuation env;
  for (const auto& v : vars) env[v] = Integer(val(rng));
  return env;
}

}  // namespace testing_support
