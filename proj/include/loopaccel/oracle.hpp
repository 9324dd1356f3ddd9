#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "loopaccel/accel.hpp"
#include "loopaccel/nonterm.hpp"

namespace loopaccel {

class WitnessRejected : public Error {
 public:
  WitnessRejected(const std::string& what, std::size_t step) : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct RunTrace {
  std::vector<Valuation> states;
  std::size_t iterations = 0;

  const Valuation& final_state() const { return states.back(); }
};

// Iterates until the guard fails or max_steps updates were applied.
RunTrace run_loop(const Loop& loop, const Valuation& x0, std::size_t max_steps);
// n unguarded updates: states[k] = a^k(x0) for k = 0..n.
std::vector<Valuation> iterate(const Loop& loop, const Valuation& x0, std::size_t n);

struct Violation {
  Valuation x;
  std::int64_t n = 0;
  std::string expected;
  std::string got;
};

struct VerifyReport {
  std::string kind;
  std::size_t checked = 0;
  std::size_t soundness_count = 0;
  std::size_t exactness_count = 0;
  std::vector<Violation> soundness_violations;  // exemplars, capped
  std::vector<Violation> exactness_violations;
  // Certificates only: sampled models x with psi(x) but not psi(a(x)).
  std::size_t recurrence_count = 0;
  std::vector<Violation> recurrence_violations;
  std::int64_t box = 0;
  std::int64_t max_n = 0;
  std::size_t steps = 0;  // certificate simulation length
  std::size_t models = 0;

  bool sound() const { return soundness_count == 0; }
};

// All integer points of [-box, box]^d over the given variables.
std::vector<Valuation> grid(const std::vector<Var>& vars, std::int64_t box);

// Checks psi(x, n, a^n(x)) against the runs of <guard_part, a> from every
// grid point. Soundness: psi true but some guard check in steps 0..n-1
// failed. Exactness: run valid but psi false.
VerifyReport verify_formula(const Loop& loop, const Formula& psi, const Formula& guard_part, std::int64_t box,
                            std::int64_t max_n, std::size_t max_exemplars = 5);
VerifyReport verify_acceleration(const Loop& loop, const AccelResult& result, std::int64_t box,
                                 std::int64_t max_n);

// Simulates the witness and up to `extra_models` further models of the
// certificate for k steps and checks psi(x) => psi(a(x)) on each. Throws
// WitnessRejected if the witness itself leaves the guard.
VerifyReport verify_certificate(const Loop& loop, const Certificate& cert, std::size_t k, SmtClient& smt,
                                std::size_t extra_models = 10);

// eval(cf) against iteration on [-box, box]^d x [0, max_n].
VerifyReport check_closed_form(const Loop& loop, const ClosedForm& cf, std::int64_t box, std::int64_t max_n);

// Smaller box for wider loops: 3 up to three variables, 2 beyond.
std::int64_t default_box(std::size_t dimension);

}  // namespace loopaccel
