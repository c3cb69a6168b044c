#ifndef LORENZCODE_LORENZ_HPP
#define LORENZCODE_LORENZ_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "lorenzcode/mp_real.hpp"

namespace lzc::lorenz {

// Coefficients of the Lorenz system
//   dx/dt = -sigma*x + sigma*y
//   dy/dt = gamma*x - y - x*z
//   dz/dt = x*y - beta*z
// All three share one precision.
struct Params {
  mp::Real sigma;
  mp::Real gamma;
  mp::Real beta;

  long precision() const { return sigma.precision(); }
  void validate() const; // finite by construction; checks uniform precision
};

struct State {
  mp::Real x;
  mp::Real y;
  mp::Real z;

  long precision() const { return x.precision(); }
  void validate() const;
};

struct IntegrationSpec {
  Params params;
  State initial;
  mp::Real h;        // time step, nondimensional time, > 0
  mp::Real t;        // end time, >= 0
  long precision_bits; // must match all mp values above
  int method_order = 4;

  void validate() const;
};

// A parameter that materializes at any requested precision: either a decimal
// literal or an exact small-integer ratio (beta's 8/3 stays a ratio so it is
// re-rounded per precision, never via a decimal detour).
struct ParamSource {
  struct Ratio {
    long num;
    long den;
  };
  std::variant<std::string, Ratio> source;

  ParamSource(std::string decimal) : source(std::move(decimal)) {}
  ParamSource(const char* decimal) : source(std::string(decimal)) {}
  ParamSource(long num, long den) : source(Ratio{num, den}) {}

  mp::Real materialize(long precision_bits) const;
  std::string describe() const;
};

// The base system of the experiments: sigma=10, gamma=28, beta=8/3,
// initial (5,5,10), h=0.01, t=200.
struct SystemSource {
  ParamSource sigma{"10"};
  ParamSource gamma{"28"};
  ParamSource beta{8, 3};
  ParamSource x0{"5"};
  ParamSource y0{"5"};
  ParamSource z0{"10"};
  ParamSource h{"0.01"};
  ParamSource t{"200"};

  Params params_at(long precision_bits) const;
  State initial_at(long precision_bits) const;
  IntegrationSpec spec_at(long precision_bits) const;
};

// Derivative vector of the system at s. Evaluation order is pinned, see
// the implementation; equal inputs give bit-identical outputs.
State rhs(const Params& params, const State& s);

// One classical RK4 update with step h. Fixed evaluation order.
State rk4_step(const Params& params, const State& s, const mp::Real& h);

// How t splits into steps of h: full_steps whole steps, then optionally one
// partial step. The quotient t/h is formed exactly (both are dyadic
// rationals); a residual below (full_steps+1) ulp(h) is representation noise
// from decimal inputs, not a real partial step, and is dropped — so t=1,
// h=0.01 takes exactly 100 full steps at any precision.
struct StepPlan {
  std::uint64_t full_steps = 0;
  std::optional<mp::Real> partial; // in (0, h) when present
};

StepPlan plan_steps(const mp::Real& t, const mp::Real& h);

// Stateful integrator: owns a preallocated workspace at the spec's
// precision, so stepping does not allocate. One instance is single-threaded;
// independent instances may run in parallel.
class Stepper {
public:
  Stepper(Params params, State initial, mp::Real h);
  ~Stepper();
  Stepper(const Stepper&) = delete;
  Stepper& operator=(const Stepper&) = delete;

  // Advance one step of h (or an explicit partial step). Throws
  // DivergedError if the state leaves the exponent range.
  void step();
  void step_partial(const mp::Real& h_partial);

  const State& state() const noexcept { return state_; }
  std::uint64_t steps_taken() const noexcept { return steps_; }
  long precision() const noexcept { return params_.precision(); }

private:
  struct Workspace;
  void run_step(const mp::Real& h_half, const mp::Real& h_sixth,
                const mp::Real& h_full);

  Params params_;
  State state_;
  mp::Real h_;
  mp::Real h_half_;
  mp::Real h_sixth_;
  std::uint64_t steps_ = 0;
  Workspace* ws_;
};

// Per-step observer; called after every completed step with the 1-based
// step index and the new state.
using StepCallback =
    std::function<void(std::uint64_t step_index, const State& s)>;

// Integrate spec.initial over [0, t]: plan_steps(t,h) full steps plus the
// partial step when one exists. Deterministic; repeated calls are
// bit-identical.
State integrate(const IntegrationSpec& spec);
State integrate(const IntegrationSpec& spec, const StepCallback& on_step);

// CSV dump "t,x,y,z" with decimal strings that round-trip at the spec's
// precision. Row 0 is the initial state; rows follow every `every` steps
// (and always the final state).
void write_trajectory_csv(std::ostream& out, const IntegrationSpec& spec,
                          std::uint64_t every = 1);

} // namespace lzc::lorenz

#endif
