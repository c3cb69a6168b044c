#include "lorenzcode/lorenz.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <ostream>

namespace lzc::lorenz {

using mp::Op;
using mp::Real;

namespace {

void check_uniform(long a, long b, const char* what) {
  if (a != b)
    throw DomainError(std::string(what) + ": mixed precisions (" +
                      std::to_string(a) + " vs " + std::to_string(b) + ")");
}

// Derivative evaluation with a pinned operation sequence. out must not
// alias in. Exactly, left to right:
//   dx = (sigma*y) - (sigma*x)            [= -sigma*x + sigma*y]
//   dy = ((gamma*x) - y) - (x*z)
//   dz = (x*y) - (beta*z)
void rhs_into(const Params& p, const State& in, State& out, Real& tmp) {
  out.x.assign_op(p.sigma, in.y, Op::mul);
  tmp.assign_op(p.sigma, in.x, Op::mul);
  out.x.assign_op(out.x, tmp, Op::sub);

  out.y.assign_op(p.gamma, in.x, Op::mul);
  out.y.assign_op(out.y, in.y, Op::sub);
  tmp.assign_op(in.x, in.z, Op::mul);
  out.y.assign_op(out.y, tmp, Op::sub);

  out.z.assign_op(in.x, in.y, Op::mul);
  tmp.assign_op(p.beta, in.z, Op::mul);
  out.z.assign_op(out.z, tmp, Op::sub);
}

} // namespace

void Params::validate() const {
  check_uniform(sigma.precision(), gamma.precision(), "LorenzParams");
  check_uniform(sigma.precision(), beta.precision(), "LorenzParams");
}

void State::validate() const {
  check_uniform(x.precision(), y.precision(), "State3");
  check_uniform(x.precision(), z.precision(), "State3");
}

void IntegrationSpec::validate() const {
  params.validate();
  initial.validate();
  check_uniform(params.precision(), initial.precision(), "IntegrationSpec");
  check_uniform(params.precision(), h.precision(), "IntegrationSpec");
  check_uniform(params.precision(), t.precision(), "IntegrationSpec");
  check_uniform(params.precision(), precision_bits, "IntegrationSpec");
  if (h.sign() <= 0) throw DomainError("IntegrationSpec: h must be > 0");
  if (t.sign() < 0) throw DomainError("IntegrationSpec: t must be >= 0");
  if (method_order != 4)
    throw DomainError("IntegrationSpec: only method order 4 is implemented");
}

Real ParamSource::materialize(long precision_bits) const {
  if (const auto* dec = std::get_if<std::string>(&source))
    return Real::from_decimal(*dec, precision_bits);
  const auto& r = std::get<Ratio>(source);
  if (r.den == 0) throw DomainError("ParamSource ratio with zero denominator");
  return mp::div(Real::from_long(r.num, precision_bits),
                 Real::from_long(r.den, precision_bits));
}

std::string ParamSource::describe() const {
  if (const auto* dec = std::get_if<std::string>(&source)) return *dec;
  const auto& r = std::get<Ratio>(source);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

Params SystemSource::params_at(long p) const {
  return Params{sigma.materialize(p), gamma.materialize(p),
                beta.materialize(p)};
}

State SystemSource::initial_at(long p) const {
  return State{x0.materialize(p), y0.materialize(p), z0.materialize(p)};
}

IntegrationSpec SystemSource::spec_at(long p) const {
  return IntegrationSpec{params_at(p), initial_at(p), h.materialize(p),
                         t.materialize(p), p};
}

State rhs(const Params& params, const State& s) {
  params.validate();
  s.validate();
  check_uniform(params.precision(), s.precision(), "lorenz_rhs");
  long p = s.precision();
  State out{Real(p), Real(p), Real(p)};
  Real tmp(p);
  try {
    rhs_into(params, s, out, tmp);
  } catch (const NonFiniteError& e) {
    throw DivergedError(std::string("lorenz_rhs: ") + e.what(), 0);
  }
  return out;
}

// ---------------------------------------------------------------------
// Step planning
// ---------------------------------------------------------------------

StepPlan plan_steps(const mp::Real& t, const mp::Real& h) {
  check_uniform(t.precision(), h.precision(), "plan_steps");
  if (h.sign() <= 0) throw DomainError("plan_steps: h must be > 0");
  if (t.sign() < 0) throw DomainError("plan_steps: t must be >= 0");
  StepPlan plan;
  if (t.is_zero()) return plan;

  long p = h.precision();

  // Both t and h are dyadic rationals: t = Tm*2^a, h = Hm*2^b with Hm the
  // p-bit significand, so ulp(h) = 2^b. The quotient and residual are formed
  // exactly in integers.
  mpz_t tm, hm, q, r, lhs, rhs_;
  mpz_inits(tm, hm, q, r, lhs, rhs_, nullptr);
  mpfr_exp_t a = mpfr_get_z_2exp(tm, t.raw());
  mpfr_exp_t b = mpfr_get_z_2exp(hm, h.raw());

  if (a >= b)
    mpz_mul_2exp(tm, tm, static_cast<mp_bitcnt_t>(a - b));
  else
    mpz_mul_2exp(hm, hm, static_cast<mp_bitcnt_t>(b - a));

  // t/h = q + r/hm with 0 <= r < hm.
  mpz_fdiv_qr(q, r, tm, hm);
  if (!mpz_fits_ulong_p(q) || mpz_sgn(q) < 0) {
    mpz_clears(tm, hm, q, r, lhs, rhs_, nullptr);
    throw DomainError("plan_steps: t/h is out of range");
  }
  unsigned long n = mpz_get_ui(q);

  // Residual time is (r/hm)*h; the slop threshold is (n+1)*ulp(h).
  // residual >  slop  <=>  r*Hm > (n+1)*hm      (after dividing by 2^b)
  // h-residual <= slop <=> (hm-r)*Hm <= (n+1)*hm
  mpz_t habs;
  mpz_init(habs);
  mpfr_get_z_2exp(habs, h.raw());
  mpz_abs(habs, habs);

  mpz_mul(lhs, r, habs);              // r * Hm
  mpz_set_ui(rhs_, n + 1);
  mpz_mul(rhs_, rhs_, hm);            // (n+1) * hm

  bool has_partial = false;
  if (mpz_cmp(lhs, rhs_) > 0) {
    // Real residual. Unless it is within slop of a full step, in which case
    // the intent was n+1 exact steps.
    mpz_sub(lhs, hm, r);
    mpz_mul(lhs, lhs, habs);          // (hm - r) * Hm
    if (mpz_cmp(lhs, rhs_) <= 0) {
      n += 1;
    } else {
      has_partial = true;
    }
  }
  plan.full_steps = n;

  if (has_partial) {
    // Partial step = t - n*h, formed exactly in integers and rounded once.
    mpz_t vt, vh;
    mpz_inits(vt, vh, nullptr);
    mpfr_exp_t ea = mpfr_get_z_2exp(vt, t.raw());
    mpfr_exp_t eb = mpfr_get_z_2exp(vh, h.raw());
    mpfr_exp_t g = ea < eb ? ea : eb;
    mpz_mul_2exp(vt, vt, static_cast<mp_bitcnt_t>(ea - g));
    mpz_mul_2exp(vh, vh, static_cast<mp_bitcnt_t>(eb - g));
    mpz_mul_ui(vh, vh, n);
    mpz_sub(vt, vt, vh); // (t - n*h) / 2^g
    Real partial(p);
    mpfr_set_z_2exp(partial.raw(), vt, g, MPFR_RNDN);
    plan.partial = std::move(partial);
    mpz_clears(vt, vh, nullptr);
  }

  mpz_clears(tm, hm, q, r, lhs, rhs_, habs, nullptr);
  return plan;
}

// ---------------------------------------------------------------------
// Stepper
// ---------------------------------------------------------------------

struct Stepper::Workspace {
  State k1, k2, k3, k4, stage;
  Real tmp, sum, upd, two;

  explicit Workspace(long p)
      : k1{Real(p), Real(p), Real(p)},
        k2{Real(p), Real(p), Real(p)},
        k3{Real(p), Real(p), Real(p)},
        k4{Real(p), Real(p), Real(p)},
        stage{Real(p), Real(p), Real(p)},
        tmp(p),
        sum(p),
        upd(p),
        two(Real::from_long(2, p)) {}

  // stage = base + c*k, componentwise, pinned order.
  void make_stage(const State& base, const Real& c, const State& k) {
    tmp.assign_op(c, k.x, Op::mul);
    stage.x.assign_op(base.x, tmp, Op::add);
    tmp.assign_op(c, k.y, Op::mul);
    stage.y.assign_op(base.y, tmp, Op::add);
    tmp.assign_op(c, k.z, Op::mul);
    stage.z.assign_op(base.z, tmp, Op::add);
  }

  // out_c = base_c + h6 * (k1 + 2*k2 + 2*k3 + k4), pinned left-to-right.
  void combine(Real& out_c, const Real& base_c, const Real& h6,
               const Real& k1c, const Real& k2c, const Real& k3c,
               const Real& k4c) {
    tmp.assign_op(two, k2c, Op::mul);
    sum.assign_op(k1c, tmp, Op::add);
    tmp.assign_op(two, k3c, Op::mul);
    sum.assign_op(sum, tmp, Op::add);
    sum.assign_op(sum, k4c, Op::add);
    upd.assign_op(h6, sum, Op::mul);
    out_c.assign_op(base_c, upd, Op::add);
  }
};

Stepper::Stepper(Params params, State initial, mp::Real h)
    : params_(std::move(params)),
      state_(std::move(initial)),
      h_(std::move(h)),
      h_half_(params_.precision()),
      h_sixth_(params_.precision()) {
  params_.validate();
  state_.validate();
  check_uniform(params_.precision(), state_.precision(), "Stepper");
  check_uniform(params_.precision(), h_.precision(), "Stepper");
  if (h_.sign() <= 0) throw DomainError("Stepper: h must be > 0");
  long p = params_.precision();
  h_half_ = mp::div(h_, Real::from_long(2, p));
  h_sixth_ = mp::div(h_, Real::from_long(6, p));
  ws_ = new Workspace(p);
}

Stepper::~Stepper() { delete ws_; }

void Stepper::run_step(const Real& h_half, const Real& h_sixth,
                       const Real& h_full) {
  Workspace& w = *ws_;
  rhs_into(params_, state_, w.k1, w.tmp);
  w.make_stage(state_, h_half, w.k1);
  rhs_into(params_, w.stage, w.k2, w.tmp);
  w.make_stage(state_, h_half, w.k2);
  rhs_into(params_, w.stage, w.k3, w.tmp);
  w.make_stage(state_, h_full, w.k3);
  rhs_into(params_, w.stage, w.k4, w.tmp);
  w.combine(state_.x, state_.x, h_sixth, w.k1.x, w.k2.x, w.k3.x, w.k4.x);
  w.combine(state_.y, state_.y, h_sixth, w.k1.y, w.k2.y, w.k3.y, w.k4.y);
  w.combine(state_.z, state_.z, h_sixth, w.k1.z, w.k2.z, w.k3.z, w.k4.z);
}

void Stepper::step() {
  try {
    run_step(h_half_, h_sixth_, h_);
  } catch (const NonFiniteError& e) {
    throw DivergedError(std::string("integration diverged: ") + e.what(),
                        steps_);
  }
  ++steps_;
}

void Stepper::step_partial(const mp::Real& h_partial) {
  check_uniform(params_.precision(), h_partial.precision(), "step_partial");
  if (h_partial.sign() <= 0)
    throw DomainError("step_partial: step must be > 0");
  long p = params_.precision();
  Real ph_half = mp::div(h_partial, Real::from_long(2, p));
  Real ph_sixth = mp::div(h_partial, Real::from_long(6, p));
  try {
    run_step(ph_half, ph_sixth, h_partial);
  } catch (const NonFiniteError& e) {
    throw DivergedError(std::string("integration diverged: ") + e.what(),
                        steps_);
  }
  ++steps_;
}

State rk4_step(const Params& params, const State& s, const mp::Real& h) {
  Stepper stepper(params, s, h);
  stepper.step();
  return stepper.state();
}

State integrate(const IntegrationSpec& spec) {
  return integrate(spec, StepCallback());
}

State integrate(const IntegrationSpec& spec, const StepCallback& on_step) {
  spec.validate();
  StepPlan plan = plan_steps(spec.t, spec.h);
  Stepper stepper(spec.params, spec.initial, spec.h);
  for (std::uint64_t i = 0; i < plan.full_steps; ++i) {
    stepper.step();
    if (on_step) on_step(i + 1, stepper.state());
  }
  if (plan.partial) {
    stepper.step_partial(*plan.partial);
    if (on_step) on_step(plan.full_steps + 1, stepper.state());
  }
  return stepper.state();
}

void write_trajectory_csv(std::ostream& out, const IntegrationSpec& spec,
                          std::uint64_t every) {
  spec.validate();
  if (every == 0) throw DomainError("write_trajectory_csv: every must be >= 1");
  StepPlan plan = plan_steps(spec.t, spec.h);
  std::uint64_t total = plan.full_steps + (plan.partial ? 1 : 0);
  long p = spec.precision_bits;

  out << "t,x,y,z\n";
  out << "0," << spec.initial.x.to_decimal() << ','
      << spec.initial.y.to_decimal() << ',' << spec.initial.z.to_decimal()
      << '\n';

  Real t_i(p);
  integrate(spec, [&](std::uint64_t i, const State& s) {
    if (i % every != 0 && i != total) return;
    if (i <= plan.full_steps) {
      mpfr_mul_ui(t_i.raw(), spec.h.raw(),
                  static_cast<unsigned long>(i), MPFR_RNDN);
      out << t_i.to_decimal();
    } else {
      out << spec.t.to_decimal(); // partial step ends at exactly t
    }
    out << ',' << s.x.to_decimal() << ',' << s.y.to_decimal() << ','
        << s.z.to_decimal() << '\n';
  });
}

} // namespace lzc::lorenz
