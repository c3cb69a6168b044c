#include "lorenzcode/cup.hpp"

#include <cmath>
#include <limits>

namespace lzc::cup {

using lorenz::Params;
using lorenz::State;
using lorenz::Stepper;
using mp::Real;

namespace {

Params extend_params(const Params& p, long bits) {
  return Params{p.sigma.extended(bits), p.gamma.extended(bits),
                p.beta.extended(bits)};
}

State extend_state(const State& s, long bits) {
  return State{s.x.extended(bits), s.y.extended(bits), s.z.extended(bits)};
}

} // namespace

MectEstimate measure_mect(const Params& params, const State& initial,
                          long precision_bits, const Real& h, double delta,
                          double t_max) {
  params.validate();
  initial.validate();
  if (params.precision() != precision_bits ||
      initial.precision() != precision_bits ||
      h.precision() != precision_bits)
    throw DomainError("measure_mect: inputs must be at precision p");
  if (params.gamma < Real::from_long(28, precision_bits))
    throw DomainError("measure_mect: chaotic regime requires gamma >= 28");
  if (!(delta > 0)) throw DomainError("measure_mect: delta must be > 0");
  if (!(t_max > 0)) throw DomainError("measure_mect: t_max must be > 0");

  long ref_bits = reference_precision_for(precision_bits);
  double h_d = h.to_double();
  auto max_steps = static_cast<std::uint64_t>(std::ceil(t_max / h_d));

  Stepper run(params, initial, h);
  Stepper ref(extend_params(params, ref_bits), extend_state(initial, ref_bits),
              h.extended(ref_bits));

  for (std::uint64_t i = 1; i <= max_steps; ++i) {
    run.step();
    ref.step();
    if (mp::abs_diff_double(run.state().x, ref.state().x) > delta) {
      MectEstimate est;
      est.precision_bits = precision_bits;
      est.mect = static_cast<double>(i) * h_d;
      est.threshold = delta;
      est.h_used = h_d;
      est.reference_precision = ref_bits;
      return est;
    }
  }
  throw MectHorizonError("no divergence above delta=" + std::to_string(delta) +
                             " before the horizon at p=" +
                             std::to_string(precision_bits),
                         t_max);
}

double predict_mect(const MectModel& model, long target_p) {
  if (model.anchors.empty()) throw FitError("predict_mect: empty model");
  const auto& [p1, t1] = model.anchors.front();
  double m = model.method_order;
  return t1 + model.chat * m * std::log(2.0) *
                  static_cast<double>(target_p - p1) * m / (m + 0.5);
}

std::pair<MectModel, double> extrapolate_mect(const MectEstimate& a1,
                                              const MectEstimate& a2,
                                              long target_p,
                                              int method_order) {
  const MectEstimate& lo = a1.precision_bits <= a2.precision_bits ? a1 : a2;
  const MectEstimate& hi = a1.precision_bits <= a2.precision_bits ? a2 : a1;
  if (lo.precision_bits == hi.precision_bits)
    throw FitError("extrapolate_mect: anchors must have distinct precisions");
  if (!(hi.mect > lo.mect))
    throw FitError("extrapolate_mect: T must increase with precision (T(" +
                   std::to_string(lo.precision_bits) + ")=" +
                   std::to_string(lo.mect) + ", T(" +
                   std::to_string(hi.precision_bits) + ")=" +
                   std::to_string(hi.mect) + ")");

  double m = method_order;
  double dp = static_cast<double>(hi.precision_bits - lo.precision_bits);
  // T2 - T1 = chat * m * ln2 * (p2-p1) * m/(m+0.5)
  double chat = (hi.mect - lo.mect) / (m * std::log(2.0) * dp * m / (m + 0.5));

  MectModel model;
  model.chat = chat;
  model.method_order = method_order;
  model.anchors = {{lo.precision_bits, lo.mect}, {hi.precision_bits, hi.mect}};
  return {model, predict_mect(model, target_p)};
}

ErrorLawFit fit_error_law(const std::vector<std::pair<double, double>>& samples,
                          int method_order, double t_fixed) {
  if (samples.size() < 4)
    throw FitError("fit_error_law: need at least 4 samples, got " +
                   std::to_string(samples.size()));
  double h_min = std::numeric_limits<double>::infinity();
  double h_max = 0.0;
  for (const auto& [h, e] : samples) {
    if (!(h > 0) || !(e >= 0) || !std::isfinite(e))
      throw FitError("fit_error_law: samples need h > 0 and finite error >= 0");
    h_min = std::min(h_min, h);
    h_max = std::max(h_max, h);
  }
  if (!(h_max / h_min >= 10.0))
    throw FitError("fit_error_law: samples must span at least one decade of h");

  // Linear least squares in (A, B) over basis {h^m, h^(-1/2)}.
  double m = method_order;
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (const auto& [h, e] : samples) {
    double f1 = std::pow(h, m);
    double f2 = 1.0 / std::sqrt(h);
    s11 += f1 * f1;
    s12 += f1 * f2;
    s22 += f2 * f2;
    b1 += f1 * e;
    b2 += f2 * e;
  }
  double det = s11 * s22 - s12 * s12;
  if (!(std::abs(det) > 0))
    throw FitError("fit_error_law: degenerate design matrix");

  double a = (b1 * s22 - b2 * s12) / det;
  double b = (s11 * b2 - s12 * b1) / det;
  // Nonnegativity: if the unconstrained optimum leaves the quadrant, the
  // constrained optimum lies on a boundary; take the better single-basis fit.
  if (a < 0 || b < 0) {
    double a_only = b1 / s11;
    double b_only = b2 / s22;
    a_only = std::max(a_only, 0.0);
    b_only = std::max(b_only, 0.0);
    double res_a = 0, res_b = 0;
    for (const auto& [h, e] : samples) {
      double da = a_only * std::pow(h, m) - e;
      double db = b_only / std::sqrt(h) - e;
      res_a += da * da;
      res_b += db * db;
    }
    if (res_a <= res_b) {
      a = a_only;
      b = 0.0;
    } else {
      a = 0.0;
      b = b_only;
    }
  }

  ErrorLawFit fit;
  fit.t_fixed = t_fixed;
  fit.amp_trunc = a;
  fit.amp_round = b;
  fit.method_order = method_order;
  double ss = 0;
  for (const auto& [h, e] : samples) {
    double d = error_law_value(fit, h) - e;
    ss += d * d;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(samples.size()));
  return fit;
}

double error_law_value(const ErrorLawFit& fit, double h) {
  return fit.amp_trunc * std::pow(h, fit.method_order) +
         fit.amp_round / std::sqrt(h);
}

double optimal_step(const ErrorLawFit& fit) {
  if (!(fit.amp_trunc > 0) || !(fit.amp_round > 0))
    throw DomainError(
        "optimal_step: no interior minimum unless both amplitudes are > 0");
  double m = fit.method_order;
  return std::pow(fit.amp_round / (2.0 * m * fit.amp_trunc), 1.0 / (m + 0.5));
}

std::vector<ErrorSample> measure_error_samples(
    const lorenz::SystemSource& system, long precision_bits,
    const std::string& t_fixed, const std::vector<std::string>& h_values,
    long ref_precision, const std::string& ref_h) {
  if (h_values.empty())
    throw DomainError("measure_error_samples: no step sizes given");
  if (ref_precision < precision_bits + 64)
    throw DomainError(
        "measure_error_samples: reference precision must exceed p by >= 64");

  // Reference value of x at t_fixed: high precision, tiny step.
  lorenz::IntegrationSpec ref_spec = system.spec_at(ref_precision);
  ref_spec.h = Real::from_decimal(ref_h, ref_precision);
  ref_spec.t = Real::from_decimal(t_fixed, ref_precision);
  State ref_state = lorenz::integrate(ref_spec);

  std::vector<ErrorSample> out;
  out.reserve(h_values.size());
  for (const auto& h_str : h_values) {
    lorenz::IntegrationSpec spec = system.spec_at(precision_bits);
    spec.h = Real::from_decimal(h_str, precision_bits);
    spec.t = Real::from_decimal(t_fixed, precision_bits);
    State s = lorenz::integrate(spec);
    ErrorSample sample;
    sample.h = spec.h.to_double();
    sample.error = mp::abs_diff_double(s.x, ref_state.x);
    out.push_back(sample);
  }
  return out;
}

} // namespace lzc::cup
