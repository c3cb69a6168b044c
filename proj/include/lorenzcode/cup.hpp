#ifndef LORENZCODE_CUP_HPP
#define LORENZCODE_CUP_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lorenzcode/lorenz.hpp"

namespace lzc::cup {

// Fit of the error law E(h) = A*h^m + B*h^(-1/2) at a fixed evaluation
// time: A collapses the truncation amplitude, B the round-off amplitude.
struct ErrorLawFit {
  double t_fixed = 0.0;
  double amp_trunc = 0.0; // A >= 0
  double amp_round = 0.0; // B >= 0
  int method_order = 4;
  double residual = 0.0; // RMS of fit minus measurement
};

// First crossing time of |x_p(t) - x_ref(t)| > delta, the measured maximum
// effective computation time at precision p.
struct MectEstimate {
  long precision_bits = 0;
  double mect = 0.0;
  double threshold = 1.0;
  double h_used = 0.0;
  long reference_precision = 0;
};

// Two-anchor model of mect-vs-precision: T(p) = T1 + chat*m*ln2*(p-p1)*m/(m+0.5).
struct MectModel {
  double chat = 0.0;
  int method_order = 4;
  std::vector<std::pair<long, double>> anchors; // (p, T)
};

constexpr double default_delta = 1.0;
constexpr double default_t_max = 300.0;

inline long reference_precision_for(long p) {
  return std::max(2 * p, p + 64);
}

// Runs the same trajectory at precision p and at reference_precision_for(p)
// with the identical step value h (h, params and initial are extended to the
// reference precision exactly, so the two runs solve the same dyadic-input
// problem and differ only in arithmetic precision). Crossing is sampled at
// every step. Throws MectHorizonError if no crossing happens by t_max.
MectEstimate measure_mect(const lorenz::Params& params,
                          const lorenz::State& initial, long precision_bits,
                          const mp::Real& h, double delta = default_delta,
                          double t_max = default_t_max);

// Solves the two-anchor form for chat and predicts T at target_p.
// Requires distinct anchor precisions and T2 > T1 (after ordering by p).
std::pair<MectModel, double> extrapolate_mect(const MectEstimate& a1,
                                              const MectEstimate& a2,
                                              long target_p,
                                              int method_order = 4);
double predict_mect(const MectModel& model, long target_p);

// Least-squares fit of (h, error) samples to A*h^m + B*h^(-1/2) with
// A,B >= 0. Needs >= 4 samples spanning at least one decade of h.
ErrorLawFit fit_error_law(const std::vector<std::pair<double, double>>& samples,
                          int method_order, double t_fixed);

// Closed-form minimizer h* = (B/(2mA))^(1/(m+0.5)) of the fitted curve.
double optimal_step(const ErrorLawFit& fit);

// Value of the fitted curve at h.
double error_law_value(const ErrorLawFit& fit, double h);

// One (h, error) sample for the error-law experiment: |x - x_ref| at fixed
// time t, where the reference runs at ref_precision with step ref_h.
struct ErrorSample {
  double h = 0.0;
  double error = 0.0;
};

// Measures |x(t_fixed) - x_ref(t_fixed)| for each step size in h_values
// (decimal strings, parsed at precision_bits). The reference orbit runs at
// ref_precision with step ref_h; t_fixed must be below the reference MECT.
std::vector<ErrorSample> measure_error_samples(
    const lorenz::SystemSource& system, long precision_bits,
    const std::string& t_fixed, const std::vector<std::string>& h_values,
    long ref_precision, const std::string& ref_h);

} // namespace lzc::cup

#endif
