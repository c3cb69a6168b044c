#ifndef LORENZCODE_MP_REAL_HPP
#define LORENZCODE_MP_REAL_HPP

#include <mpfr.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lorenzcode/errors.hpp"

namespace lzc::mp {

// The arithmetic contract everything else is built on:
//
//   * binary significand of exactly `precision` bits, normalized;
//   * every operation returns the exact real result rounded to nearest,
//     ties to even, at the operands' precision;
//   * exact zero is canonical (positive);
//   * exponent range is [-2^30, 2^30]; crossing it raises NonFiniteError
//     instead of saturating;
//   * values are immutable through the value-returning API, so equal inputs
//     give bit-identical outputs on any platform and from any thread.
//
// Backed by MPFR, which provides correct rounding for +,-,*,/ at arbitrary
// precision. The wrapper pins the rounding mode, the exponent range, zero
// canonicalization, and the equal-precision requirement.

enum class Op { add, sub, mul, div };

constexpr long min_precision = 2;

// Decimal digits needed so that to_decimal/from_decimal round-trips
// bit-identically: ceil(p*log10(2)) + 2.
long decimal_digits_for(long precision_bits);

class Real {
public:
  // Zero at the given precision.
  explicit Real(long precision_bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  // Nearest p-bit value to the decimal literal (ties to even). Accepts
  // [+-]digits[.digits][(e|E)[+-]digits]; anything else is a ParseError.
  static Real from_decimal(std::string_view text, long precision_bits);

  // Nearest p-bit value to an integer (exact whenever |v| fits in p bits).
  static Real from_long(long v, long precision_bits);

  long precision() const noexcept;
  bool is_zero() const noexcept;
  int sign() const noexcept; // -1, 0, +1

  // Exact value comparison (legal across precisions; no rounding happens).
  int cmp(const Real& other) const noexcept;
  bool operator==(const Real& other) const noexcept { return cmp(other) == 0; }
  bool operator<(const Real& other) const noexcept { return cmp(other) < 0; }
  bool operator>(const Real& other) const noexcept { return cmp(other) > 0; }
  bool operator<=(const Real& other) const noexcept { return cmp(other) <= 0; }
  bool operator>=(const Real& other) const noexcept { return cmp(other) >= 0; }

  // Same value to a higher precision, exactly. new_bits >= precision().
  Real extended(long new_bits) const;

  // Nearest double (for reporting only; never feeds back into mp arithmetic).
  double to_double() const noexcept;

  // Decimal string with enough digits to round-trip (see decimal_digits_for).
  // Scientific form d.ddd...e<+/-exp>; exact zero prints "0".
  std::string to_decimal() const;

  // Diagnostic dump "s:<+/-> e:<exponent> m:<hex significand>" where the
  // significand is the p-bit integer in [2^(p-1), 2^p) and the value is
  // s * m * 2^(e-p). Zero prints "s:+ e:0 m:0". Used by golden-file tests.
  std::string debug_hex() const;

  // In-place variants for hot loops: *this must already have the operands'
  // precision; no allocation happens. Results are bit-identical to op().
  void assign_op(const Real& a, const Real& b, Op which);
  void assign(const Real& other); // same precision, exact copy

  mpfr_srcptr raw() const noexcept { return value_; }
  // Mutable access for library-internal MPFR calls (exact set_z/mul_ui
  // style operations). Ordinary arithmetic goes through op()/assign_op().
  mpfr_ptr raw() noexcept { return value_; }

private:
  mpfr_t value_;
};

// The basic operation a(op)b: exact result rounded to nearest-even at the
// shared precision. Mixing precisions is a DomainError; division by exact
// zero is a DomainError; leaving the exponent range is a NonFiniteError.
Real op(const Real& a, const Real& b, Op which);

inline Real add(const Real& a, const Real& b) { return op(a, b, Op::add); }
inline Real sub(const Real& a, const Real& b) { return op(a, b, Op::sub); }
inline Real mul(const Real& a, const Real& b) { return op(a, b, Op::mul); }
inline Real div(const Real& a, const Real& b) { return op(a, b, Op::div); }

// Strict left-to-right fold: ((v0 op0 v1) op1 v2) ... Requires
// ops.size() == values.size()-1 and uniform precision. Errors from a step
// are rethrown with the 0-based step index prepended.
Real compose(std::span<const Real> values, std::span<const Op> ops);

// Bitwise identity: equal precision, sign, exponent and significand.
bool bit_identical(const Real& a, const Real& b) noexcept;

// |a - b| as a double, computed exactly in mp then converted. Convenience
// for divergence measurements.
double abs_diff_double(const Real& a, const Real& b);

const char* op_name(Op which) noexcept;

} // namespace lzc::mp

#endif
