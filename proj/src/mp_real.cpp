#include "lorenzcode/mp_real.hpp"

#include <gmp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace lzc::mp {

namespace {

// MPFR's exponent range and sticky flags are thread-local state. Every
// thread that touches mp arithmetic pins the documented range once.
constexpr long exp_range = 1L << 30;

void ensure_thread_setup() {
  thread_local const bool done = [] {
    mpfr_set_emin(-exp_range);
    mpfr_set_emax(exp_range);
    return true;
  }();
  (void)done;
}

void check_precision(long bits) {
  if (bits < min_precision)
    throw DomainError("precision must be at least " +
                      std::to_string(min_precision) + " bits, got " +
                      std::to_string(bits));
}

// -0 never escapes: every produced zero is the canonical +0.
void canonicalize_zero(mpfr_ptr x) {
  if (mpfr_zero_p(x) && mpfr_signbit(x)) mpfr_setsign(x, x, 0, MPFR_RNDN);
}

void check_range_flags(const char* what) {
  if (mpfr_overflow_p())
    throw NonFiniteError(std::string(what) + ": exponent overflow beyond 2^30");
  if (mpfr_underflow_p())
    throw NonFiniteError(std::string(what) +
                         ": exponent underflow beyond -2^30");
  if (mpfr_nanflag_p())
    throw NonFiniteError(std::string(what) + ": result is not a number");
}

// Shared core of op()/assign_op(). rop must have precision a.precision().
void run_op(mpfr_ptr rop, const Real& a, const Real& b, Op which) {
  if (a.precision() != b.precision())
    throw DomainError("mixed precisions in mp op: " +
                      std::to_string(a.precision()) + " vs " +
                      std::to_string(b.precision()));
  if (which == Op::div && b.is_zero())
    throw DomainError("division by exact zero");

  mpfr_clear_flags();
  switch (which) {
    case Op::add: mpfr_add(rop, a.raw(), b.raw(), MPFR_RNDN); break;
    case Op::sub: mpfr_sub(rop, a.raw(), b.raw(), MPFR_RNDN); break;
    case Op::mul: mpfr_mul(rop, a.raw(), b.raw(), MPFR_RNDN); break;
    case Op::div: mpfr_div(rop, a.raw(), b.raw(), MPFR_RNDN); break;
  }
  check_range_flags(op_name(which));
  canonicalize_zero(rop);
}

bool valid_decimal_literal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ++i;
    ++digits;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++digits;
    }
  }
  if (digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++exp_digits;
    }
    if (exp_digits == 0) return false;
  }
  return i == s.size();
}

} // namespace

long decimal_digits_for(long precision_bits) {
  return static_cast<long>(
             std::ceil(static_cast<double>(precision_bits) * std::log10(2.0))) +
         2;
}

const char* op_name(Op which) noexcept {
  switch (which) {
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::mul: return "mul";
    case Op::div: return "div";
  }
  return "?";
}

Real::Real(long precision_bits) {
  check_precision(precision_bits);
  ensure_thread_setup();
  mpfr_init2(value_, precision_bits);
  mpfr_set_zero(value_, +1);
}

Real::Real(const Real& other) {
  ensure_thread_setup();
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN); // exact: equal precision
}

Real::Real(Real&& other) noexcept {
  value_[0] = other.value_[0];
  mpfr_init2(other.value_, min_precision);
  mpfr_set_zero(other.value_, +1);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this != &other) {
    mpfr_swap(value_, other.value_);
  }
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

Real Real::from_decimal(std::string_view text, long precision_bits) {
  check_precision(precision_bits);
  ensure_thread_setup();
  if (!valid_decimal_literal(text))
    throw ParseError("malformed decimal literal: \"" + std::string(text) +
                     "\"");
  Real r(precision_bits);
  std::string buf(text);
  mpfr_clear_flags();
  char* end = nullptr;
  mpfr_strtofr(r.value_, buf.c_str(), &end, 10, MPFR_RNDN);
  if (end != buf.c_str() + buf.size())
    throw ParseError("malformed decimal literal: \"" + buf + "\"");
  check_range_flags("from_decimal");
  canonicalize_zero(r.value_);
  return r;
}

Real Real::from_long(long v, long precision_bits) {
  check_precision(precision_bits);
  ensure_thread_setup();
  Real r(precision_bits);
  mpfr_clear_flags();
  mpfr_set_si(r.value_, v, MPFR_RNDN);
  check_range_flags("from_long");
  canonicalize_zero(r.value_);
  return r;
}

long Real::precision() const noexcept { return mpfr_get_prec(value_); }

bool Real::is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }

int Real::sign() const noexcept { return mpfr_sgn(value_); }

int Real::cmp(const Real& other) const noexcept {
  return mpfr_cmp(value_, other.value_);
}

Real Real::extended(long new_bits) const {
  if (new_bits < precision())
    throw DomainError("extended() cannot reduce precision (" +
                      std::to_string(precision()) + " -> " +
                      std::to_string(new_bits) + ")");
  Real r(new_bits);
  mpfr_set(r.value_, value_, MPFR_RNDN); // exact: target is wider
  canonicalize_zero(r.value_);
  return r;
}

double Real::to_double() const noexcept {
  return mpfr_get_d(value_, MPFR_RNDN);
}

std::string Real::to_decimal() const {
  if (is_zero()) return "0";
  long digits = decimal_digits_for(precision());
  mpfr_exp_t exp10 = 0;
  char* s = mpfr_get_str(nullptr, &exp10, 10, static_cast<size_t>(digits),
                         value_, MPFR_RNDN);
  std::string raw(s);
  mpfr_free_str(s);

  std::string out;
  std::size_t i = 0;
  if (raw[0] == '-') {
    out += '-';
    i = 1;
  }
  out += raw[i];
  out += '.';
  out += raw.substr(i + 1);
  // mpfr's exp10 is relative to the 0.ddd form; scientific form shifts by one.
  long e = static_cast<long>(exp10) - 1;
  char tail[32];
  std::snprintf(tail, sizeof tail, "e%+ld", e);
  out += tail;
  return out;
}

std::string Real::debug_hex() const {
  if (is_zero()) return "s:+ e:0 m:0";
  mpz_t z;
  mpz_init(z);
  mpfr_exp_t e2 = mpfr_get_z_2exp(z, value_);
  long p = precision();
  // mpfr_get_z_2exp returns value = z * 2^e2 with |z| in [2^(p-1), 2^p).
  mpfr_exp_t e = e2 + p;
  mpz_abs(z, z);
  char* hex = mpz_get_str(nullptr, 16, z);
  std::string m(hex);
  std::free(hex);
  std::string pad(static_cast<size_t>((p + 3) / 4) - m.size(), '0');
  std::string out = "s:";
  out += (sign() < 0) ? '-' : '+';
  out += " e:" + std::to_string(static_cast<long>(e));
  out += " m:" + pad + m;
  mpz_clear(z);
  return out;
}

void Real::assign_op(const Real& a, const Real& b, Op which) {
  if (precision() != a.precision())
    throw DomainError("assign_op destination precision mismatch");
  run_op(value_, a, b, which);
}

void Real::assign(const Real& other) {
  if (precision() != other.precision())
    throw DomainError("assign precision mismatch");
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Real op(const Real& a, const Real& b, Op which) {
  Real r(a.precision());
  r.assign_op(a, b, which);
  return r;
}

Real compose(std::span<const Real> values, std::span<const Op> ops) {
  if (values.empty()) throw DomainError("compose needs at least one value");
  if (ops.size() != values.size() - 1)
    throw DomainError("compose needs len(ops) == len(values)-1, got " +
                      std::to_string(ops.size()) + " ops for " +
                      std::to_string(values.size()) + " values");
  Real acc = values[0];
  for (std::size_t i = 0; i < ops.size(); ++i) {
    try {
      acc = op(acc, values[i + 1], ops[i]);
    } catch (const DomainError& e) {
      throw DomainError("compose step " + std::to_string(i) + ": " + e.what());
    } catch (const NonFiniteError& e) {
      throw NonFiniteError("compose step " + std::to_string(i) + ": " +
                           e.what());
    }
  }
  return acc;
}

bool bit_identical(const Real& a, const Real& b) noexcept {
  if (a.precision() != b.precision()) return false;
  if (a.is_zero() || b.is_zero()) {
    // Zeros are canonical, so both must be exact +0.
    return a.is_zero() && b.is_zero();
  }
  return mpfr_equal_p(a.raw(), b.raw()) != 0 &&
         mpfr_signbit(a.raw()) == mpfr_signbit(b.raw());
}

double abs_diff_double(const Real& a, const Real& b) {
  mpfr_t d;
  mpfr_init2(d, std::max(a.precision(), b.precision()));
  mpfr_sub(d, a.raw(), b.raw(), MPFR_RNDN);
  mpfr_abs(d, d, MPFR_RNDN);
  double out = mpfr_get_d(d, MPFR_RNDN);
  mpfr_clear(d);
  return out;
}

} // namespace lzc::mp
