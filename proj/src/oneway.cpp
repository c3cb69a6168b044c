#include "lorenzcode/oneway.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <cctype>

namespace lzc::oneway {

using lorenz::Params;
using lorenz::State;
using mp::Op;
using mp::Real;

void OneWayInput::validate() const {
  params.validate();
  initial.validate();
  if (params.precision() != precision_bits ||
      initial.precision() != precision_bits ||
      h.precision() != precision_bits || t.precision() != precision_bits)
    throw ConfigError("one-way input: mixed precisions");
  if (params.gamma < Real::from_long(28, precision_bits))
    throw ConfigError("one-way input: gamma must be >= 28 (chaotic regime)");
  if (t < Real::from_long(200, precision_bits))
    throw ConfigError("one-way input: t must be >= 200 (beyond-MECT regime)");
  if (h.sign() <= 0) throw ConfigError("one-way input: h must be > 0");
}

OneWayInput encode_key(const BaseConfig& base, const KeyBlock& k) {
  long p = base.precision_bits;
  Params params = base.system.params_at(p);
  State initial = base.system.initial_at(p);
  Real h = base.system.h.materialize(p);
  Real t = base.system.t.materialize(p);
  Real scale = base.h_perturb_scale.materialize(p);
  Real thousand = Real::from_long(1000, p);

  // Perturbation order pinned: delta = m/1000 (one rounded division), then
  // one rounded addition onto the base value.
  auto perturb = [&](const Real& v, std::uint8_t m) {
    return mp::add(v, mp::div(Real::from_long(m, p), thousand));
  };
  params.gamma = perturb(params.gamma, k[0]);
  params.sigma = perturb(params.sigma, k[1]);
  params.beta = perturb(params.beta, k[2]);
  initial.x = perturb(initial.x, k[3]);
  initial.y = perturb(initial.y, k[4]);
  initial.z = perturb(initial.z, k[5]);
  h = mp::add(h, mp::mul(Real::from_long(k[6], p), scale));
  t = mp::add(t, Real::from_long(k[7], p));

  OneWayInput input{std::move(params), std::move(initial), std::move(h),
                    std::move(t), p};
  input.validate();
  return input;
}

State one_way(const OneWayInput& input) {
  input.validate();
  lorenz::IntegrationSpec spec{input.params, input.initial, input.h, input.t,
                               input.precision_bits};
  return lorenz::integrate(spec);
}

Digest256 extract_digest(const State& s) {
  Digest256 out{};
  const Real& x = s.x;
  if (x.precision() < 256)
    throw DomainError("extract_digest: x must carry at least 256 bits, has " +
                      std::to_string(x.precision()));
  if (x.is_zero()) return out;

  // Significand as an integer in [2^(p-1), 2^p); its top 256 bits are the
  // digest, so the leading digest bit is the leading (always 1) bit of f.
  mpz_t z;
  mpz_init(z);
  mpfr_get_z_2exp(z, x.raw());
  mpz_abs(z, z);
  long p = x.precision();
  if (p > 256) mpz_tdiv_q_2exp(z, z, static_cast<mp_bitcnt_t>(p - 256));

  unsigned char bytes[32] = {0};
  std::size_t count = 0;
  mpz_export(bytes, &count, 1, 1, 0, 0, z);
  mpz_clear(z);
  // Normalized input means exactly 32 bytes, but align defensively.
  std::size_t offset = 32 - count;
  for (std::size_t i = 0; i < count; ++i) out[offset + i] = bytes[i];
  return out;
}

Digest256 hash8(const BaseConfig& base, const KeyBlock& k) {
  return extract_digest(one_way(encode_key(base, k)));
}

std::string to_hex(const Digest256& d) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (std::uint8_t b : d) {
    out += digits[b >> 4];
    out += digits[b & 0xf];
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

} // namespace

KeyBlock key_from_hex(std::string_view hex) {
  if (hex.size() != 16)
    throw ParseError("key must be exactly 16 hex chars, got " +
                     std::to_string(hex.size()));
  KeyBlock k{};
  for (std::size_t i = 0; i < 8; ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0)
      throw ParseError(std::string("invalid hex digit in key: '") +
                       std::string(hex) + "'");
    k[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return k;
}

KeyBlock key_from_ascii(std::string_view ascii) {
  if (ascii.size() != 8)
    throw ParseError("ASCII key must be exactly 8 chars, got " +
                     std::to_string(ascii.size()));
  KeyBlock k{};
  for (std::size_t i = 0; i < 8; ++i)
    k[i] = static_cast<std::uint8_t>(ascii[i]);
  return k;
}

std::string key_to_hex(const KeyBlock& k) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(16);
  for (std::uint8_t b : k) {
    out += digits[b >> 4];
    out += digits[b & 0xf];
  }
  return out;
}

} // namespace lzc::oneway
