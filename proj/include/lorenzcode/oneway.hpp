#ifndef LORENZCODE_ONEWAY_HPP
#define LORENZCODE_ONEWAY_HPP

#include <array>
#include <cstdint>
#include <string>

#include "lorenzcode/lorenz.hpp"

namespace lzc::oneway {

// The 8-byte input message m1..m8.
using KeyBlock = std::array<std::uint8_t, 8>;

// 256-bit digest, 32 bytes, most-significant bit first.
using Digest256 = std::array<std::uint8_t, 32>;

// Base parameters of the one-way map plus the key-to-step perturbation
// scale. Defaults are gamma=28, sigma=10, beta=8/3, (5,5,10), h=0.01,
// p=256, t=200.
//
// h_perturb_scale defaults to 1e-5 so perturbed steps stay in
// [0.01, 0.01255], where RK4 on the Lorenz system is stable for every key.
// The literal m7/1000 rule reaches h=0.265 and blows up the integration for
// most keys; it remains available by setting the scale to 0.001.
struct BaseConfig {
  lorenz::SystemSource system;
  long precision_bits = 256;
  lorenz::ParamSource h_perturb_scale{"0.00001"};

  static BaseConfig defaults() { return BaseConfig{}; }
};

// The nine-tuple that determines the output vector: all mp values share
// precision_bits.
struct OneWayInput {
  lorenz::Params params;
  lorenz::State initial;
  mp::Real h;
  mp::Real t;
  long precision_bits;

  // gamma >= 28 (chaotic regime), t >= 200 (beyond-MECT regime), h > 0.
  void validate() const;
};

// Key-to-parameter encoding:
//   gamma' = gamma + m1/1000     sigma' = sigma + m2/1000
//   beta'  = beta  + m3/1000     x' = x0 + m4/1000
//   y'     = y0    + m5/1000     z' = z0 + m6/1000
//   h'     = h + m7*h_perturb_scale
//   t'     = t + m8
// All perturbation arithmetic in mp at the base precision. Injective over
// KeyBlock for a fixed base. Throws ConfigError if the result violates
// OneWayInput invariants.
OneWayInput encode_key(const BaseConfig& base, const KeyBlock& k);

// A = L(sigma,gamma,beta,h,p,t,x0,y0,z0): integrate and return the final
// state. Deterministic; bit-identical across runs and platforms.
lorenz::State one_way(const OneWayInput& input);

// First 256 bits of the normalized binary significand of x (|x| = f*2^e,
// f in [0.5,1)), sign and exponent discarded; MSB first. x must carry at
// least 256 bits of precision. Exact zero gives 32 zero bytes.
Digest256 extract_digest(const lorenz::State& s);

// extract_digest(one_way(encode_key(base, k))).
Digest256 hash8(const BaseConfig& base, const KeyBlock& k);

std::string to_hex(const Digest256& d);

// Exactly 16 hex chars -> 8 bytes. Throws ParseError otherwise.
KeyBlock key_from_hex(std::string_view hex);
// Exactly 8 ASCII chars -> 8 bytes.
KeyBlock key_from_ascii(std::string_view ascii);
std::string key_to_hex(const KeyBlock& k);

} // namespace lzc::oneway

#endif
