#ifndef LORENZCODE_RANDQ_HPP
#define LORENZCODE_RANDQ_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lorenzcode/oneway.hpp"

namespace lzc::randq {

constexpr double default_alpha = 0.01;
constexpr std::size_t monobit_min_bits = 2048;
constexpr std::size_t bytewise_min_bytes = 4096;

struct TestReport {
  std::string test_name;
  double statistic = 0.0; // see each test for what is reported
  double p_value = 0.0;
  bool pass = false; // p_value >= alpha
  std::size_t sample_bits = 0;
};

// Bits are always read MSB-first within each byte.

// Frequency test: statistic is s_obs = |#ones - #zeros| / sqrt(n),
// p = erfc(s_obs / sqrt(2)). Needs >= 2048 bits.
TestReport monobit(std::span<const std::uint8_t> bytes,
                   double alpha = default_alpha);

// Runs test (total runs vs expectation under the observed bias); statistic
// is the run count. Needs >= 2048 bits.
TestReport runs_test(std::span<const std::uint8_t> bytes,
                     double alpha = default_alpha);

// 256-bin chi-square on byte values, 255 degrees of freedom; statistic is
// X^2, p is the upper tail. Needs >= 4096 bytes.
TestReport chi_square_bytes(std::span<const std::uint8_t> bytes,
                            double alpha = default_alpha);

// Lag-1 serial correlation of the bit sequence; statistic is the Pearson
// coefficient r, p = erfc(|r|*sqrt(n-1)/sqrt(2)). A constant sequence is
// reported as r=1, p=0. Needs >= 4096 bytes.
TestReport serial_correlation(std::span<const std::uint8_t> bytes,
                              double alpha = default_alpha);

std::vector<TestReport> run_battery(std::span<const std::uint8_t> bytes,
                                    double alpha = default_alpha);

// The pinned scan generator: splitmix64. Deterministic, sequentially split
// from the seed; vectors are frozen in the tests.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  std::uint8_t next_byte() { return static_cast<std::uint8_t>(next() >> 56); }
  void fill(std::span<std::uint8_t> out);

private:
  std::uint64_t state_;
};

struct CollisionReport {
  std::size_t distinct_inputs = 0;
  std::size_t collisions = 0;
  std::vector<std::pair<oneway::KeyBlock, oneway::KeyBlock>> colliding_pairs;
};

// Hashes n distinct pseudorandom keys (deduplicated before hashing) and
// counts exact digest collisions. Deterministic for a given (base, n, seed);
// trials fan out over `threads`, aggregation is by index.
CollisionReport collision_scan(const oneway::BaseConfig& base, std::size_t n,
                               std::uint64_t seed, unsigned threads = 1);

struct AvalancheReport {
  std::size_t trials = 0;
  double mean_distance = 0.0;                 // of 256 bits
  std::array<double, 256> bit_flip_frequency{}; // per digest bit
};

// For each trial, flips one uniformly random bit of a random key and
// records which digest bits changed. Needs trials >= 100.
AvalancheReport avalanche_scan(const oneway::BaseConfig& base,
                               std::size_t trials, std::uint64_t seed,
                               unsigned threads = 1);

int hamming_distance(const oneway::Digest256& a, const oneway::Digest256& b);

} // namespace lzc::randq

#endif
