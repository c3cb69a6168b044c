#include "lorenzcode/randq.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_set>

#include <boost/math/special_functions/gamma.hpp>

namespace lzc::randq {

using oneway::Digest256;
using oneway::KeyBlock;

namespace {

void require_bits(std::span<const std::uint8_t> bytes, const char* name) {
  if (bytes.size() * 8 < monobit_min_bits)
    throw DomainError(std::string(name) + ": sample too small, need at least " +
                      std::to_string(monobit_min_bits) + " bits");
}

void require_bytes(std::span<const std::uint8_t> bytes, const char* name) {
  if (bytes.size() < bytewise_min_bytes)
    throw DomainError(std::string(name) + ": sample too small, need at least " +
                      std::to_string(bytewise_min_bytes) + " bytes");
}

std::size_t count_ones(std::span<const std::uint8_t> bytes) {
  std::size_t ones = 0;
  for (std::uint8_t b : bytes) ones += std::popcount(b);
  return ones;
}

inline int bit_at(std::span<const std::uint8_t> bytes, std::size_t i) {
  return (bytes[i / 8] >> (7 - (i % 8))) & 1;
}

// Runs the per-trial map fn(i) on `threads` workers; results must be
// written by index so aggregation order does not matter.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

} // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void SplitMix64::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t v = next();
    for (int b = 7; b >= 0 && i < out.size(); --b)
      out[i++] = static_cast<std::uint8_t>(v >> (8 * b));
  }
}

TestReport monobit(std::span<const std::uint8_t> bytes, double alpha) {
  require_bits(bytes, "monobit");
  double n = static_cast<double>(bytes.size() * 8);
  double ones = static_cast<double>(count_ones(bytes));
  double s = std::abs(2.0 * ones - n) / std::sqrt(n);
  TestReport r;
  r.test_name = "monobit";
  r.statistic = s;
  r.p_value = std::erfc(s / std::sqrt(2.0));
  r.pass = r.p_value >= alpha;
  r.sample_bits = bytes.size() * 8;
  return r;
}

TestReport runs_test(std::span<const std::uint8_t> bytes, double alpha) {
  require_bits(bytes, "runs_test");
  std::size_t n = bytes.size() * 8;
  double pi = static_cast<double>(count_ones(bytes)) / static_cast<double>(n);

  TestReport r;
  r.test_name = "runs";
  r.sample_bits = n;

  // Frequency prerequisite: with a heavy bias the runs statistic is
  // meaningless; report a hard fail.
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n))) {
    r.statistic = 0.0;
    r.p_value = 0.0;
    r.pass = false;
    return r;
  }

  std::size_t runs = 1;
  int prev = bit_at(bytes, 0);
  for (std::size_t i = 1; i < n; ++i) {
    int b = bit_at(bytes, i);
    if (b != prev) ++runs;
    prev = b;
  }
  double nn = static_cast<double>(n);
  double v = static_cast<double>(runs);
  double expected = 2.0 * nn * pi * (1.0 - pi);
  double denom = 2.0 * std::sqrt(2.0 * nn) * pi * (1.0 - pi);
  r.statistic = v;
  r.p_value = std::erfc(std::abs(v - expected) / denom);
  r.pass = r.p_value >= alpha;
  return r;
}

TestReport chi_square_bytes(std::span<const std::uint8_t> bytes, double alpha) {
  require_bytes(bytes, "chi_square_bytes");
  std::array<std::size_t, 256> counts{};
  for (std::uint8_t b : bytes) ++counts[b];
  double expected = static_cast<double>(bytes.size()) / 256.0;
  double x2 = 0.0;
  for (std::size_t c : counts) {
    double d = static_cast<double>(c) - expected;
    x2 += d * d / expected;
  }
  TestReport r;
  r.test_name = "chi_square_bytes";
  r.statistic = x2;
  r.p_value = boost::math::gamma_q(255.0 / 2.0, x2 / 2.0);
  r.pass = r.p_value >= alpha;
  r.sample_bits = bytes.size() * 8;
  return r;
}

TestReport serial_correlation(std::span<const std::uint8_t> bytes,
                              double alpha) {
  require_bytes(bytes, "serial_correlation");
  std::size_t n = bytes.size() * 8;
  // Pearson correlation of (b_i, b_{i+1}) over the n-1 adjacent bit pairs.
  std::size_t pairs = n - 1;
  std::size_t sum_u = 0, sum_v = 0, sum_uv = 0;
  int prev = bit_at(bytes, 0);
  for (std::size_t i = 1; i < n; ++i) {
    int b = bit_at(bytes, i);
    sum_u += static_cast<std::size_t>(prev);
    sum_v += static_cast<std::size_t>(b);
    sum_uv += static_cast<std::size_t>(prev & b);
    prev = b;
  }
  double np = static_cast<double>(pairs);
  double mu = static_cast<double>(sum_u) / np;
  double mv = static_cast<double>(sum_v) / np;
  double cov = static_cast<double>(sum_uv) / np - mu * mv;
  double var_u = mu * (1.0 - mu);
  double var_v = mv * (1.0 - mv);

  TestReport r;
  r.test_name = "serial_correlation";
  r.sample_bits = n;
  if (var_u <= 0.0 || var_v <= 0.0) {
    // Constant sequence: perfectly predictable.
    r.statistic = 1.0;
    r.p_value = 0.0;
    r.pass = false;
    return r;
  }
  double corr = cov / std::sqrt(var_u * var_v);
  r.statistic = corr;
  r.p_value = std::erfc(std::abs(corr) * std::sqrt(np) / std::sqrt(2.0));
  r.pass = r.p_value >= alpha;
  return r;
}

std::vector<TestReport> run_battery(std::span<const std::uint8_t> bytes,
                                    double alpha) {
  return {monobit(bytes, alpha), runs_test(bytes, alpha),
          chi_square_bytes(bytes, alpha), serial_correlation(bytes, alpha)};
}

int hamming_distance(const Digest256& a, const Digest256& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d += std::popcount(static_cast<unsigned>(a[i] ^ b[i]));
  return d;
}

CollisionReport collision_scan(const oneway::BaseConfig& base, std::size_t n,
                               std::uint64_t seed, unsigned threads) {
  if (n < 1) throw DomainError("collision_scan: n must be >= 1");

  // Draw until n distinct keys; duplicates from the generator do not count.
  SplitMix64 rng(seed);
  std::vector<KeyBlock> keys;
  keys.reserve(n);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(n * 2);
  while (keys.size() < n) {
    std::uint64_t v = rng.next();
    if (!seen.insert(v).second) continue;
    KeyBlock k;
    for (int b = 0; b < 8; ++b)
      k[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(v >> (8 * (7 - b)));
    keys.push_back(k);
  }

  std::vector<Digest256> digests(n);
  parallel_for(n, threads,
               [&](std::size_t i) { digests[i] = oneway::hash8(base, keys[i]); });

  // Exact collision detection via sorted index order.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return digests[a] < digests[b];
  });

  CollisionReport report;
  report.distinct_inputs = n;
  for (std::size_t i = 1; i < n; ++i) {
    if (digests[order[i - 1]] == digests[order[i]]) {
      ++report.collisions;
      report.colliding_pairs.emplace_back(keys[order[i - 1]], keys[order[i]]);
    }
  }
  return report;
}

AvalancheReport avalanche_scan(const oneway::BaseConfig& base,
                               std::size_t trials, std::uint64_t seed,
                               unsigned threads) {
  if (trials < 100)
    throw DomainError("avalanche_scan: need at least 100 trials");

  // All trial inputs are drawn up front so the report only depends on
  // (base, trials, seed), not on scheduling.
  SplitMix64 rng(seed);
  std::vector<std::pair<KeyBlock, unsigned>> inputs;
  inputs.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    std::uint64_t v = rng.next();
    KeyBlock k;
    for (int b = 0; b < 8; ++b)
      k[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(v >> (8 * (7 - b)));
    unsigned bit = static_cast<unsigned>(rng.next() & 63);
    inputs.emplace_back(k, bit);
  }

  std::vector<int> distances(trials);
  std::vector<std::array<std::uint8_t, 32>> diffs(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    const auto& [key, bit] = inputs[i];
    KeyBlock flipped = key;
    flipped[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
    Digest256 a = oneway::hash8(base, key);
    Digest256 b = oneway::hash8(base, flipped);
    distances[i] = hamming_distance(a, b);
    for (std::size_t j = 0; j < 32; ++j) diffs[i][j] = a[j] ^ b[j];
  });

  AvalancheReport report;
  report.trials = trials;
  double sum = 0.0;
  std::array<std::size_t, 256> flips{};
  for (std::size_t i = 0; i < trials; ++i) {
    sum += distances[i];
    for (std::size_t bit = 0; bit < 256; ++bit)
      if ((diffs[i][bit / 8] >> (7 - (bit % 8))) & 1) ++flips[bit];
  }
  report.mean_distance = sum / static_cast<double>(trials);
  for (std::size_t bit = 0; bit < 256; ++bit)
    report.bit_flip_frequency[bit] =
        static_cast<double>(flips[bit]) / static_cast<double>(trials);
  return report;
}

} // namespace lzc::randq
