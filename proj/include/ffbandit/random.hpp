#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace ffbandit {

/// Independent named streams derived from one trial seed.
enum class Stream : std::uint64_t {
  kPool = 1,
  kTheta = 2,
  kRewardNoise = 3,
  kFeedback = 4,
  kPolicy = 5,
  kSubset = 6,
};

std::uint64_t mix64(std::uint64_t x);

/// Hashes (seed, stream, a, b) into a fresh 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                          std::uint64_t b = 0);

/// Uniform double in [0, 1) that depends only on the key.
double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Standard normal draw that depends only on the key (Box-Muller).
double keyed_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Sequential pseudo-random source owned by a single trial.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ffbandit
