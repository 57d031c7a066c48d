#pragma once

#include <cstdint>
#include <string_view>

namespace qoc::rng {

/// SplitMix64 finalizer. Bijective mixing of a 64-bit word.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// FNV-1a hash of a byte string, used to turn names into stream labels.
std::uint64_t fnv1a64(std::string_view s) noexcept;

/// Derives an independent seed from a master seed and a (module, purpose)
/// label, so every consumer of randomness gets its own stream without
/// manual bookkeeping. Pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t master, std::string_view module,
                          std::string_view purpose) noexcept;

/// Inverse of the standard normal CDF via Acklam's rational approximation
/// (max relative error ~1.15e-9). Uses only +,-,*,/,sqrt,log, so results
/// are reproducible independent of libm quantile implementations.
double normal_quantile(double p);

/// Counter-based generator: draw i of stream (seed, stream) is
///
///   mix64(key + (i+1) * 0x9E3779B97F4A7C15),  key = mix64(seed) ^ mix64(stream+1)
///
/// i.e. SplitMix64 with a per-stream starting state. Every draw is a pure
/// function of (seed, stream, i); streams can be generated concurrently
/// and in any order with identical results.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform draw strictly inside (0,1): ((x >> 11) + 0.5) * 2^-53.
  double uniform01() noexcept;

  /// Uniform draw on [lo, hi).
  double uniform(double lo, double hi) noexcept;

  /// Standard normal via inverse-CDF transform of uniform01().
  double normal01() noexcept;

  /// Normal with the given mean and standard deviation.
  double normal(double mean, double sd) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qoc::rng
