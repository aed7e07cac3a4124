#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace finchart {

/// Seeded deterministic random stream.
///
/// The engine is std::mt19937_64, whose output sequence is pinned by the
/// standard. The distribution helpers are implemented here instead of using
/// std::uniform_*_distribution, whose mapping from engine output to values is
/// implementation-defined and would break cross-platform reproducibility.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Unbiased integer in [lo, hi], inclusive, via rejection sampling.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Double in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Stable sub-seed for an independent stream, keyed by a label. Streams for
  /// different pipeline stages are derived this way so that changing one
  /// stage's target count leaves the other stage's draws untouched.
  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

 private:
  std::mt19937_64 engine_;
};

}  // namespace finchart
