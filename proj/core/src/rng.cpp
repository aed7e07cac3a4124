#include "finchart/rng.hpp"

#include "finchart/hash.hpp"

namespace finchart {

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo >= hi) return lo;
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % range;
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % range);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::derive_seed(std::uint64_t seed, std::string_view label) {
  const std::string key = std::to_string(seed) + "/" + std::string(label);
  return digest_to_u64(sha256(key));
}

}  // namespace finchart
