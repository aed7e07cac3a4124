#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace finchart {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> data);
Sha256Digest sha256(std::string_view text);

std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// Maps a digest onto `length` lowercase letters a-z. Identifiers built this
/// way contain no digits, so they can never collide with a numeric ticker
/// code in a text scan.
std::string digest_to_letters(const Sha256Digest& digest, std::size_t length);

/// First eight digest bytes as a big-endian integer; used to derive
/// per-purpose seeds from the pipeline seed.
std::uint64_t digest_to_u64(const Sha256Digest& digest);

}  // namespace finchart
