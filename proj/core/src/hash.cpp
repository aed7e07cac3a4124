#include "finchart/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace finchart {

Sha256Digest sha256(std::span<const std::uint8_t> data) {
  Sha256Digest digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != digest.size()) {
    throw std::runtime_error("sha256 digest failed");
  }
  return digest;
}

Sha256Digest sha256(std::string_view text) {
  return sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

std::string sha256_hex(std::span<const std::uint8_t> data) {
  const Sha256Digest digest = sha256(data);
  return to_hex(digest);
}

std::string sha256_hex(std::string_view text) {
  const Sha256Digest digest = sha256(text);
  return to_hex(digest);
}

std::string digest_to_letters(const Sha256Digest& digest, std::size_t length) {
  std::string out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const unsigned hi = digest[(2 * i) % digest.size()];
    const unsigned lo = digest[(2 * i + 1) % digest.size()];
    out.push_back(static_cast<char>('a' + (hi * 256u + lo) % 26u));
  }
  return out;
}

std::uint64_t digest_to_u64(const Sha256Digest& digest) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < 8; ++i) value = (value << 8) | digest[i];
  return value;
}

}  // namespace finchart
