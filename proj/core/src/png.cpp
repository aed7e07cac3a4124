#include "finchart/png.hpp"

#include <zlib.h>

#include <cstring>
#include <stdexcept>

#include "finchart/errors.hpp"

namespace finchart {

namespace {

constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

// Pinned so identical pixels always produce identical bytes, independent of
// the zlib default that Z_DEFAULT_COMPRESSION maps to.
constexpr int kZlibLevel = 6;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               std::span<const std::uint8_t> data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = static_cast<std::uint32_t>(
      ::crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
  put_u32(out, crc);
}

std::uint32_t read_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Canvas& canvas) {
  const int width = canvas.width();
  const int height = canvas.height();
  const std::size_t stride = static_cast<std::size_t>(width) * 3;

  // Raw scanlines, each prefixed with filter byte 0 (None).
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(height) * (stride + 1));
  const std::vector<std::uint8_t>& pixels = canvas.pixels();
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = pixels.data() + static_cast<std::size_t>(y) * stride;
    raw.insert(raw.end(), row, row + stride);
  }

  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(compressed_size);
  const int rc = ::compress2(compressed.data(), &compressed_size, raw.data(),
                             static_cast<uLong>(raw.size()), kZlibLevel);
  if (rc != Z_OK) throw RenderBackendFailure("zlib compress2 failed");
  compressed.resize(compressed_size);

  std::vector<std::uint8_t> out;
  out.reserve(compressed.size() + 128);
  out.insert(out.end(), kSignature, kSignature + 8);

  std::uint8_t ihdr[13];
  ihdr[0] = static_cast<std::uint8_t>(width >> 24);
  ihdr[1] = static_cast<std::uint8_t>(width >> 16);
  ihdr[2] = static_cast<std::uint8_t>(width >> 8);
  ihdr[3] = static_cast<std::uint8_t>(width);
  ihdr[4] = static_cast<std::uint8_t>(height >> 24);
  ihdr[5] = static_cast<std::uint8_t>(height >> 16);
  ihdr[6] = static_cast<std::uint8_t>(height >> 8);
  ihdr[7] = static_cast<std::uint8_t>(height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // color type: truecolor
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter method
  ihdr[12] = 0;  // interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", {});
  return out;
}

std::optional<PngInfo> probe_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 + 25 + 12) return std::nullopt;  // signature + IHDR + IEND
  if (std::memcmp(bytes.data(), kSignature, 8) != 0) return std::nullopt;

  PngInfo info;
  std::size_t pos = 8;
  bool saw_ihdr = false;
  bool saw_iend = false;
  while (pos + 12 <= bytes.size()) {
    const std::uint32_t length = read_u32(bytes, pos);
    if (length > bytes.size() || pos + 12 + length > bytes.size()) return std::nullopt;
    const std::uint8_t* type = bytes.data() + pos + 4;
    const std::uint32_t stored_crc = read_u32(bytes, pos + 8 + length);
    const auto actual_crc =
        static_cast<std::uint32_t>(::crc32(0, type, static_cast<uInt>(4 + length)));
    if (stored_crc != actual_crc) return std::nullopt;

    if (!saw_ihdr) {
      if (std::memcmp(type, "IHDR", 4) != 0 || length != 13) return std::nullopt;
      const std::uint8_t* d = type + 4;
      info.width = static_cast<int>(read_u32(bytes, pos + 8));
      info.height = static_cast<int>(read_u32(bytes, pos + 12));
      info.bit_depth = d[8];
      info.color_type = d[9];
      if (info.width <= 0 || info.height <= 0) return std::nullopt;
      saw_ihdr = true;
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      if (length != 0) return std::nullopt;
      saw_iend = true;
      pos += 12 + length;
      break;
    }
    pos += 12 + length;
  }
  if (!saw_ihdr || !saw_iend || pos != bytes.size()) return std::nullopt;
  return info;
}

}  // namespace finchart
