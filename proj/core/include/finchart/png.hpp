#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "finchart/canvas.hpp"

namespace finchart {

/// Encodes a canvas as an 8-bit truecolor PNG. The encoder emits exactly
/// IHDR + one IDAT + IEND with filter type None on every row and a pinned
/// zlib level, and never writes timestamp or text chunks, so identical pixels
/// give identical bytes.
std::vector<std::uint8_t> encode_png(const Canvas& canvas);

struct PngInfo {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

/// Validates the PNG signature and walks the chunk list, checking every
/// chunk's length and CRC through IEND. Returns nullopt for anything that is
/// not a structurally sound PNG.
std::optional<PngInfo> probe_png(std::span<const std::uint8_t> bytes);

}  // namespace finchart
