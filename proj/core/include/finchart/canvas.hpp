#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace finchart {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Plain RGB8 raster with integer drawing primitives. Everything here is
/// integer or exact IEEE arithmetic, so a canvas is a pure function of the
/// draw calls.
class Canvas {
 public:
  Canvas(int width, int height, Rgb background);

  int width() const { return width_; }
  int height() const { return height_; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb color);  // silently clips

  void fill_rect(int x0, int y0, int x1, int y1, Rgb color);  // inclusive corners
  void hline(int x0, int x1, int y, Rgb color);
  void vline(int x, int y0, int y1, Rgb color);
  void line(int x0, int y0, int x1, int y1, Rgb color);  // Bresenham

  /// Draws text with the embedded 5x7 bitmap font at (x, y) = top-left.
  /// Glyphs exist for digits, '.', '-', '%' and ':'; anything else advances
  /// without marking pixels. The embedded font is what keeps label rendering
  /// byte-identical across machines; system fonts are never touched.
  void text(int x, int y, std::string_view s, Rgb color);

  static constexpr int kGlyphWidth = 5;
  static constexpr int kGlyphHeight = 7;
  static constexpr int kGlyphAdvance = 6;
  static int text_width(std::string_view s);

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }  // row-major RGB

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

}  // namespace finchart
