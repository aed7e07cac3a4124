#include "finchart/canvas.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

namespace finchart {

namespace {

struct Glyph {
  char ch;
  std::array<std::uint8_t, 7> rows;  // 5 LSB-aligned bits per row, bit 4 = left
};

// Classic 5x7 figures; the label set only ever needs digits and punctuation.
constexpr Glyph kFont[] = {
    {'0', {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e}},
    {'1', {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e}},
    {'2', {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f}},
    {'3', {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e}},
    {'4', {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02}},
    {'5', {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e}},
    {'6', {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e}},
    {'7', {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e}},
    {'9', {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c}},
    {'-', {0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00}},
    {'%', {0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03}},
    {':', {0x00, 0x0c, 0x0c, 0x00, 0x0c, 0x0c, 0x00}},
};

const Glyph* find_glyph(char c) {
  for (const Glyph& g : kFont) {
    if (g.ch == c) return &g;
  }
  return nullptr;
}

}  // namespace

Canvas::Canvas(int width, int height, Rgb background)
    : width_(std::max(width, 1)), height_(std::max(height, 1)) {
  pixels_.resize(static_cast<std::size_t>(width_) * height_ * 3);
  fill_rect(0, 0, width_ - 1, height_ - 1, background);
}

Rgb Canvas::at(int x, int y) const {
  const std::size_t idx = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {pixels_[idx], pixels_[idx + 1], pixels_[idx + 2]};
}

void Canvas::set(int x, int y, Rgb color) {
  if (x < 0 || x >= width_ || y < 0 || y >= height_) return;
  const std::size_t idx = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[idx] = color.r;
  pixels_[idx + 1] = color.g;
  pixels_[idx + 2] = color.b;
}

void Canvas::fill_rect(int x0, int y0, int x1, int y1, Rgb color) {
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, width_ - 1);
  y1 = std::min(y1, height_ - 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) set(x, y, color);
  }
}

void Canvas::hline(int x0, int x1, int y, Rgb color) { fill_rect(x0, y, x1, y, color); }

void Canvas::vline(int x, int y0, int y1, Rgb color) { fill_rect(x, y0, x, y1, color); }

void Canvas::line(int x0, int y0, int x1, int y1, Rgb color) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    set(x0, y0, color);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void Canvas::text(int x, int y, std::string_view s, Rgb color) {
  for (char c : s) {
    if (const Glyph* glyph = find_glyph(c)) {
      for (int row = 0; row < kGlyphHeight; ++row) {
        const std::uint8_t bits = glyph->rows[row];
        for (int col = 0; col < kGlyphWidth; ++col) {
          if (bits & (1u << (kGlyphWidth - 1 - col))) set(x + col, y + row, color);
        }
      }
    }
    x += kGlyphAdvance;
  }
}

int Canvas::text_width(std::string_view s) {
  if (s.empty()) return 0;
  return static_cast<int>(s.size()) * kGlyphAdvance - (kGlyphAdvance - kGlyphWidth);
}

}  // namespace finchart
