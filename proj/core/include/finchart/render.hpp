#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "finchart/canvas.hpp"
#include "finchart/ohlcv.hpp"
#include "finchart/sampler.hpp"

namespace finchart {

/// Colors and treatment for one named chart style.
struct ChartStyle {
  Rgb background;
  Rgb frame;
  Rgb grid;
  Rgb text;
  Rgb up;    // rising candle / volume bar
  Rgb down;  // falling candle / volume bar
  Rgb price_line;
  std::array<Rgb, 3> ma;  // MA-3, MA-6, MA-9 curves
  bool draw_grid = true;
};

const ChartStyle& style_for(ChartStyleId id);

struct RenderedChart {
  std::vector<std::uint8_t> png_bytes;
  std::string content_hash;  // sha256 hex of png_bytes
  ChartSpec spec;
  std::size_t bar_count = 0;
};

/// Rasterizes the prompt segment per the spec: one candle (or the close
/// polyline) per bar, MA overlays with their undefined prefix omitted, an
/// optional volume sub-panel in the bottom fifth of the canvas, and numeric
/// axis labels only. Pure function of its arguments.
Canvas render_canvas(std::span<const OhlcvBar> prompt_bars, const ChartSpec& spec);

/// render_canvas + PNG encoding + content hash. `prompt_bars` must be the
/// window's prompt segment. Throws EmptyPromptSegment or InvariantViolation
/// on a segment/window mismatch.
RenderedChart render(const Window& window, std::span<const OhlcvBar> prompt_bars,
                     const ChartSpec& spec);

}  // namespace finchart
