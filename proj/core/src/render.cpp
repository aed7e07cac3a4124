#include "finchart/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "finchart/errors.hpp"
#include "finchart/hash.hpp"
#include "finchart/indicators.hpp"
#include "finchart/png.hpp"

namespace finchart {

namespace {

constexpr ChartStyle kStyles[] = {
    // light
    {{0xff, 0xff, 0xff},
     {0x20, 0x20, 0x20},
     {0xe0, 0xe0, 0xe0},
     {0x20, 0x20, 0x20},
     {0x26, 0xa6, 0x9a},
     {0xef, 0x53, 0x50},
     {0x15, 0x65, 0xc0},
     {{{0xf3, 0x9c, 0x12}, {0x8e, 0x44, 0xad}, {0x16, 0xa0, 0x85}}},
     true},
    // dark
    {{0x12, 0x12, 0x12},
     {0xd0, 0xd0, 0xd0},
     {0x2a, 0x2a, 0x2a},
     {0xd0, 0xd0, 0xd0},
     {0x00, 0xe6, 0x76},
     {0xff, 0x52, 0x52},
     {0x64, 0xb5, 0xf6},
     {{{0xff, 0xb7, 0x4d}, {0xba, 0x68, 0xc8}, {0x4d, 0xb6, 0xac}}},
     true},
    // high-contrast
    {{0x00, 0x00, 0x00},
     {0xff, 0xff, 0xff},
     {0x40, 0x40, 0x40},
     {0xff, 0xff, 0xff},
     {0x00, 0xff, 0x00},
     {0xff, 0x00, 0x00},
     {0xff, 0xff, 0x00},
     {{{0xff, 0x00, 0xff}, {0x00, 0xff, 0xff}, {0xff, 0xa5, 0x00}}},
     true},
    // muted
    {{0xf4, 0xf1, 0xea},
     {0x5b, 0x5b, 0x5b},
     {0xdd, 0xd8, 0xcc},
     {0x5b, 0x5b, 0x5b},
     {0x7a, 0x9e, 0x7e},
     {0xb5, 0x83, 0x8d},
     {0x6d, 0x8a, 0x96},
     {{{0xc3, 0xa3, 0x8a}, {0x9a, 0x8f, 0xb8}, {0x86, 0xa6, 0x9d}}},
     true},
    // print
    {{0xff, 0xff, 0xff},
     {0x00, 0x00, 0x00},
     {0xc8, 0xc8, 0xc8},
     {0x00, 0x00, 0x00},
     {0xd8, 0xd8, 0xd8},
     {0x40, 0x40, 0x40},
     {0x00, 0x00, 0x00},
     {{{0x30, 0x30, 0x30}, {0x70, 0x70, 0x70}, {0xa0, 0xa0, 0xa0}}},
     false},
};

struct Layout {
  int plot_left, plot_right;  // price/volume panels share the x extent
  int price_top, price_bottom;
  int vol_top = 0, vol_bottom = 0;  // valid when has_volume
  int date_band_top;
  bool has_volume = false;
};

Layout compute_layout(int width, int height, bool show_volume) {
  Layout l;
  l.plot_left = 56;
  l.plot_right = width - 9;
  l.has_volume = show_volume;
  const int date_band_h = 16;
  if (show_volume) {
    l.vol_top = height - height / 5;  // bottom fifth of the canvas
    l.vol_bottom = height - 1;
    l.date_band_top = l.vol_top - date_band_h;
  } else {
    l.date_band_top = height - date_band_h;
  }
  l.price_top = 8;
  l.price_bottom = l.date_band_top - 5;
  return l;
}

// Maps a scaled price onto a pixel row; monotone by construction.
struct PriceAxis {
  std::int64_t lo, hi;
  int top, bottom;

  int y_of(std::int64_t scaled) const {
    const double t = static_cast<double>(scaled - lo) / static_cast<double>(hi - lo);
    return bottom - static_cast<int>(std::llround(t * (bottom - top)));
  }
};

PriceAxis price_axis(std::span<const OhlcvBar> bars, bool candlestick, int top, int bottom) {
  std::int64_t lo = bars.front().close.scaled();
  std::int64_t hi = lo;
  for (const OhlcvBar& b : bars) {
    if (candlestick) {
      lo = std::min(lo, b.low.scaled());
      hi = std::max(hi, b.high.scaled());
    } else {
      lo = std::min(lo, b.close.scaled());
      hi = std::max(hi, b.close.scaled());
    }
  }
  std::int64_t pad = std::max<std::int64_t>((hi - lo) * 4 / 100, 1);
  lo = std::max<std::int64_t>(lo - pad, 0);
  hi += pad;
  return {lo, hi, top, bottom};
}

std::int64_t nice_step(std::int64_t range, int target_ticks) {
  const std::int64_t raw = std::max<std::int64_t>(range / target_ticks, 1);
  std::int64_t magnitude = 1;
  while (magnitude * 10 <= raw) magnitude *= 10;
  for (std::int64_t mult : {1, 2, 5, 10}) {
    if (magnitude * mult >= raw) return magnitude * mult;
  }
  return magnitude * 10;
}

std::string format_price(std::int64_t scaled) {
  const std::int64_t cents = (scaled + 50) / 100;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%02lld", static_cast<long long>(cents / 100),
                static_cast<long long>(cents % 100));
  return buf;
}

std::string format_month_day(const Date& d) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d-%02d", d.month, d.day);
  return buf;
}

int bar_center_x(const Layout& l, std::size_t i, std::size_t n) {
  const int plot_w = l.plot_right - l.plot_left + 1;
  return l.plot_left +
         static_cast<int>((static_cast<double>(i) + 0.5) * plot_w / static_cast<double>(n));
}

void draw_polyline(Canvas& canvas, const std::vector<std::pair<int, int>>& pts, Rgb color) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    canvas.line(pts[i].first, pts[i].second, pts[i + 1].first, pts[i + 1].second, color);
  }
  if (pts.size() == 1) canvas.set(pts[0].first, pts[0].second, color);
}

}  // namespace

const ChartStyle& style_for(ChartStyleId id) { return kStyles[static_cast<int>(id)]; }

Canvas render_canvas(std::span<const OhlcvBar> prompt_bars, const ChartSpec& spec) {
  if (prompt_bars.empty()) throw EmptyPromptSegment("prompt segment is empty");
  const ChartStyle& style = style_for(spec.style_id);
  const std::size_t n = prompt_bars.size();
  Canvas canvas(spec.width_px, spec.height_px, style.background);
  const Layout l = compute_layout(canvas.width(), canvas.height(), spec.show_volume);
  const bool candles = spec.chart_type == ChartType::candlestick;
  const PriceAxis axis = price_axis(prompt_bars, candles, l.price_top, l.price_bottom);

  // Gridlines and price labels at nice tick values.
  const std::int64_t step = nice_step(axis.hi - axis.lo, 5);
  for (std::int64_t tick = (axis.lo + step - 1) / step * step; tick <= axis.hi; tick += step) {
    const int y = axis.y_of(tick);
    if (style.draw_grid) canvas.hline(l.plot_left, l.plot_right, y, style.grid);
    const std::string label = format_price(tick);
    canvas.text(l.plot_left - 6 - Canvas::text_width(label), y - Canvas::kGlyphHeight / 2, label,
                style.text);
  }

  // Frame around the price panel.
  canvas.hline(l.plot_left, l.plot_right, l.price_top, style.frame);
  canvas.hline(l.plot_left, l.plot_right, l.price_bottom, style.frame);
  canvas.vline(l.plot_left, l.price_top, l.price_bottom, style.frame);
  canvas.vline(l.plot_right, l.price_top, l.price_bottom, style.frame);

  const int plot_w = l.plot_right - l.plot_left + 1;
  const int body_half = std::max(1, static_cast<int>(plot_w / static_cast<int>(n) * 35 / 100));

  if (candles) {
    for (std::size_t i = 0; i < n; ++i) {
      const OhlcvBar& b = prompt_bars[i];
      const int x = bar_center_x(l, i, n);
      const Rgb color = b.close >= b.open ? style.up : style.down;
      canvas.vline(x, axis.y_of(b.high.scaled()), axis.y_of(b.low.scaled()), color);
      const int y0 = axis.y_of(std::max(b.open.scaled(), b.close.scaled()));
      const int y1 = axis.y_of(std::min(b.open.scaled(), b.close.scaled()));
      canvas.fill_rect(x - body_half, y0, x + body_half, y1, color);
    }
  } else {
    std::vector<std::pair<int, int>> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts.emplace_back(bar_center_x(l, i, n), axis.y_of(prompt_bars[i].close.scaled()));
    }
    draw_polyline(canvas, pts, style.price_line);
  }

  // MA overlays, undefined prefix omitted.
  std::vector<Decimal4> closes;
  closes.reserve(n);
  for (const OhlcvBar& b : prompt_bars) closes.push_back(b.close);
  for (std::size_t pi = 0; pi < spec.ma_periods.size(); ++pi) {
    const int period = spec.ma_periods[pi];
    Rgb color;
    switch (period) {
      case 3: color = style.ma[0]; break;
      case 6: color = style.ma[1]; break;
      case 9: color = style.ma[2]; break;
      default: color = style.ma[pi % 3]; break;
    }
    const auto ma = moving_average(closes, period);
    std::vector<std::pair<int, int>> pts;
    for (std::size_t i = 0; i < n; ++i) {
      if (ma[i]) pts.emplace_back(bar_center_x(l, i, n), axis.y_of(ma[i]->scaled()));
    }
    draw_polyline(canvas, pts, color);
  }

  // Date labels: up to five evenly spaced bars, deduplicated.
  int last_label_end = -1000;
  for (int j = 0; j < 5; ++j) {
    const auto i = static_cast<std::size_t>(
        std::llround(static_cast<double>(j) * static_cast<double>(n - 1) / 4.0));
    const std::string label = format_month_day(prompt_bars[i].date);
    const int w = Canvas::text_width(label);
    const int x = std::clamp(bar_center_x(l, i, n) - w / 2, l.plot_left, l.plot_right - w);
    if (x <= last_label_end + 4) continue;
    canvas.text(x, l.date_band_top + 4, label, style.text);
    last_label_end = x + w;
  }

  if (l.has_volume) {
    canvas.hline(l.plot_left, l.plot_right, l.vol_top, style.frame);
    std::int64_t max_volume = 0;
    for (const OhlcvBar& b : prompt_bars) max_volume = std::max(max_volume, b.volume);
    const int inner_top = l.vol_top + 4;
    const int inner_bottom = l.vol_bottom - 4;
    if (max_volume > 0 && inner_bottom > inner_top) {
      const int span = inner_bottom - inner_top;
      for (std::size_t i = 0; i < n; ++i) {
        const OhlcvBar& b = prompt_bars[i];
        if (b.volume == 0) continue;
        const int h = std::max(
            1, static_cast<int>(std::llround(static_cast<double>(b.volume) /
                                             static_cast<double>(max_volume) * span)));
        const int x = bar_center_x(l, i, n);
        const Rgb color = b.close >= b.open ? style.up : style.down;
        canvas.fill_rect(x - body_half, inner_bottom - h, x + body_half, inner_bottom, color);
      }
    }
  }
  return canvas;
}

RenderedChart render(const Window& window, std::span<const OhlcvBar> prompt_bars,
                     const ChartSpec& spec) {
  if (prompt_bars.empty()) throw EmptyPromptSegment("prompt segment is empty");
  if (prompt_bars.size() != static_cast<std::size_t>(window.prompt_len)) {
    throw InvariantViolation("prompt segment length does not match the window");
  }
  RenderedChart out;
  out.spec = spec;
  out.bar_count = prompt_bars.size();
  const Canvas canvas = render_canvas(prompt_bars, spec);
  out.png_bytes = encode_png(canvas);
  out.content_hash = sha256_hex(out.png_bytes);
  return out;
}

}  // namespace finchart
