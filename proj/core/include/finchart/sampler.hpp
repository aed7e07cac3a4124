#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "finchart/ohlcv.hpp"
#include "finchart/rng.hpp"

namespace finchart {

/// A sampled slice of a series with its prompt/predict split point. The
/// first `prompt_len` bars are shown on the chart and in prompts; the rest
/// form the held-out predict segment.
struct Window {
  std::string symbol_id;
  std::size_t start = 0;
  std::size_t total_len = 0;
  std::size_t prompt_len = 0;

  std::size_t predict_len() const { return total_len - prompt_len; }

  bool operator==(const Window&) const = default;
};

enum class ChartType { candlestick, line };

enum class ChartStyleId { light, dark, high_contrast, muted, print };
inline constexpr std::array<ChartStyleId, 5> kAllStyles = {
    ChartStyleId::light, ChartStyleId::dark, ChartStyleId::high_contrast,
    ChartStyleId::muted, ChartStyleId::print};

const char* to_string(ChartType type);
const char* to_string(ChartStyleId style);

/// Randomized rendering configuration for one chart.
struct ChartSpec {
  ChartType chart_type = ChartType::candlestick;
  ChartStyleId style_id = ChartStyleId::light;
  std::vector<int> ma_periods;  // sorted subset of {3, 6, 9}
  bool show_volume = false;
  int width_px = 640;
  int height_px = 480;
  std::uint64_t seed = 0;

  bool operator==(const ChartSpec&) const = default;
};

struct SamplerParams {
  int min_total = 60;
  int max_total = 80;
  double min_prompt_frac = 0.6;
  double max_prompt_frac = 0.8;
  double candlestick_prob = 0.8;
  double ma_prob = 0.5;  // each of the 3, 6, 9 day averages independently
  double volume_prob = 0.5;
  int width_px = 640;
  int height_px = 480;
};

/// Exact (integer-rational) check of the window law for a given parameter
/// set: length bounds, prompt fraction bounds, non-empty predict segment.
bool window_in_law(const Window& window, const SamplerParams& params);

/// Draws a window from `series`: total length uniform on [min_total,
/// max_total] clamped to the available bars, start uniform over feasible
/// positions, prompt length from a uniform fraction rounded then clamped back
/// into the fraction band. Throws SeriesTooShort if the series has fewer than
/// min_total bars.
Window sample_window(const Series& series, RngStream& rng, const SamplerParams& params = {});

/// Draws a chart configuration: candlestick vs line at candlestick_prob,
/// each MA period and the volume panel as independent coin flips, style
/// uniform, plus a fresh 64-bit seed.
ChartSpec sample_chart_spec(RngStream& rng, const SamplerParams& params = {});

/// One planned corpus entry: a window plus how to draw it, under a unique
/// content-derived record id.
struct PlanEntry {
  std::string record_id;
  Window window;
  ChartSpec spec;
};

/// Plans exactly `target_count` entries, round-robin over the series long
/// enough to sample. Deterministic given the stream state; record ids are
/// unique within the plan. Throws NoEligibleSeries when nothing qualifies.
std::vector<PlanEntry> plan_corpus(const std::vector<Series>& series_list,
                                   std::size_t target_count, RngStream& rng,
                                   const SamplerParams& params = {});

/// Content hash of the plan coordinates, rendered as letters (see
/// digest_to_letters).
std::string make_record_id(const Window& window, std::uint64_t spec_seed);

}  // namespace finchart
