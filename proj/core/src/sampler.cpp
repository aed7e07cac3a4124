#include "finchart/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "finchart/errors.hpp"
#include "finchart/hash.hpp"

namespace finchart {

namespace {

constexpr std::int64_t kPpm = 1'000'000;

std::int64_t to_ppm(double fraction) { return std::llround(fraction * kPpm); }

// Smallest/largest prompt length inside the fraction band, exact in integers.
std::int64_t min_prompt_len(std::int64_t total, std::int64_t min_frac_ppm) {
  return (total * min_frac_ppm + kPpm - 1) / kPpm;
}
std::int64_t max_prompt_len(std::int64_t total, std::int64_t max_frac_ppm) {
  return (total * max_frac_ppm) / kPpm;
}

}  // namespace

const char* to_string(ChartType type) {
  return type == ChartType::candlestick ? "candlestick" : "line";
}

const char* to_string(ChartStyleId style) {
  switch (style) {
    case ChartStyleId::light: return "light";
    case ChartStyleId::dark: return "dark";
    case ChartStyleId::high_contrast: return "high-contrast";
    case ChartStyleId::muted: return "muted";
    case ChartStyleId::print: return "print";
  }
  return "light";
}

bool window_in_law(const Window& window, const SamplerParams& params) {
  const auto total = static_cast<std::int64_t>(window.total_len);
  const auto prompt = static_cast<std::int64_t>(window.prompt_len);
  if (total < params.min_total || total > params.max_total) return false;
  if (prompt <= 0 || prompt >= total) return false;  // predict segment non-empty
  const std::int64_t lo = to_ppm(params.min_prompt_frac);
  const std::int64_t hi = to_ppm(params.max_prompt_frac);
  return prompt * kPpm >= total * lo && prompt * kPpm <= total * hi;
}

Window sample_window(const Series& series, RngStream& rng, const SamplerParams& params) {
  const auto available = static_cast<std::int64_t>(series.bars.size());
  if (available < params.min_total) {
    throw SeriesTooShort("series '" + series.symbol_id + "' has " + std::to_string(available) +
                         " bars, need at least " + std::to_string(params.min_total));
  }
  const std::int64_t total =
      rng.uniform_int(params.min_total, std::min<std::int64_t>(params.max_total, available));
  const std::int64_t start = rng.uniform_int(0, available - total);

  const double frac = rng.uniform(params.min_prompt_frac, params.max_prompt_frac);
  std::int64_t prompt = std::llround(frac * static_cast<double>(total));
  // Rounding can step just outside the band; clamp back in, and always leave
  // a non-empty predict segment.
  const std::int64_t lo = min_prompt_len(total, to_ppm(params.min_prompt_frac));
  const std::int64_t hi =
      std::min(max_prompt_len(total, to_ppm(params.max_prompt_frac)), total - 1);
  prompt = std::clamp(prompt, lo, hi);

  Window window;
  window.symbol_id = series.symbol_id;
  window.start = static_cast<std::size_t>(start);
  window.total_len = static_cast<std::size_t>(total);
  window.prompt_len = static_cast<std::size_t>(prompt);
  return window;
}

ChartSpec sample_chart_spec(RngStream& rng, const SamplerParams& params) {
  ChartSpec spec;
  spec.chart_type = rng.bernoulli(params.candlestick_prob) ? ChartType::candlestick
                                                           : ChartType::line;
  for (int period : {3, 6, 9}) {
    if (rng.bernoulli(params.ma_prob)) spec.ma_periods.push_back(period);
  }
  spec.show_volume = rng.bernoulli(params.volume_prob);
  spec.style_id = kAllStyles[static_cast<std::size_t>(rng.uniform_int(0, 4))];
  spec.width_px = params.width_px;
  spec.height_px = params.height_px;
  spec.seed = rng.next_u64();
  return spec;
}

std::string make_record_id(const Window& window, std::uint64_t spec_seed) {
  const std::string key = window.symbol_id + "|" + std::to_string(window.start) + "|" +
                          std::to_string(window.total_len) + "|" +
                          std::to_string(window.prompt_len) + "|" + std::to_string(spec_seed);
  return "r" + digest_to_letters(sha256(key), 16);
}

std::vector<PlanEntry> plan_corpus(const std::vector<Series>& series_list,
                                   std::size_t target_count, RngStream& rng,
                                   const SamplerParams& params) {
  std::vector<const Series*> eligible;
  for (const Series& s : series_list) {
    if (static_cast<std::int64_t>(s.bars.size()) >= params.min_total) eligible.push_back(&s);
  }
  if (eligible.empty()) {
    throw NoEligibleSeries("no series with at least " + std::to_string(params.min_total) +
                           " bars");
  }

  std::vector<PlanEntry> plans;
  plans.reserve(target_count);
  std::unordered_set<std::string> seen_ids;
  for (std::size_t i = 0; i < target_count; ++i) {
    const Series& series = *eligible[i % eligible.size()];
    PlanEntry plan;
    plan.window = sample_window(series, rng, params);
    plan.spec = sample_chart_spec(rng, params);
    plan.record_id = make_record_id(plan.window, plan.spec.seed);
    while (!seen_ids.insert(plan.record_id).second) {
      // Same window drawn twice with a colliding seed; redraw the seed.
      plan.spec.seed = rng.next_u64();
      plan.record_id = make_record_id(plan.window, plan.spec.seed);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace finchart
