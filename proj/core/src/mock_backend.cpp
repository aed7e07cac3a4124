#include "finchart/mock_backend.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>
#include <vector>

#include "finchart/decimal.hpp"
#include "finchart/errors.hpp"
#include "finchart/kline.hpp"
#include "finchart/trend.hpp"

namespace finchart {

namespace {

// Pulls every serialized k-line block out of a prompt. A block starts at a
// line equal to the k-line header and runs while lines keep the row shape.
std::vector<std::vector<OhlcvBar>> extract_kline_blocks(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }

  auto looks_like_row = [](std::string_view line) {
    int spaces = 0;
    for (char c : line) spaces += c == ' ';
    if (spaces != 5) return false;
    return Date::parse(line.substr(0, line.find(' '))).has_value();
  };

  std::vector<std::vector<OhlcvBar>> blocks;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i] != kKlineHeader) continue;
    std::string block{kKlineHeader};
    std::size_t j = i + 1;
    for (; j < lines.size() && looks_like_row(lines[j]); ++j) {
      block += '\n';
      block += lines[j];
    }
    if (j > i + 1) {
      blocks.push_back(parse_kline(block));
      i = j - 1;
    }
  }
  return blocks;
}

std::string pct(double fraction) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

std::string price(const Decimal4& value) {
  char buf[48];
  const std::int64_t cents = (value.scaled() + 50) / 100;
  std::snprintf(buf, sizeof(buf), "%lld.%02lld", static_cast<long long>(cents / 100),
                static_cast<long long>(cents % 100));
  return buf;
}

std::string thousands(std::int64_t volume) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.1f thousand", static_cast<double>(volume) / 1000.0);
  return buf;
}

struct SpanFacts {
  std::size_t sessions;
  std::string first_day, last_day;
  Decimal4 first_close, last_close, peak, trough, front_mean, back_mean;
  std::int64_t mean_volume, max_volume;
  double change;
};

SpanFacts summarize(const std::vector<OhlcvBar>& bars) {
  SpanFacts f{};
  f.sessions = bars.size();
  f.first_day = bars.front().date.to_string();
  f.last_day = bars.back().date.to_string();
  f.first_close = bars.front().close;
  f.last_close = bars.back().close;
  f.peak = bars.front().high;
  f.trough = bars.front().low;
  std::int64_t volume_sum = 0;
  f.max_volume = 0;
  std::vector<Decimal4> closes;
  closes.reserve(bars.size());
  for (const OhlcvBar& b : bars) {
    f.peak = std::max(f.peak, b.high);
    f.trough = std::min(f.trough, b.low);
    volume_sum += b.volume;
    f.max_volume = std::max(f.max_volume, b.volume);
    closes.push_back(b.close);
  }
  f.mean_volume = volume_sum / static_cast<std::int64_t>(bars.size());
  const std::size_t half = std::max<std::size_t>(bars.size() / 2, 1);
  f.front_mean = decimal_mean(std::span(closes).first(half));
  f.back_mean = decimal_mean(std::span(closes).subspan(bars.size() - half));
  f.change = static_cast<double>(f.last_close.scaled() - f.first_close.scaled()) /
             static_cast<double>(f.first_close.scaled());
  return f;
}

std::string pretrain_reply(const SpanFacts& f) {
  const char* momentum = f.change > 0.0 ? "positive" : f.change < 0.0 ? "negative" : "neutral";
  const char* participation = f.max_volume > 2 * std::max<std::int64_t>(f.mean_volume, 1)
                                  ? "uneven"
                                  : "steady";
  std::string out;
  out += "## Chart review\n\n";
  out += "The visible span covers " + std::to_string(f.sessions) + " sessions from " +
         f.first_day + " to " + f.last_day + ".\n\n";
  out += "- It began the span at " + price(f.first_close) + " and finished at " +
         price(f.last_close) + ", a net move of " + pct(f.change) + ".\n";
  out += "- The peak printed " + price(f.peak) + " while the trough touched " + price(f.trough) +
         ".\n";
  out += "- Turnover averaged " + thousands(f.mean_volume) +
         " shares per session, with the busiest day at " + thousands(f.max_volume) + ".\n\n";
  out += "Momentum reads " + std::string(momentum) + " across the span, with " + participation +
         " participation.";
  return out;
}

std::string instruct_reply(const SpanFacts& f, Direction outlook) {
  std::string_view marker;
  switch (outlook) {
    case Direction::up: marker = kMockOutlookUp; break;
    case Direction::down: marker = kMockOutlookDown; break;
    case Direction::flat: marker = kMockOutlookFlat; break;
  }
  const char* drift = f.back_mean > f.front_mean   ? "firmer"
                      : f.back_mean < f.front_mean ? "softer"
                                                   : "flat";
  std::string out;
  out += "How did the visible span begin and end?@";
  out += "It started the span near " + price(f.first_close) + " and finished near " +
         price(f.last_close) + ", a move of " + pct(f.change) + " over " +
         std::to_string(f.sessions) + " sessions.@";
  out += "Where were the extremes along the way?@";
  out += "The strongest session reached " + price(f.peak) + " while the weakest slipped to " +
         price(f.trough) + ".@";
  out += "How active was the trading?@";
  out += "Participation averaged " + thousands(f.mean_volume) +
         " shares per session and peaked at " + thousands(f.max_volume) + ".@";
  out += "How does the balance of the span read?@";
  out += "The back half averaged " + price(f.back_mean) + " against " + price(f.front_mean) +
         " for the front half, so the drift reads " + drift + ".@";
  out += "Where could this be heading next?@";
  out += "Given the recent move of " + pct(f.change) + " and " + drift +
         " pricing, " + std::string(marker) + " over the coming sessions.@";
  return out;
}

}  // namespace

std::string MockBackend::complete(const AnnotationRequest& request) {
  calls_.fetch_add(1);
  const int now_in_flight = in_flight_.fetch_add(1) + 1;
  int peak = peak_in_flight_.load();
  while (now_in_flight > peak && !peak_in_flight_.compare_exchange_weak(peak, now_in_flight)) {
  }
  if (options_.simulated_latency_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(options_.simulated_latency_ms));
  }

  std::string reply;
  try {
    const auto blocks = extract_kline_blocks(request.user_content);
    if (request.stage == Stage::pretrain) {
      if (blocks.empty()) throw Error("mock found no k-line block in a pre-train request");
      reply = pretrain_reply(summarize(blocks.front()));
    } else {
      if (blocks.size() < 2) throw Error("mock expected prompt and predict k-line blocks");
      const SpanFacts facts = summarize(blocks.front());
      const TrendLabel label = trend_label(blocks[1], options_.epsilon_ppm);
      reply = instruct_reply(facts, label.direction);
    }
  } catch (...) {
    in_flight_.fetch_sub(1);
    throw;
  }
  in_flight_.fetch_sub(1);
  return reply;
}

}  // namespace finchart
