#include "finchart/kline.hpp"

#include <charconv>

#include "finchart/errors.hpp"

namespace finchart {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t next = line.find(' ', pos);
    if (next == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return fields;
}

}  // namespace

std::string serialize_kline(std::span<const OhlcvBar> bars) {
  if (bars.empty()) throw EmptyBars("no bars to serialize");
  std::string out{kKlineHeader};
  for (const OhlcvBar& bar : bars) {
    out += '\n';
    out += bar.date.to_string();
    out += ' ';
    out += bar.open.to_string();
    out += ' ';
    out += bar.high.to_string();
    out += ' ';
    out += bar.low.to_string();
    out += ' ';
    out += bar.close.to_string();
    out += ' ';
    out += std::to_string(bar.volume);
  }
  return out;
}

std::vector<OhlcvBar> parse_kline(std::string_view text) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string_view {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line;
    if (eol == std::string_view::npos) {
      line = text.substr(pos);
      pos = text.size() + 1;  // exhausted
    } else {
      line = text.substr(pos, eol - pos);
      pos = eol + 1;
    }
    return line;
  };
  auto exhausted = [&]() { return pos > text.size(); };

  if (exhausted() || next_line() != kKlineHeader)
    throw Error("k-line text does not start with the expected header");

  std::vector<OhlcvBar> bars;
  while (!exhausted()) {
    const std::string_view line = next_line();
    const auto fields = split_fields(line);
    if (fields.size() != 6) throw Error("k-line row does not have 6 fields: " + std::string(line));

    OhlcvBar bar;
    const auto date = Date::parse(fields[0]);
    if (!date) throw Error("bad k-line date: " + std::string(fields[0]));
    bar.date = *date;

    const Decimal4* prices[] = {&bar.open, &bar.high, &bar.low, &bar.close};
    for (int i = 0; i < 4; ++i) {
      const std::string_view f = fields[1 + i];
      const auto value = Decimal4::parse(f);
      // Reject re-serialization mismatches (missing decimals, sign quirks) so
      // parse_kline(serialize_kline(x)) == x is the only accepted form.
      if (!value || value->to_string() != f) throw Error("bad k-line price: " + std::string(f));
      *const_cast<Decimal4*>(prices[i]) = *value;
    }

    const std::string_view vol = fields[5];
    std::int64_t volume = 0;
    const auto [ptr, ec] = std::from_chars(vol.data(), vol.data() + vol.size(), volume);
    if (ec != std::errc{} || ptr != vol.data() + vol.size() || volume < 0)
      throw Error("bad k-line volume: " + std::string(vol));
    bar.volume = volume;
    bars.push_back(bar);
  }
  if (bars.empty()) throw EmptyBars("k-line text holds no rows");
  return bars;
}

}  // namespace finchart
