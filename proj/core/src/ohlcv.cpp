#include "finchart/ohlcv.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "finchart/errors.hpp"
#include "finchart/hash.hpp"
#include "finchart/text.hpp"

namespace finchart {

namespace {

constexpr std::string_view kExpectedHeader = "symbol,date,open,high,low,close,volume";

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct ParsedRow {
  std::string symbol;
  OhlcvBar bar;
  std::size_t line_no = 0;
};

/// Parses one data row; returns the reason on failure.
std::optional<std::string> parse_row(const std::vector<std::string>& fields, ParsedRow& out) {
  if (fields.size() != 7) {
    return "expected 7 fields, got " + std::to_string(fields.size());
  }
  if (fields[0].empty()) return "empty symbol";
  out.symbol = fields[0];

  const auto date = Date::parse(fields[1]);
  if (!date) return "bad date '" + fields[1] + "'";
  out.bar.date = *date;

  const char* names[] = {"open", "high", "low", "close"};
  Decimal4* prices[] = {&out.bar.open, &out.bar.high, &out.bar.low, &out.bar.close};
  for (int i = 0; i < 4; ++i) {
    const auto value = Decimal4::parse(fields[2 + i]);
    if (!value) return std::string("bad ") + names[i] + " '" + fields[2 + i] + "'";
    *prices[i] = *value;
  }

  const std::string& vol = fields[6];
  if (vol.empty() || vol.find_first_not_of("0123456789") != std::string::npos) {
    return "bad volume '" + vol + "'";
  }
  try {
    out.bar.volume = std::stoll(vol);
  } catch (const std::exception&) {
    return "bad volume '" + vol + "'";
  }

  if (!out.bar.valid()) {
    return "OHLC invariant violated (need low <= min(open,close) <= max(open,close) <= high, "
           "prices > 0)";
  }
  return std::nullopt;
}

}  // namespace

bool OhlcvBar::valid() const {
  if (!open.is_positive() || !high.is_positive() || !low.is_positive() || !close.is_positive()) {
    return false;
  }
  if (volume < 0) return false;
  const Decimal4 body_lo = std::min(open, close);
  const Decimal4 body_hi = std::max(open, close);
  return low <= body_lo && high >= body_hi && low <= high;
}

std::string anonymize_symbol(std::string_view raw_ticker, std::string_view salt) {
  const std::string key = std::string(salt) + ":" + std::string(raw_ticker);
  // Letters only: a numeric-code scan can never hit an opaque id.
  return "stk" + digest_to_letters(sha256(key), 12);
}

Series anonymize(const Series& series, std::string_view salt) {
  Series out = series;
  out.symbol_id = anonymize_symbol(series.symbol_id, salt);
  return out;
}

LoadResult load_series(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw FileUnreadable("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw EmptySeries("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::vector<std::string> header = split_csv(line);
    std::string joined;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) joined += ',';
      joined += lower(header[i]);
    }
    if (joined != kExpectedHeader) {
      throw Error("header mismatch in '" + path.string() + "': expected '" +
                  std::string(kExpectedHeader) + "', got '" + joined + "'");
    }
  }

  LoadResult result;
  // Keyed by raw ticker until the end; values keep file order within symbol.
  std::map<std::string, std::vector<ParsedRow>> by_symbol;
  std::vector<std::string> symbol_order;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++result.total_rows;

    ParsedRow row;
    row.line_no = line_no;
    if (auto reason = parse_row(split_csv(line), row)) {
      result.rejects.push_back({line_no, *reason});
      continue;
    }
    auto [it, inserted] = by_symbol.try_emplace(row.symbol);
    if (inserted) symbol_order.push_back(row.symbol);
    it->second.push_back(std::move(row));
  }

  // Per symbol: stable sort by date, then drop duplicate dates (first row in
  // file order wins).
  for (const std::string& symbol : symbol_order) {
    auto& rows = by_symbol[symbol];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ParsedRow& a, const ParsedRow& b) { return a.bar.date < b.bar.date; });
    Series series;
    series.symbol_id = symbol;
    for (const ParsedRow& row : rows) {
      if (!series.bars.empty() && series.bars.back().date == row.bar.date) {
        result.rejects.push_back(
            {row.line_no, "duplicate date " + row.bar.date.to_string() + " for symbol"});
        continue;
      }
      series.bars.push_back(row.bar);
    }
    if (series.bars.empty()) continue;
    result.accepted_rows += series.bars.size();
    result.symbol_map.emplace_back(symbol, anonymize_symbol(symbol, options.salt));
    result.series.push_back(anonymize(series, options.salt));
  }

  if (result.total_rows > 0) {
    const double reject_rate =
        static_cast<double>(result.total_rows - result.accepted_rows) /
        static_cast<double>(result.total_rows);
    if (reject_rate > options.max_reject_fraction) {
      throw Error("rejection rate " + std::to_string(reject_rate) + " in '" + path.string() +
                  "' exceeds " + std::to_string(options.max_reject_fraction) +
                  "; input format likely does not match");
    }
  }
  if (result.series.empty()) {
    throw EmptySeries("no usable series in '" + path.string() + "'");
  }
  return result;
}

void write_symbol_map(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& symbol_map) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoFailure("cannot write symbol map '" + path.string() + "'");
  out << "ticker,symbol_id\n";
  for (const auto& [raw, opaque] : symbol_map) {
    out << raw << ',' << opaque << '\n';
  }
  if (!out) throw IoFailure("failed writing symbol map '" + path.string() + "'");
}

}  // namespace finchart
