#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finchart/date.hpp"
#include "finchart/decimal.hpp"

namespace finchart {

/// One trading day of a single symbol.
struct OhlcvBar {
  Date date;
  Decimal4 open;
  Decimal4 high;
  Decimal4 low;
  Decimal4 close;
  std::int64_t volume = 0;

  /// low <= min(open, close), high >= max(open, close), prices > 0, volume >= 0.
  bool valid() const;

  bool operator==(const OhlcvBar&) const = default;
};

/// Ordered per-symbol history. After loading, symbol_id is an opaque
/// identifier, never the raw ticker; bars are sorted by strictly increasing
/// date.
struct Series {
  std::string symbol_id;
  std::vector<OhlcvBar> bars;

  bool operator==(const Series&) const = default;
};

/// Row rejected during ingest, with the 1-based line number and why.
struct RowDiagnostic {
  std::size_t line_no = 0;
  std::string reason;
};

struct LoadOptions {
  /// Salt mixed into the ticker hash; fixed default keeps runs reproducible.
  std::string salt = "finchart-v1";
  /// A per-file rejection rate above this aborts the load: that level of
  /// damage signals a format mismatch rather than dirty rows.
  double max_reject_fraction = 0.10;
};

struct LoadResult {
  std::vector<Series> series;  // first-appearance order, anonymized ids
  std::vector<RowDiagnostic> rejects;
  /// raw ticker -> opaque id, in first-appearance order.
  std::vector<std::pair<std::string, std::string>> symbol_map;
  std::size_t total_rows = 0;
  std::size_t accepted_rows = 0;
};

/// Loads delimited OHLCV history. Expected layout: a header row
/// `symbol,date,open,high,low,close,volume`, then one row per symbol-day.
/// Rows violating the bar invariants are skipped and reported in `rejects`;
/// symbols are replaced by opaque ids (see anonymize_symbol) and the raw
/// tickers survive only in `symbol_map`.
///
/// Throws FileUnreadable, EmptySeries, or Error (header mismatch / rejection
/// rate exceeded).
LoadResult load_series(const std::filesystem::path& path, const LoadOptions& options = {});

/// Stable opaque id for a raw ticker: letters only, so no downstream text
/// scan for numeric ticker codes can ever match it.
std::string anonymize_symbol(std::string_view raw_ticker, std::string_view salt);

/// Returns a copy of `series` with symbol_id replaced by its opaque id.
Series anonymize(const Series& series, std::string_view salt);

/// Writes the two-column sidecar map (raw ticker, opaque id).
void write_symbol_map(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& symbol_map);

}  // namespace finchart
