#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finchart/ohlcv.hpp"

namespace finchart {

/// Header line naming each data segment, in column order.
inline constexpr std::string_view kKlineHeader = "date open high low close volume";

/// Serializes bars to the textual k-line layout: the header line, then one
/// line per day with fields separated by single spaces. Dates are YYYY-MM-DD,
/// prices carry exactly four decimal places, volume is a bare integer.
/// Throws EmptyBars.
std::string serialize_kline(std::span<const OhlcvBar> bars);

/// Strict inverse of serialize_kline. Throws Error on any deviation from the
/// layout.
std::vector<OhlcvBar> parse_kline(std::string_view text);

}  // namespace finchart
