#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "finchart/ohlcv.hpp"

namespace finchart {

enum class Direction { up, down, flat };
const char* to_string(Direction direction);
std::optional<Direction> direction_from_string(std::string_view text);

/// Ground-truth movement of a predict segment: fractional close-to-close
/// change and its direction under a flat band of +/- epsilon.
struct TrendLabel {
  Direction direction = Direction::flat;
  double magnitude = 0.0;  // (last close - first close) / first close

  bool operator==(const TrendLabel&) const = default;
};

/// Labels the predict segment. Direction is decided by the exact integer
/// comparison (last - first) vs epsilon * first on scaled decimals, so the
/// label is scale-invariant and epsilon_ppm == 0 means flat only on exact
/// equality. Throws EmptySegment.
TrendLabel trend_label(std::span<const OhlcvBar> predict_bars, std::int64_t epsilon_ppm);

/// Convenience: epsilon as a fraction (0.005 = 0.5%).
std::int64_t fraction_to_ppm(double fraction);

inline constexpr std::size_t kDirections = 3;  // up, down, flat

/// Accuracy report for direction predictions. The confusion matrix is
/// truth-major; the fourth prediction column counts abstentions, so each row
/// sums to that class's truth count. Abstentions score as wrong.
struct TrendScore {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t abstentions = 0;
  std::array<std::array<std::size_t, kDirections + 1>, kDirections> confusion{};
  double accuracy = 0.0;
};

/// Scores predictions against truth labels positionally. A missing
/// prediction is an abstention. Throws LengthMismatch.
TrendScore score_directions(std::span<const std::optional<Direction>> predictions,
                            std::span<const TrendLabel> truth);

}  // namespace finchart
