#include "finchart/trend.hpp"

#include <cmath>

#include "finchart/errors.hpp"

namespace finchart {

const char* to_string(Direction direction) {
  switch (direction) {
    case Direction::up: return "up";
    case Direction::down: return "down";
    case Direction::flat: return "flat";
  }
  return "flat";
}

std::optional<Direction> direction_from_string(std::string_view text) {
  if (text == "up") return Direction::up;
  if (text == "down") return Direction::down;
  if (text == "flat") return Direction::flat;
  return std::nullopt;
}

TrendLabel trend_label(std::span<const OhlcvBar> predict_bars, std::int64_t epsilon_ppm) {
  if (predict_bars.empty()) throw EmptySegment("predict segment is empty");
  if (epsilon_ppm < 0) throw Error("epsilon must be non-negative");
  const std::int64_t first = predict_bars.front().close.scaled();
  const std::int64_t last = predict_bars.back().close.scaled();
  if (first <= 0) throw Error("first close must be positive");

  // Exact band test: |last - first| / first > epsilon, cross-multiplied so no
  // rounding can flip a borderline label. Scaling every close by c multiplies
  // both sides by c, so the decision is scale-invariant by construction.
  const auto diff = static_cast<__int128>(last) - first;
  const __int128 band = static_cast<__int128>(epsilon_ppm) * first;
  TrendLabel label;
  if (diff * 1'000'000 > band) {
    label.direction = Direction::up;
  } else if (diff * 1'000'000 < -band) {
    label.direction = Direction::down;
  } else {
    label.direction = Direction::flat;
  }
  label.magnitude = static_cast<double>(last - first) / static_cast<double>(first);
  return label;
}

std::int64_t fraction_to_ppm(double fraction) {
  return static_cast<std::int64_t>(std::llround(fraction * 1e6));
}

TrendScore score_directions(std::span<const std::optional<Direction>> predictions,
                            std::span<const TrendLabel> truth) {
  if (predictions.size() != truth.size()) {
    throw LengthMismatch("predictions: " + std::to_string(predictions.size()) +
                         ", truth: " + std::to_string(truth.size()));
  }
  TrendScore score;
  score.total = truth.size();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto truth_idx = static_cast<std::size_t>(truth[i].direction);
    if (!predictions[i]) {
      score.abstentions += 1;
      score.confusion[truth_idx][kDirections] += 1;
      continue;
    }
    const auto pred_idx = static_cast<std::size_t>(*predictions[i]);
    score.confusion[truth_idx][pred_idx] += 1;
    if (pred_idx == truth_idx) score.correct += 1;
  }
  score.accuracy =
      score.total == 0 ? 0.0 : static_cast<double>(score.correct) / static_cast<double>(score.total);
  return score;
}

}  // namespace finchart
