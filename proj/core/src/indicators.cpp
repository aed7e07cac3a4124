#include "finchart/indicators.hpp"

#include "finchart/errors.hpp"

namespace finchart {

std::vector<std::optional<Decimal4>> moving_average(std::span<const Decimal4> closes,
                                                    int period) {
  if (period < 1) throw Error("moving average period must be >= 1");
  std::vector<std::optional<Decimal4>> out(closes.size());
  if (closes.empty()) return out;

  std::int64_t window_sum = 0;
  const auto k = static_cast<std::int64_t>(period);
  for (std::size_t i = 0; i < closes.size(); ++i) {
    window_sum += closes[i].scaled();
    if (static_cast<std::int64_t>(i) >= k) window_sum -= closes[i - period].scaled();
    if (static_cast<std::int64_t>(i) >= k - 1) {
      out[i] = Decimal4::from_scaled((window_sum + k / 2) / k);  // half-up
    }
  }
  return out;
}

}  // namespace finchart
