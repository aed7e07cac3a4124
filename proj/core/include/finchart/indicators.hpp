#pragma once

#include <optional>
#include <span>
#include <vector>

#include "finchart/decimal.hpp"

namespace finchart {

/// Simple moving average of `closes` with period `k`. Output has the same
/// length as the input; entries before index k-1 are empty (no back-fill).
/// Means are computed on scaled integers with half-up rounding, which keeps
/// the result translation-equivariant: ma(xs + c) == ma(xs) + c exactly.
std::vector<std::optional<Decimal4>> moving_average(std::span<const Decimal4> closes, int period);

}  // namespace finchart
