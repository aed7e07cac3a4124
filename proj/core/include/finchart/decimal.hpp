#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace finchart {

/// Fixed-point decimal with exactly four fractional digits, stored as a
/// scaled 64-bit integer. Prices are kept in this form end to end so that
/// parse -> serialize round-trips are byte-exact and arithmetic used by the
/// indicators stays free of binary-float rounding.
class Decimal4 {
 public:
  static constexpr std::int64_t kScale = 10'000;

  constexpr Decimal4() = default;

  static constexpr Decimal4 from_scaled(std::int64_t units) {
    Decimal4 d;
    d.units_ = units;
    return d;
  }
  static constexpr Decimal4 from_int(std::int64_t whole) { return from_scaled(whole * kScale); }

  /// Parses "123", "123.4", "-0.25", up to four fractional digits.
  /// Returns nullopt for anything else (garbage, overflow, >4 digits).
  static std::optional<Decimal4> parse(std::string_view text);

  constexpr std::int64_t scaled() const { return units_; }
  double to_double() const { return static_cast<double>(units_) / kScale; }

  /// Always renders four fractional digits: 10.5 -> "10.5000".
  std::string to_string() const;

  constexpr bool is_positive() const { return units_ > 0; }

  friend constexpr Decimal4 operator+(Decimal4 a, Decimal4 b) {
    return from_scaled(a.units_ + b.units_);
  }
  friend constexpr Decimal4 operator-(Decimal4 a, Decimal4 b) {
    return from_scaled(a.units_ - b.units_);
  }
  constexpr auto operator<=>(const Decimal4&) const = default;

 private:
  std::int64_t units_ = 0;
};

/// Mean of a span of decimals, rounded half-up to the fourth digit.
/// Computed on scaled integers, so mean(xs + c) == mean(xs) + c exactly.
Decimal4 decimal_mean(std::span<const Decimal4> values);

}  // namespace finchart
