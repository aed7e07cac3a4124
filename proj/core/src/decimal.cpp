#include "finchart/decimal.hpp"

#include <cctype>
#include <cstdlib>
#include <limits>

namespace finchart {

std::optional<Decimal4> Decimal4::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  if (pos >= text.size()) return std::nullopt;

  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t whole = 0;
  std::size_t whole_digits = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    int digit = text[pos] - '0';
    if (whole > (kMax - digit) / 10) return std::nullopt;  // overflow
    whole = whole * 10 + digit;
    ++whole_digits;
    ++pos;
  }
  if (whole_digits == 0) return std::nullopt;

  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (frac_digits == 4) return std::nullopt;  // more precision than we keep
      frac = frac * 10 + (text[pos] - '0');
      ++frac_digits;
      ++pos;
    }
    if (frac_digits == 0) return std::nullopt;  // trailing dot
  }
  if (pos != text.size()) return std::nullopt;

  for (std::size_t i = frac_digits; i < 4; ++i) frac *= 10;
  if (whole > (kMax - frac) / kScale) return std::nullopt;
  std::int64_t units = whole * kScale + frac;
  return from_scaled(negative ? -units : units);
}

std::string Decimal4::to_string() const {
  std::int64_t units = units_;
  std::string sign;
  if (units < 0) {
    sign = "-";
    units = -units;
  }
  std::int64_t whole = units / kScale;
  std::int64_t frac = units % kScale;
  char frac_buf[8];
  std::snprintf(frac_buf, sizeof(frac_buf), "%04lld", static_cast<long long>(frac));
  return sign + std::to_string(whole) + "." + frac_buf;
}

Decimal4 decimal_mean(std::span<const Decimal4> values) {
  if (values.empty()) return Decimal4{};
  std::int64_t sum = 0;
  for (const Decimal4& v : values) sum += v.scaled();
  const auto n = static_cast<std::int64_t>(values.size());
  // Half-up rounding; sums here come from positive prices.
  return Decimal4::from_scaled((sum + n / 2) / n);
}

}  // namespace finchart
