#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace finchart {

/// Calendar date (proleptic Gregorian), formatted YYYY-MM-DD.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static std::optional<Date> parse(std::string_view text);  // strict YYYY-MM-DD
  static bool valid(int year, int month, int day);

  std::string to_string() const;
  constexpr auto operator<=>(const Date&) const = default;
};

}  // namespace finchart
