#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace newsrnn {

// Calendar date; ordering is chronological.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  auto operator<=>(const Date&) const = default;
};

// Parses strict ISO-8601 `YYYY-MM-DD`. Returns nullopt on any malformation or
// on an impossible calendar date (2015-02-30).
std::optional<Date> parse_date(std::string_view text);

std::string to_string(const Date& date);

}  // namespace newsrnn
