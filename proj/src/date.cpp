#include "newsrnn/date.hpp"

#include <chrono>
#include <cstdio>

namespace newsrnn {

namespace {

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = text.substr(0, 4), m = text.substr(5, 2), d = text.substr(8, 2);
  if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return std::nullopt;
  Date date{to_int(y), static_cast<unsigned>(to_int(m)), static_cast<unsigned>(to_int(d))};
  std::chrono::year_month_day ymd{std::chrono::year{date.year}, std::chrono::month{date.month},
                                  std::chrono::day{date.day}};
  if (!ymd.ok()) return std::nullopt;
  return date;
}

std::string to_string(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", date.year, date.month, date.day);
  return buf;
}

}  // namespace newsrnn
