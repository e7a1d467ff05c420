#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace shmbs {

// Calendar date, stored as days since 1970-01-01. Daily data only.
struct Date {
  std::int32_t serial = 0;

  auto operator<=>(const Date&) const = default;
  Date next() const { return Date{serial + 1}; }
};

Date parse_date(const std::string& iso);   // "YYYY-MM-DD"
std::string format_date(Date d);
Date make_date(int year, int month, int day);

}  // namespace shmbs
