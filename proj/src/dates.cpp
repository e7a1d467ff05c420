#include "shmbs/dates.hpp"

#include <cstdio>

#include "shmbs/common.hpp"

namespace shmbs {

namespace {

// civil calendar <-> serial day conversions (Howard Hinnant's algorithms)
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

bool valid_ymd(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1) return false;
  static const int days_in[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int dim = days_in[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) dim = 29;
  return d <= dim;
}

}  // namespace

Date make_date(int year, int month, int day) {
  if (!valid_ymd(year, month, day))
    raise(Errc::unparseable_date, "invalid calendar date");
  return Date{static_cast<std::int32_t>(days_from_civil(year, month, day))};
}

Date parse_date(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  const int got = std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail);
  if (got != 3 || iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
    raise(Errc::unparseable_date, "expected YYYY-MM-DD, got '" + iso + "'");
  return make_date(y, m, d);
}

std::string format_date(Date dt) {
  int y, m, d;
  civil_from_days(dt.serial, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

}  // namespace shmbs
