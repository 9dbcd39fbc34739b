#include "xshop/time.hpp"

#include <cstdio>
#include <cstdlib>

#include "xshop/errors.hpp"

namespace xshop {

const char* const kWeekdayNames[7] = {"Monday",   "Tuesday", "Wednesday", "Thursday",
                                      "Friday",   "Saturday", "Sunday"};

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);  // [0, 146096]
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);  // [0, 365]
  const unsigned mp = (5 * doy + 2) / 153;                       // [0, 11]
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  year = static_cast<int>(y + (month <= 2));
}

int weekday_from_days(std::int64_t z) {
  // 1970-01-01 (day 0) was a Thursday
  std::int64_t w = (z + 3) % 7;
  if (w < 0) w += 7;
  return static_cast<int>(w);
}

namespace {

void split_local(std::int64_t unix_seconds, int offset_min, std::int64_t& days,
                 std::int64_t& secs_of_day) {
  const std::int64_t local = unix_seconds + static_cast<std::int64_t>(offset_min) * 60;
  days = local / 86400;
  secs_of_day = local % 86400;
  if (secs_of_day < 0) {
    secs_of_day += 86400;
    days -= 1;
  }
}

}  // namespace

CivilDateTime unix_to_civil(std::int64_t unix_seconds, int offset_min) {
  std::int64_t days = 0, sod = 0;
  split_local(unix_seconds, offset_min, days, sod);
  CivilDateTime c;
  civil_from_days(days, c.year, c.month, c.day);
  c.hour = static_cast<int>(sod / 3600);
  c.minute = static_cast<int>((sod % 3600) / 60);
  c.second = static_cast<int>(sod % 60);
  return c;
}

std::int64_t civil_to_unix(const CivilDateTime& c, int offset_min) {
  const std::int64_t days = days_from_civil(c.year, c.month, c.day);
  return days * 86400 + c.hour * 3600 + c.minute * 60 + c.second -
         static_cast<std::int64_t>(offset_min) * 60;
}

int local_weekday(std::int64_t unix_seconds, int offset_min) {
  std::int64_t days = 0, sod = 0;
  split_local(unix_seconds, offset_min, days, sod);
  return weekday_from_days(days);
}

std::string format_datetime(std::int64_t unix_seconds, int offset_min) {
  const CivilDateTime c = unix_to_civil(unix_seconds, offset_min);
  const char sign = offset_min < 0 ? '-' : '+';
  const int abs_off = offset_min < 0 ? -offset_min : offset_min;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d %c%02d:%02d", c.year,
                c.month, c.day, c.hour, c.minute, c.second, sign, abs_off / 60,
                abs_off % 60);
  return buf;
}

std::int64_t parse_datetime(const std::string& text, int& offset_min) {
  CivilDateTime c;
  char sign = '+';
  int oh = 0, om = 0;
  const int n = std::sscanf(text.c_str(), "%d-%d-%d %d:%d:%d %c%d:%d", &c.year, &c.month,
                            &c.day, &c.hour, &c.minute, &c.second, &sign, &oh, &om);
  if (n != 9 || (sign != '+' && sign != '-'))
    throw MalformedLine("bad datetime: " + text, 0);
  offset_min = (oh * 60 + om) * (sign == '-' ? -1 : 1);
  return civil_to_unix(c, offset_min);
}

}  // namespace xshop
