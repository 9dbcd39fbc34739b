#pragma once

#include <cstdint>
#include <string>

namespace xshop {

struct CivilDateTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;
  int second = 0;

  bool operator==(const CivilDateTime&) const = default;
};

// Calendar math on the proleptic Gregorian calendar, no tz database; all
// conversions are relative to a fixed UTC offset in minutes.
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

// 0 = Monday .. 6 = Sunday
int weekday_from_days(std::int64_t days);

CivilDateTime unix_to_civil(std::int64_t unix_seconds, int utc_offset_minutes);
std::int64_t civil_to_unix(const CivilDateTime& c, int utc_offset_minutes);

// weekday of the local datetime, 0 = Monday
int local_weekday(std::int64_t unix_seconds, int utc_offset_minutes);

// "2004-01-20 09:01:03 +01:00"
std::string format_datetime(std::int64_t unix_seconds, int utc_offset_minutes);

// inverse of format_datetime; throws MalformedLine on bad input
std::int64_t parse_datetime(const std::string& text, int& utc_offset_minutes);

extern const char* const kWeekdayNames[7];  // "Monday" .. "Sunday"

}  // namespace xshop
