#include "solrad/timeutil.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "solrad/error.hpp"

namespace solrad {
namespace {

using namespace std::chrono;

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t width,
                    std::string_view whole) {
  if (pos + width > text.size()) {
    throw Error(ErrorCode::kParse, "truncated timestamp '" + std::string(whole) + "'");
  }
  int value = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') {
      throw Error(ErrorCode::kParse, "non-digit in timestamp '" + std::string(whole) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view whole) {
  if (pos >= text.size() || text[pos] != c) {
    throw Error(ErrorCode::kParse, "malformed timestamp '" + std::string(whole) + "'");
  }
}

year_month_day checked_date(int y, int m, int d, std::string_view whole) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::kParse, "invalid calendar date in '" + std::string(whole) + "'");
  }
  return ymd;
}

long offset_minutes(double utc_offset_hours) {
  const double minutes = utc_offset_hours * 60.0;
  const double rounded = std::round(minutes);
  if (std::abs(minutes - rounded) > 1e-9) {
    throw Error(ErrorCode::kDomain, "UTC offset must be a whole number of minutes");
  }
  return static_cast<long>(rounded);
}

std::string format_clock(sys_seconds t) {
  const auto dp = floor<days>(t);
  const year_month_day ymd{dp};
  const hh_mm_ss hms{t - dp};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

}  // namespace

UtcInstant parse_iso8601(std::string_view text) {
  // 2012-01-31T12:45:00Z
  expect_char(text, 4, '-', text);
  expect_char(text, 7, '-', text);
  expect_char(text, 10, 'T', text);
  expect_char(text, 13, ':', text);
  expect_char(text, 16, ':', text);
  const int y = parse_fixed_int(text, 0, 4, text);
  const int mo = parse_fixed_int(text, 5, 2, text);
  const int d = parse_fixed_int(text, 8, 2, text);
  const int h = parse_fixed_int(text, 11, 2, text);
  const int mi = parse_fixed_int(text, 14, 2, text);
  const int s = parse_fixed_int(text, 17, 2, text);
  if (h > 23 || mi > 59 || s > 59) {
    throw Error(ErrorCode::kParse, "time of day out of range in '" + std::string(text) + "'");
  }
  const auto ymd = checked_date(y, mo, d, text);
  long offset = 0;
  if (text.size() == 20 && text[19] == 'Z') {
    offset = 0;
  } else if (text.size() == 25 && (text[19] == '+' || text[19] == '-')) {
    expect_char(text, 22, ':', text);
    const int oh = parse_fixed_int(text, 20, 2, text);
    const int om = parse_fixed_int(text, 23, 2, text);
    if (oh > 14 || om > 59) {
      throw Error(ErrorCode::kParse, "UTC offset out of range in '" + std::string(text) + "'");
    }
    offset = (text[19] == '-' ? -1 : 1) * (oh * 60L + om);
  } else {
    throw Error(ErrorCode::kParse,
                "timestamp needs an explicit UTC offset: '" + std::string(text) + "'");
  }
  const sys_seconds local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
  return local - minutes{offset};
}

std::string format_iso8601_utc(UtcInstant t) { return format_clock(t) + "Z"; }

std::string format_iso8601_offset(UtcInstant t, double utc_offset_hours) {
  const long off = offset_minutes(utc_offset_hours);
  const sys_seconds local = t + minutes{off};
  const long a = std::abs(off);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%c%02ld:%02ld", off < 0 ? '-' : '+', a / 60, a % 60);
  return format_clock(local) + buf;
}

year_month_day parse_date(std::string_view text) {
  if (text.size() != 10) {
    throw Error(ErrorCode::kParse, "malformed date '" + std::string(text) + "'");
  }
  expect_char(text, 4, '-', text);
  expect_char(text, 7, '-', text);
  return checked_date(parse_fixed_int(text, 0, 4, text), parse_fixed_int(text, 5, 2, text),
                      parse_fixed_int(text, 8, 2, text), text);
}

std::string format_date(year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

sys_seconds to_local_clock(UtcInstant t, double utc_offset_hours) {
  return t + minutes{offset_minutes(utc_offset_hours)};
}

int day_of_year(year_month_day date) {
  const sys_days jan1{date.year() / January / 1};
  return static_cast<int>((sys_days{date} - jan1).count()) + 1;
}

double clock_hour(sys_seconds local_clock) {
  const auto since_midnight = local_clock - floor<days>(local_clock);
  return static_cast<double>(since_midnight.count()) / 3600.0;
}

}  // namespace solrad
