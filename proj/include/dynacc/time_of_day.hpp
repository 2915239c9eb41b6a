#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace dynacc {

inline constexpr double kMinutesPerDay = 1440.0;

/// Formats a minute-of-day as HH:MM, rounding to the nearest minute.
inline std::string format_hhmm(double minute_of_day) {
  const long long m = std::llround(minute_of_day);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld", m / 60, m % 60);
  return buf;
}

/// Parses "HH:MM" into a minute-of-day.
inline double parse_hhmm(const std::string& text) {
  int h = 0, m = 0;
  char colon = 0;
  if (std::sscanf(text.c_str(), "%d%c%d", &h, &colon, &m) != 3 || colon != ':' || h < 0 ||
      m < 0 || m > 59) {
    throw std::runtime_error("invalid time of day '" + text + "', expected HH:MM");
  }
  return h * 60.0 + m;
}

}  // namespace dynacc
