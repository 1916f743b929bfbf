#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace meco {

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Day index: whole UTC days since the Unix epoch (floor division).
using Day = std::int32_t;

inline Day day_of_utc_seconds(std::int64_t created_utc) {
    std::int64_t d = created_utc / kSecondsPerDay;
    if (created_utc < 0 && created_utc % kSecondsPerDay != 0) --d;
    return static_cast<Day>(d);
}

// Calendar month in UTC, proleptic Gregorian. Encoded as year * 12 + (month - 1)
// so consecutive months are consecutive integers.
using MonthIndex = std::int32_t;

inline std::chrono::year_month_day civil_of_day(Day day) {
    return std::chrono::year_month_day(
        std::chrono::sys_days(std::chrono::days(day)));
}

inline MonthIndex month_of_day(Day day) {
    auto ymd = civil_of_day(day);
    return static_cast<MonthIndex>(int(ymd.year())) * 12 +
           static_cast<MonthIndex>(unsigned(ymd.month())) - 1;
}

inline std::int32_t year_of_day(Day day) {
    return int(civil_of_day(day).year());
}

inline std::int32_t year_of_month(MonthIndex m) {
    return m >= 0 ? m / 12 : (m - 11) / 12;
}

inline unsigned month_of_year(MonthIndex m) {
    std::int32_t y = year_of_month(m);
    return static_cast<unsigned>(m - y * 12) + 1;
}

inline Day first_day_of_month(MonthIndex m) {
    using namespace std::chrono;
    year_month_day ymd(year(year_of_month(m)), month(month_of_year(m)), day(1));
    return static_cast<Day>(sys_days(ymd).time_since_epoch().count());
}

inline Day last_day_of_month(MonthIndex m) {
    return first_day_of_month(m + 1) - 1;
}

std::string format_month(MonthIndex m);          // "YYYY-MM"
std::string format_date(Day day);                // "YYYY-MM-DD"

// Accepts "YYYY-MM-DD" or a plain integer day index.
Day parse_day(const std::string& text);

} // namespace meco
