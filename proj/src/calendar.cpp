#include "calendar.hpp"

#include <cstdio>
#include <cstdlib>

#include "error.hpp"

namespace meco {

std::string format_month(MonthIndex m) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", year_of_month(m), month_of_year(m));
    return buf;
}

std::string format_date(Day day) {
    auto ymd = civil_of_day(day);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

Day parse_day(const std::string& text) {
    int y = 0;
    unsigned mo = 0, d = 0;
    if (std::sscanf(text.c_str(), "%d-%u-%u", &y, &mo, &d) == 3) {
        using namespace std::chrono;
        year_month_day ymd{year(y), month(mo), day(d)};
        if (!ymd.ok())
            fail(ErrorCode::invalid_argument, "invalid date: " + text);
        return static_cast<Day>(sys_days(ymd).time_since_epoch().count());
    }
    char* end = nullptr;
    long v = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
        fail(ErrorCode::invalid_argument,
             "expected YYYY-MM-DD or integer day index, got: " + text);
    return static_cast<Day>(v);
}

} // namespace meco
