#pragma once

#include <cstdint>
#include <vector>

#include "calendar.hpp"
#include "counts.hpp"
#include "stats.hpp"

namespace meco {

struct DayWindow {
    Day first = 0;
    Day last = 0;

    std::size_t length() const { return static_cast<std::size_t>(last - first) + 1; }
    bool contains(Day d) const { return d >= first && d <= last; }
};

// Dense per-day raw frequency F_m(t); missing days are zero.
struct DailySeries {
    std::uint32_t phrase_id = 0;
    Day first_day = 0;
    std::vector<std::uint64_t> values;

    Day last_day() const {
        return first_day + static_cast<Day>(values.size()) - 1;
    }
};

// B(t): the daily sum over all background words.
struct BackgroundSeries {
    Day first_day = 0;
    std::vector<std::uint64_t> values;
};

// F^(t) = F(t)/B(t); days where B(t) = 0 are undefined and excluded from
// every downstream statistic.
struct NormalizedSeries {
    std::uint32_t phrase_id = 0;
    Day first_day = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> defined;
};

DailySeries daily_series(const CountTable& table, std::uint32_t phrase_id,
                         DayWindow window);
BackgroundSeries background_series(const CountTable& table, DayWindow window);
NormalizedSeries normalize(const DailySeries& f, const BackgroundSeries& b);

enum class AggMode { sum, mean };

struct MonthValue {
    MonthIndex month = 0;
    double value = 0.0;
    bool defined = true;
    std::size_t n_days = 0; // days contributing (defined days for normalized)
};

std::vector<MonthValue> monthly_aggregate(const DailySeries& s, AggMode mode);
std::vector<MonthValue> monthly_aggregate(const NormalizedSeries& s, AggMode mode);

struct AttentionRow {
    MonthIndex month = 0;
    double mean = 0.0;
    double ci95 = 0.0; // NaN when n < 2
    std::size_t n = 0; // memes contributing that month
};

struct AttentionResult {
    std::vector<AttentionRow> rows;
    TrendFit trend;        // Pearson of monthly mean vs month index
    bool trend_ok = false; // false when fewer than 3 usable months
};

// Mean normalized meme-frequency per month across all tracked phrases
// (monthly mean of daily F^ per meme, then mean over memes).
AttentionResult aggregate_attention(const CountTable& table, DayWindow window);

} // namespace meco
