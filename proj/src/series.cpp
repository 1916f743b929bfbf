#include "series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "error.hpp"

namespace meco {

namespace {

void check_window(DayWindow w) {
    if (w.last < w.first)
        fail(ErrorCode::invalid_argument, "empty analysis window");
}

template <typename Series, typename Value>
std::vector<MonthValue> aggregate_months(const Series& s, AggMode mode,
                                         Value value_of, auto defined_of) {
    std::vector<MonthValue> out;
    if (s.values.empty()) return out;

    MonthIndex current = month_of_day(s.first_day);
    KahanSum sum;
    std::size_t n_days = 0;

    auto flush = [&](MonthIndex m) {
        MonthValue v;
        v.month = m;
        v.n_days = n_days;
        if (n_days == 0) {
            v.defined = false;
        } else {
            v.value = mode == AggMode::sum
                          ? sum.value()
                          : sum.value() / static_cast<double>(n_days);
        }
        out.push_back(v);
        sum = KahanSum{};
        n_days = 0;
    };

    Day next_month_first = first_day_of_month(current + 1);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        Day d = s.first_day + static_cast<Day>(i);
        if (d >= next_month_first) {
            flush(current);
            current = month_of_day(d);
            next_month_first = first_day_of_month(current + 1);
        }
        if (defined_of(i)) {
            sum.add(value_of(i));
            ++n_days;
        }
    }
    flush(current);
    return out;
}

} // namespace

DailySeries daily_series(const CountTable& table, std::uint32_t phrase_id,
                         DayWindow window) {
    check_window(window);
    if (phrase_id >= table.phrase_labels.size())
        fail(ErrorCode::invalid_argument,
             "unknown phrase_id: " + std::to_string(phrase_id));

    DailySeries s;
    s.phrase_id = phrase_id;
    s.first_day = window.first;
    s.values.assign(window.length(), 0);

    auto lo = std::lower_bound(
        table.meme_counts.begin(), table.meme_counts.end(), phrase_id,
        [](const MemeCountRow& r, std::uint32_t p) { return r.phrase < p; });
    for (auto it = lo; it != table.meme_counts.end() && it->phrase == phrase_id;
         ++it) {
        if (window.contains(it->day))
            s.values[static_cast<std::size_t>(it->day - window.first)] += it->count;
    }
    return s;
}

BackgroundSeries background_series(const CountTable& table, DayWindow window) {
    check_window(window);
    BackgroundSeries s;
    s.first_day = window.first;
    s.values.assign(window.length(), 0);
    for (const auto& r : table.background_counts) {
        if (window.contains(r.day))
            s.values[static_cast<std::size_t>(r.day - window.first)] += r.count;
    }
    return s;
}

NormalizedSeries normalize(const DailySeries& f, const BackgroundSeries& b) {
    if (f.first_day != b.first_day || f.values.size() != b.values.size())
        fail(ErrorCode::invalid_argument, "normalize: window mismatch");

    NormalizedSeries s;
    s.phrase_id = f.phrase_id;
    s.first_day = f.first_day;
    s.values.assign(f.values.size(), 0.0);
    s.defined.assign(f.values.size(), 0);

    bool any_defined = false;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (b.values[i] > 0) {
            s.values[i] = static_cast<double>(f.values[i]) /
                          static_cast<double>(b.values[i]);
            s.defined[i] = 1;
            any_defined = true;
        }
    }
    if (!any_defined)
        fail(ErrorCode::empty_input, "background empty over window");
    return s;
}

std::vector<MonthValue> monthly_aggregate(const DailySeries& s, AggMode mode) {
    return aggregate_months(
        s, mode,
        [&](std::size_t i) { return static_cast<double>(s.values[i]); },
        [](std::size_t) { return true; });
}

std::vector<MonthValue> monthly_aggregate(const NormalizedSeries& s, AggMode mode) {
    return aggregate_months(
        s, mode, [&](std::size_t i) { return s.values[i]; },
        [&](std::size_t i) { return s.defined[i] != 0; });
}

AttentionResult aggregate_attention(const CountTable& table, DayWindow window) {
    check_window(window);
    MonthIndex first_month = month_of_day(window.first);
    MonthIndex last_month = month_of_day(window.last);
    if (last_month - first_month + 1 < 2)
        fail(ErrorCode::invalid_argument,
             "aggregate_attention needs at least 2 months");

    BackgroundSeries bg = background_series(table, window);

    // Per month, the per-meme monthly means of F^.
    std::size_t n_months = static_cast<std::size_t>(last_month - first_month) + 1;
    std::vector<std::vector<double>> per_month(n_months);

    for (std::uint32_t p = 0; p < table.phrase_labels.size(); ++p) {
        DailySeries f = daily_series(table, p, window);
        NormalizedSeries norm = normalize(f, bg);
        for (const MonthValue& mv : monthly_aggregate(norm, AggMode::mean)) {
            if (!mv.defined) continue;
            per_month[static_cast<std::size_t>(mv.month - first_month)].push_back(
                mv.value);
        }
    }

    AttentionResult out;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n_months; ++i) {
        const auto& vals = per_month[i];
        if (vals.empty()) continue;
        AttentionRow row;
        row.month = first_month + static_cast<MonthIndex>(i);
        row.n = vals.size();
        row.mean = mean(vals);
        row.ci95 = vals.size() >= 2 ? ci95_halfwidth(vals)
                                    : std::numeric_limits<double>::quiet_NaN();
        out.rows.push_back(row);
        xs.push_back(static_cast<double>(row.month - first_month));
        ys.push_back(row.mean);
    }
    if (xs.size() >= 3) {
        out.trend = trend_fit(xs, ys);
        out.trend_ok = true;
    }
    return out;
}

} // namespace meco
