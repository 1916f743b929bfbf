#include "ecology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "error.hpp"

namespace meco {

double simpson_diversity(const DiversityInput& input) {
    std::uint64_t n_total = 0;
    std::uint64_t same_pairs = 0; // sum n_i(n_i-1)
    for (std::uint64_t n : input.counts) {
        if (n < 1)
            fail(ErrorCode::invalid_argument, "species count must be >= 1");
        n_total += n;
        same_pairs += n * (n - 1);
    }
    if (n_total < 2)
        fail(ErrorCode::invalid_argument,
             "simpson_diversity undefined for N < 2");
    double denom = static_cast<double>(n_total) *
                   static_cast<double>(n_total - 1);
    return 1.0 - static_cast<double>(same_pairs) / denom;
}

Richness richness(const DiversityInput& input, std::uint64_t total_tracked) {
    if (total_tracked < 1)
        fail(ErrorCode::invalid_argument, "total_tracked must be >= 1");
    Richness r;
    r.count = input.counts.size();
    r.proportion = static_cast<double>(r.count) /
                   static_cast<double>(total_tracked);
    return r;
}

std::optional<Peak> peak(const NormalizedSeries& series) {
    std::optional<Peak> best;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (!series.defined[i] || series.values[i] <= 0.0) continue;
        if (!best || series.values[i] > best->value) {
            best = Peak{series.first_day + static_cast<Day>(i),
                        series.values[i]};
        }
    }
    return best;
}

std::optional<Lifespan> lifespan(const NormalizedSeries& series,
                                 const LifespanParams& params) {
    if (!(params.alpha > 0.0 && params.alpha < 1.0))
        fail(ErrorCode::invalid_argument, "alpha must be in (0,1)");
    std::optional<Peak> pk = peak(series);
    if (!pk) return std::nullopt;

    double threshold = params.alpha * pk->value;
    auto meets = [&](std::size_t i) {
        return series.defined[i] != 0 && series.values[i] >= threshold;
    };
    bool unlimited = params.gap_tolerance == kUnlimitedGap;

    std::size_t peak_idx = static_cast<std::size_t>(pk->day - series.first_day);
    std::size_t u = peak_idx, v = peak_idx;

    std::uint32_t gap = 0;
    for (std::size_t i = peak_idx + 1; i < series.values.size(); ++i) {
        if (meets(i)) {
            v = i;
            gap = 0;
        } else if (!unlimited && ++gap > params.gap_tolerance) {
            break;
        }
    }
    gap = 0;
    for (std::size_t i = peak_idx; i-- > 0;) {
        if (meets(i)) {
            u = i;
            gap = 0;
        } else if (!unlimited && ++gap > params.gap_tolerance) {
            break;
        }
    }

    Lifespan out;
    out.phrase_id = series.phrase_id;
    out.start_day = series.first_day + static_cast<Day>(u);
    out.peak_day = pk->day;
    out.end_day = series.first_day + static_cast<Day>(v);
    out.alpha = params.alpha;
    return out;
}

std::vector<ActiveRow> active_series(std::span<const Lifespan> lifespans,
                                     const BackgroundSeries& background,
                                     DayWindow window) {
    if (window.last < window.first)
        fail(ErrorCode::invalid_argument, "empty analysis window");
    MonthIndex first_month = month_of_day(window.first);
    MonthIndex last_month = month_of_day(window.last);

    std::vector<ActiveRow> rows;
    Day bg_last = background.first_day +
                  static_cast<Day>(background.values.size()) - 1;
    for (MonthIndex m = first_month; m <= last_month; ++m) {
        // Activity tests against the full calendar month; lifespans may
        // extend beyond the analysis window.
        Day lo = first_day_of_month(m);
        Day hi = last_day_of_month(m);

        ActiveRow row;
        row.month = m;
        for (const Lifespan& l : lifespans)
            if (l.start_day <= hi && l.end_day >= lo) ++row.active;

        std::uint64_t b_sum = 0;
        for (Day d = std::max(lo, background.first_day);
             d <= std::min(hi, bg_last); ++d)
            b_sum += background.values[static_cast<std::size_t>(
                d - background.first_day)];
        if (b_sum > 0) {
            row.normalized = static_cast<double>(row.active) /
                             static_cast<double>(b_sum);
            row.normalized_defined = true;
        }
        rows.push_back(row);
    }
    return rows;
}

LifespanTrendResult lifespan_trend(std::span<const Lifespan> lifespans,
                                   DayWindow window) {
    if (window.last < window.first)
        fail(ErrorCode::invalid_argument, "empty analysis window");
    MonthIndex first_month = month_of_day(window.first);
    MonthIndex last_month = month_of_day(window.last);

    LifespanTrendResult out;
    std::vector<double> xs, ys;
    for (MonthIndex m = first_month; m <= last_month; ++m) {
        Day lo = first_day_of_month(m);
        Day hi = last_day_of_month(m);
        std::vector<double> lengths;
        for (const Lifespan& l : lifespans)
            if (l.start_day <= hi && l.end_day >= lo)
                lengths.push_back(static_cast<double>(l.length_days()));
        if (lengths.empty()) continue; // months with no active memes omitted

        MonthlyMeanRow row;
        row.month = m;
        row.n = lengths.size();
        row.mean = mean(lengths);
        row.ci95 = lengths.size() >= 2
                       ? ci95_halfwidth(lengths)
                       : std::numeric_limits<double>::quiet_NaN();
        out.rows.push_back(row);
        xs.push_back(static_cast<double>(m - first_month));
        ys.push_back(row.mean);
    }
    if (xs.size() >= 3) {
        out.trend = trend_fit(xs, ys);
        out.trend_ok = true;
    }
    return out;
}

namespace {

struct SpeciesRow {
    std::uint32_t community = 0;
    MonthIndex month = 0;
    std::uint32_t phrase = 0;
    std::uint64_t count = 0;
};

std::vector<SpeciesRow> species_rows(const CountTable& table, DayWindow window) {
    std::vector<SpeciesRow> rows;
    rows.reserve(table.meme_counts.size());
    for (const auto& r : table.meme_counts) {
        if (!window.contains(r.day)) continue;
        rows.push_back({r.community, month_of_day(r.day), r.phrase, r.count});
    }
    std::sort(rows.begin(), rows.end(), [](const SpeciesRow& a, const SpeciesRow& b) {
        return std::tie(a.community, a.month, a.phrase) <
               std::tie(b.community, b.month, b.phrase);
    });
    // Collapse duplicate (community, month, phrase) rows from different days.
    std::size_t w = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (w > 0 && rows[w - 1].community == rows[i].community &&
            rows[w - 1].month == rows[i].month &&
            rows[w - 1].phrase == rows[i].phrase) {
            rows[w - 1].count += rows[i].count;
        } else {
            rows[w++] = rows[i];
        }
    }
    rows.resize(w);
    return rows;
}

} // namespace

DiversityTrendResult diversity_trend(const CountTable& table, DayWindow window) {
    MonthIndex first_month = month_of_day(window.first);
    MonthIndex last_month = month_of_day(window.last);
    if (last_month - first_month + 1 < 3)
        fail(ErrorCode::invalid_argument, "diversity_trend needs >= 3 months");

    std::vector<SpeciesRow> rows = species_rows(table, window);

    std::size_t n_months = static_cast<std::size_t>(last_month - first_month) + 1;
    std::vector<std::vector<double>> d_values(n_months);
    std::vector<std::size_t> totals(n_months, 0);

    std::size_t i = 0;
    bool any_d = false;
    while (i < rows.size()) {
        std::size_t j = i;
        DiversityInput input;
        while (j < rows.size() && rows[j].community == rows[i].community &&
               rows[j].month == rows[i].month) {
            input.counts.push_back(rows[j].count);
            ++j;
        }
        std::size_t slot = static_cast<std::size_t>(rows[i].month - first_month);
        ++totals[slot];
        if (input.total() >= 2) {
            d_values[slot].push_back(simpson_diversity(input));
            any_d = true;
        }
        i = j;
    }
    if (!any_d)
        fail(ErrorCode::empty_input,
             "diversity_trend: no community-month has N >= 2");

    DiversityTrendResult out;
    std::vector<double> xs, ys;
    for (std::size_t s = 0; s < n_months; ++s) {
        if (totals[s] == 0) continue;
        DiversityMonthRow row;
        row.month = first_month + static_cast<MonthIndex>(s);
        row.total_communities = totals[s];
        row.n_communities = d_values[s].size();
        if (!d_values[s].empty()) {
            row.mean_d = mean(d_values[s]);
            row.ci95 = d_values[s].size() >= 2
                           ? ci95_halfwidth(d_values[s])
                           : std::numeric_limits<double>::quiet_NaN();
            xs.push_back(static_cast<double>(row.month - first_month));
            ys.push_back(row.mean_d);
        } else {
            row.ci95 = std::numeric_limits<double>::quiet_NaN();
        }
        out.rows.push_back(row);
    }
    if (xs.size() >= 3) {
        out.trend = trend_fit(xs, ys);
        out.trend_ok = true;
    }
    return out;
}

std::vector<RichnessRow> richness_by_community(const CountTable& table,
                                               DayWindow window) {
    std::vector<RichnessRow> out;
    if (table.phrase_labels.empty()) return out;
    std::uint64_t total_tracked = table.phrase_labels.size();

    std::vector<SpeciesRow> rows = species_rows(table, window);
    std::size_t i = 0;
    while (i < rows.size()) {
        std::size_t j = i;
        std::uint64_t species = 0;
        while (j < rows.size() && rows[j].community == rows[i].community &&
               rows[j].month == rows[i].month) {
            ++species;
            ++j;
        }
        RichnessRow row;
        row.month = rows[i].month;
        row.community = rows[i].community;
        row.species = species;
        row.proportion = static_cast<double>(species) /
                         static_cast<double>(total_tracked);
        out.push_back(row);
        i = j;
    }
    std::sort(out.begin(), out.end(), [](const RichnessRow& a, const RichnessRow& b) {
        return std::tie(a.month, a.community) < std::tie(b.month, b.community);
    });
    return out;
}

} // namespace meco
