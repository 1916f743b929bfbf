#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "calendar.hpp"
#include "counts.hpp"
#include "series.hpp"
#include "stats.hpp"

namespace meco {

// Species counts for one (community, month): n_i per present species.
struct DiversityInput {
    std::vector<std::uint64_t> counts; // each >= 1

    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (std::uint64_t c : counts) n += c;
        return n;
    }
};

// Simpson's diversity index D = 1 - sum n_i(n_i-1) / (N(N-1)), in [0, 1].
// Requires N >= 2; callers exclude community-months below that.
double simpson_diversity(const DiversityInput& input);

struct Richness {
    std::uint64_t count = 0;
    double proportion = 0.0;
};

Richness richness(const DiversityInput& input, std::uint64_t total_tracked);

struct LifespanParams {
    double alpha = 0.01;               // threshold fraction of the peak, (0,1)
    std::uint32_t gap_tolerance = 0;   // consecutive sub-threshold days allowed
};

inline constexpr std::uint32_t kUnlimitedGap = 0xffffffffu;

struct Lifespan {
    std::uint32_t phrase_id = 0;
    Day start_day = 0; // u
    Day peak_day = 0;  // t_peak
    Day end_day = 0;   // v
    double alpha = 0.0;

    std::int64_t length_days() const {
        return static_cast<std::int64_t>(end_day) - start_day + 1;
    }
};

struct Peak {
    Day day = 0;
    double value = 0.0;
};

// Argmax over defined days with value > 0; ties break to the earliest day.
// Empty optional when the series is all zero or all undefined.
std::optional<Peak> peak(const NormalizedSeries& series);

// Maximal run of days containing the peak where F^ >= alpha * F^(t_peak).
// Undefined days count as sub-threshold. Up to gap_tolerance consecutive
// sub-threshold days do not break the run (kUnlimitedGap recovers the loose
// first-day/last-day reading).
std::optional<Lifespan> lifespan(const NormalizedSeries& series,
                                 const LifespanParams& params);

struct ActiveRow {
    MonthIndex month = 0;
    std::uint64_t active = 0;
    double normalized = 0.0; // active / sum of B(t) over the month
    bool normalized_defined = false;
};

// A meme is active in a month iff its lifespan intersects the month.
std::vector<ActiveRow> active_series(std::span<const Lifespan> lifespans,
                                     const BackgroundSeries& background,
                                     DayWindow window);

struct MonthlyMeanRow {
    MonthIndex month = 0;
    double mean = 0.0;
    double ci95 = 0.0; // NaN when n < 2
    std::size_t n = 0;
};

struct LifespanTrendResult {
    std::vector<MonthlyMeanRow> rows; // months with >= 1 active meme
    TrendFit trend;
    bool trend_ok = false;
};

// Mean lifespan length among memes active in each month, plus the trend of
// that monthly mean over time.
LifespanTrendResult lifespan_trend(std::span<const Lifespan> lifespans,
                                   DayWindow window);

struct DiversityMonthRow {
    MonthIndex month = 0;
    double mean_d = 0.0;
    double ci95 = 0.0;                  // NaN when n < 2
    std::size_t n_communities = 0;      // with N >= 2
    std::size_t total_communities = 0;  // with any meme occurrence
};

struct DiversityTrendResult {
    std::vector<DiversityMonthRow> rows;
    TrendFit trend;
    bool trend_ok = false;
};

DiversityTrendResult diversity_trend(const CountTable& table, DayWindow window);

struct RichnessRow {
    MonthIndex month = 0;
    std::uint32_t community = 0;
    std::uint64_t species = 0;
    double proportion = 0.0;
};

std::vector<RichnessRow> richness_by_community(const CountTable& table,
                                               DayWindow window);

} // namespace meco
