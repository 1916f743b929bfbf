#include "dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "error.hpp"
#include "stats.hpp"

namespace meco {

std::optional<RawPeak> raw_peak(const DailySeries& series) {
    std::optional<RawPeak> best;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (series.values[i] == 0) continue;
        if (!best || series.values[i] > best->value) {
            best = RawPeak{series.phrase_id,
                           series.first_day + static_cast<Day>(i),
                           series.values[i]};
        }
    }
    return best;
}

std::vector<PeakAlignedCurve> peak_aligned(std::span<const DailySeries> series,
                                           std::span<const RawPeak> peaks,
                                           std::int32_t w) {
    if (series.size() != peaks.size())
        fail(ErrorCode::invalid_argument, "peak_aligned: size mismatch");
    if (w < 1)
        fail(ErrorCode::invalid_argument, "peak_aligned: window must be >= 1");

    std::size_t n_deltas = static_cast<std::size_t>(2 * w) + 1;
    std::map<std::int32_t, std::vector<std::vector<double>>> cohorts;
    std::map<std::int32_t, std::size_t> cohort_sizes;

    for (std::size_t i = 0; i < series.size(); ++i) {
        const DailySeries& f = series[i];
        const RawPeak& pk = peaks[i];
        if (pk.value == 0)
            fail(ErrorCode::invalid_argument, "peak_aligned: zero peak value");
        std::int32_t year = year_of_day(pk.day);
        auto& bucket = cohorts[year];
        if (bucket.empty()) bucket.resize(n_deltas);
        ++cohort_sizes[year];

        double peak_value = static_cast<double>(pk.value);
        for (std::int32_t delta = -w; delta <= w; ++delta) {
            Day d = pk.day + delta;
            if (d < f.first_day || d > f.last_day()) continue;
            double r = static_cast<double>(
                           f.values[static_cast<std::size_t>(d - f.first_day)]) /
                       peak_value;
            bucket[static_cast<std::size_t>(delta + w)].push_back(r);
        }
    }

    std::vector<PeakAlignedCurve> out;
    for (auto& [year, bucket] : cohorts) {
        PeakAlignedCurve curve;
        curve.year = year;
        curve.w = w;
        curve.cohort_size = cohort_sizes[year];
        curve.mean.resize(n_deltas, 0.0);
        curve.ci95.resize(n_deltas, std::numeric_limits<double>::quiet_NaN());
        curve.n.resize(n_deltas, 0);
        for (std::size_t k = 0; k < n_deltas; ++k) {
            const auto& vals = bucket[k];
            curve.n[k] = static_cast<std::uint32_t>(vals.size());
            if (vals.empty()) {
                curve.mean[k] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            curve.mean[k] = mean(vals);
            if (vals.size() >= 2) curve.ci95[k] = ci95_halfwidth(vals);
        }
        // By construction every contributing meme has R = 1 at delta 0.
        std::size_t mid = static_cast<std::size_t>(w);
        if (curve.n[mid] > 0 && curve.mean[mid] != 1.0)
            fail(ErrorCode::internal, "peak_aligned: R(0) != 1");
        out.push_back(std::move(curve));
    }
    return out;
}

std::vector<VelocitySample> velocities(const DailySeries& series) {
    std::vector<VelocitySample> out;
    std::size_t n = series.values.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::uint64_t prev = series.values[i];
        std::uint64_t next = series.values[i + 1];
        if (prev > 0 && next > prev) {
            // Gain lands on the later day t.
            VelocitySample s;
            s.kind = VelocityKind::gain;
            s.magnitude = static_cast<double>(next - prev) /
                          static_cast<double>(prev);
            s.day = series.first_day + static_cast<Day>(i + 1);
            s.phrase_id = series.phrase_id;
            s.year = year_of_day(s.day);
            out.push_back(s);
        }
        if (next > 0 && prev > next) {
            // Loss at t looks forward to t+1.
            VelocitySample s;
            s.kind = VelocityKind::loss;
            s.magnitude = static_cast<double>(prev - next) /
                          static_cast<double>(next);
            s.day = series.first_day + static_cast<Day>(i);
            s.phrase_id = series.phrase_id;
            s.year = year_of_day(s.day);
            out.push_back(s);
        }
    }
    return out;
}

LogNormalFit fit_lognormal(std::span<const double> samples) {
    if (samples.size() < 2)
        fail(ErrorCode::invalid_argument, "fit_lognormal needs n >= 2");
    std::vector<double> logs;
    logs.reserve(samples.size());
    for (double x : samples) {
        if (!(x > 0.0))
            fail(ErrorCode::invalid_argument,
                 "fit_lognormal: samples must be positive");
        logs.push_back(std::log(x));
    }
    LogNormalFit fit;
    fit.n = samples.size();
    fit.mu = mean(logs);
    KahanSum ss;
    for (double l : logs) ss.add((l - fit.mu) * (l - fit.mu));
    fit.sigma = std::sqrt(ss.value() / static_cast<double>(logs.size()));
    if (!(fit.sigma > 0.0))
        fail(ErrorCode::invalid_argument,
             "fit_lognormal: degenerate sample (zero variance)");
    return fit;
}

double lognormal_pdf(const LogNormalFit& fit, double x) {
    if (!(x > 0.0)) return 0.0;
    double z = (std::log(x) - fit.mu) / fit.sigma;
    return std::exp(-0.5 * z * z) /
           (x * fit.sigma * std::sqrt(2.0 * M_PI));
}

VelocityHistogram velocity_histogram(std::span<const double> samples,
                                     int bins_per_decade,
                                     const LogNormalFit* fit) {
    if (samples.empty())
        fail(ErrorCode::invalid_argument, "velocity_histogram: no samples");
    if (bins_per_decade < 1)
        fail(ErrorCode::invalid_argument,
             "velocity_histogram: bins_per_decade must be >= 1");
    for (double x : samples)
        if (!(x > 0.0))
            fail(ErrorCode::invalid_argument,
                 "velocity_histogram: samples must be positive");

    auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
    double bpd = static_cast<double>(bins_per_decade);
    auto edge = [&](std::int64_t k) {
        return std::pow(10.0, static_cast<double>(k) / bpd);
    };
    std::int64_t k_min = static_cast<std::int64_t>(
        std::floor(std::log10(*mn_it) * bpd));
    std::int64_t k_max = static_cast<std::int64_t>(
        std::floor(std::log10(*mx_it) * bpd)) + 1;
    // Guard against rounding at exact edges.
    while (edge(k_min) > *mn_it) --k_min;
    while (edge(k_min + 1) <= *mn_it) ++k_min;
    while (edge(k_max) < *mx_it) ++k_max;

    std::size_t n_bins = static_cast<std::size_t>(k_max - k_min);
    VelocityHistogram h;
    h.count.assign(n_bins, 0);
    for (double x : samples) {
        std::int64_t k = static_cast<std::int64_t>(
            std::floor(std::log10(x) * bpd)) - k_min;
        if (k < 0) k = 0;
        if (k >= static_cast<std::int64_t>(n_bins))
            k = static_cast<std::int64_t>(n_bins) - 1;
        while (k > 0 && x < edge(k_min + k)) --k;
        while (k + 1 < static_cast<std::int64_t>(n_bins) &&
               x >= edge(k_min + k + 1))
            ++k;
        ++h.count[static_cast<std::size_t>(k)];
    }

    double n = static_cast<double>(samples.size());
    for (std::size_t b = 0; b < n_bins; ++b) {
        double lo = edge(k_min + static_cast<std::int64_t>(b));
        double hi = edge(k_min + static_cast<std::int64_t>(b) + 1);
        h.center.push_back(std::sqrt(lo * hi));
        h.width.push_back(hi - lo);
        h.density.push_back(static_cast<double>(h.count[b]) / (n * (hi - lo)));
    }
    if (fit) {
        for (double c : h.center)
            h.fit_density.push_back(lognormal_pdf(*fit, c));
    }
    return h;
}

} // namespace meco
