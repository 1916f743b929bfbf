#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "calendar.hpp"
#include "series.hpp"

namespace meco {

struct RawPeak {
    std::uint32_t phrase_id = 0;
    Day day = 0;
    std::uint64_t value = 0;
};

// Argmax of the raw daily frequency, ties broken by earliest day; empty when
// the series is all zero.
std::optional<RawPeak> raw_peak(const DailySeries& series);

// Mean relative frequency R_m(t_peak + delta) = F(t_peak + delta) / F(t_peak)
// over a cohort of memes whose peak falls in the same year.
struct PeakAlignedCurve {
    std::int32_t year = 0;
    std::int32_t w = 0;                // deltas run -w..+w
    std::vector<double> mean;          // index = delta + w
    std::vector<double> ci95;          // NaN when n < 2
    std::vector<std::uint32_t> n;
    std::size_t cohort_size = 0;
};

// `series` and `peaks` are matched by index. Days falling outside a meme's
// series are excluded from that meme's contribution.
std::vector<PeakAlignedCurve> peak_aligned(std::span<const DailySeries> series,
                                           std::span<const RawPeak> peaks,
                                           std::int32_t w);

enum class VelocityKind : std::uint8_t { gain = 0, loss = 1 };

struct VelocitySample {
    VelocityKind kind = VelocityKind::gain;
    double magnitude = 0.0; // > 0; losses stored as magnitudes
    Day day = 0;
    std::uint32_t phrase_id = 0;
    std::int32_t year = 0;
};

// Gains: (F(t) - F(t-1)) / F(t-1) where F(t-1) > 0 and F(t) > F(t-1).
// Losses at t look forward: (F(t) - F(t+1)) / F(t+1) where F(t+1) > 0 and
// F(t) > F(t+1). Zero-denominator and zero-change day pairs emit nothing.
std::vector<VelocitySample> velocities(const DailySeries& series);

struct LogNormalFit {
    double mu = 0.0;
    double sigma = 0.0; // > 0
    std::size_t n = 0;
};

// Maximum likelihood: mu = mean(ln x), sigma = population stddev(ln x).
// Errors on n < 2, non-positive samples, or degenerate (zero) sigma.
LogNormalFit fit_lognormal(std::span<const double> samples);

double lognormal_pdf(const LogNormalFit& fit, double x);

struct VelocityHistogram {
    std::vector<double> center;      // geometric bin centers
    std::vector<double> width;       // linear bin widths
    std::vector<std::uint64_t> count;
    std::vector<double> density;     // count / (n * width)
    std::vector<double> fit_density; // empty when no fit supplied
};

// Logarithmic bins with `bins_per_decade` bins per factor of 10; the
// empirical density integrates to 1.
VelocityHistogram velocity_histogram(std::span<const double> samples,
                                     int bins_per_decade,
                                     const LogNormalFit* fit = nullptr);

} // namespace meco
