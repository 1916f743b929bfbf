#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace meco {

// Neumaier-compensated accumulator; fixed left-to-right order keeps every
// statistic bit-stable across shards and platforms.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);
double mean(std::span<const double> values);
double sample_stddev(std::span<const double> values); // n-1 denominator

struct Correlation {
    double r = 0.0;
    double p = 1.0;
};

// Sample Pearson correlation; two-sided p from the exact t distribution with
// n-2 degrees of freedom. Requires n >= 3 and nonzero variance on both sides.
Correlation pearson(std::span<const double> x, std::span<const double> y);

// 1.96 * sample stddev / sqrt(n); requires n >= 2.
double ci95_halfwidth(std::span<const double> samples);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit linfit(std::span<const double> x, std::span<const double> y);

struct TauResult {
    double tau = 0.0;
    double p = 1.0;
};

// Kendall tau-b with tie corrections; p from the normal approximation of the
// tie-corrected null variance. Requires n >= 3 and at least one untied pair
// on each side.
TauResult kendall_tau_b(std::span<const double> a, std::span<const double> b);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Two-sided tail probability of the t distribution.
double student_t_two_sided_p(double t, double dof);

// Least-squares line plus Pearson correlation for trend reporting. Unlike
// pearson(), a constant y is reported as r = 0, p = 1 (no association)
// rather than an error, so flat synthetic series produce usable rows.
struct TrendFit {
    double slope = 0.0;
    double intercept = 0.0;
    double pearson_r = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

TrendFit trend_fit(std::span<const double> x, std::span<const double> y);

} // namespace meco
