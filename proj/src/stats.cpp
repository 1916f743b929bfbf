#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "error.hpp"

namespace meco {

double compensated_sum(std::span<const double> values) {
    KahanSum s;
    for (double v : values) s.add(v);
    return s.value();
}

double mean(std::span<const double> values) {
    if (values.empty())
        fail(ErrorCode::invalid_argument, "mean of empty sample");
    return compensated_sum(values) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
    if (values.size() < 2)
        fail(ErrorCode::invalid_argument, "sample stddev needs n >= 2");
    double m = mean(values);
    KahanSum ss;
    for (double v : values) ss.add((v - m) * (v - m));
    return std::sqrt(ss.value() / static_cast<double>(values.size() - 1));
}

namespace {

// Continued fraction for the incomplete beta function, modified Lentz method.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-15;
    constexpr double kTiny = 1e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                   a * std::log(x) + b * std::log1p(-x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
    if (!std::isfinite(t)) return 0.0;
    double x = dof / (dof + t * t);
    double p = incomplete_beta(dof / 2.0, 0.5, x);
    return std::clamp(p, 0.0, 1.0);
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        fail(ErrorCode::invalid_argument, "pearson: length mismatch");
    std::size_t n = x.size();
    if (n < 3)
        fail(ErrorCode::invalid_argument, "pearson needs n >= 3");

    double mx = mean(x);
    double my = mean(y);
    KahanSum sxy, sxx, syy;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    if (sxx.value() <= 0.0 || syy.value() <= 0.0)
        fail(ErrorCode::invalid_argument, "pearson: zero variance input");

    Correlation out;
    out.r = std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()),
                       -1.0, 1.0);
    double dof = static_cast<double>(n - 2);
    double denom = 1.0 - out.r * out.r;
    if (denom <= 0.0) {
        out.p = 0.0;
    } else {
        double t = out.r * std::sqrt(dof / denom);
        out.p = student_t_two_sided_p(t, dof);
    }
    return out;
}

double ci95_halfwidth(std::span<const double> samples) {
    if (samples.size() < 2)
        fail(ErrorCode::invalid_argument, "ci95 needs n >= 2");
    return 1.96 * sample_stddev(samples) /
           std::sqrt(static_cast<double>(samples.size()));
}

LinearFit linfit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        fail(ErrorCode::invalid_argument, "linfit: length mismatch");
    if (x.size() < 2)
        fail(ErrorCode::invalid_argument, "linfit needs n >= 2");
    double mx = mean(x);
    double my = mean(y);
    KahanSum sxy, sxx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        sxy.add(dx * (y[i] - my));
        sxx.add(dx * dx);
    }
    if (sxx.value() <= 0.0)
        fail(ErrorCode::invalid_argument, "linfit: degenerate x");
    LinearFit fit;
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    return fit;
}

namespace {

// Strict inversions of v, counted by merge sort.
std::uint64_t count_inversions(std::vector<double>& v) {
    std::size_t n = v.size();
    std::vector<double> tmp(n);
    std::uint64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            std::size_t mid = lo + width;
            std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    inversions += mid - i;
                    tmp[k++] = v[j++];
                } else {
                    tmp[k++] = v[i++];
                }
            }
            while (i < mid) tmp[k++] = v[i++];
            while (j < hi) tmp[k++] = v[j++];
            std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
        }
    }
    return inversions;
}

struct TieStats {
    double pairs = 0;      // sum t(t-1)/2
    double v_term = 0;     // sum t(t-1)(2t+5)
    double t1 = 0;         // sum t(t-1)
    double t2 = 0;         // sum t(t-1)(t-2)
};

template <typename Iter, typename Eq>
TieStats tie_stats(Iter first, Iter last, Eq eq) {
    TieStats s;
    auto run_start = first;
    for (auto it = first; it != last; ++it) {
        auto next = std::next(it);
        if (next == last || !eq(*run_start, *next)) {
            double t = static_cast<double>(std::distance(run_start, next));
            if (t > 1) {
                s.pairs += t * (t - 1) / 2.0;
                s.v_term += t * (t - 1) * (2 * t + 5);
                s.t1 += t * (t - 1);
                s.t2 += t * (t - 1) * (t - 2);
            }
            run_start = next;
        }
    }
    return s;
}

} // namespace

TauResult kendall_tau_b(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        fail(ErrorCode::invalid_argument, "kendall_tau_b: length mismatch");
    std::size_t n = a.size();
    if (n < 3)
        fail(ErrorCode::invalid_argument, "kendall_tau_b needs n >= 3");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (a[i] != a[j]) return a[i] < a[j];
        return b[i] < b[j];
    });

    std::vector<std::pair<double, double>> sorted(n);
    for (std::size_t i = 0; i < n; ++i)
        sorted[i] = {a[order[i]], b[order[i]]};

    TieStats ta = tie_stats(sorted.begin(), sorted.end(),
                            [](const auto& x, const auto& y) {
                                return x.first == y.first;
                            });
    TieStats tab = tie_stats(sorted.begin(), sorted.end(),
                             [](const auto& x, const auto& y) {
                                 return x.first == y.first &&
                                        x.second == y.second;
                             });
    std::vector<double> bs(n);
    for (std::size_t i = 0; i < n; ++i) bs[i] = sorted[i].second;
    std::vector<double> b_sorted = bs;
    std::sort(b_sorted.begin(), b_sorted.end());
    TieStats tb = tie_stats(b_sorted.begin(), b_sorted.end(),
                            [](double x, double y) { return x == y; });

    double tot = static_cast<double>(n) * (n - 1) / 2.0;
    double denom = (tot - ta.pairs) * (tot - tb.pairs);
    if (denom <= 0.0)
        fail(ErrorCode::invalid_argument, "kendall_tau_b: all-tied input");

    // After sorting by (a, b), strict inversions of b are exactly the
    // discordant pairs; a-tied pairs are b-ascending, so never counted.
    double discordant = static_cast<double>(count_inversions(bs));
    double s = tot - ta.pairs - tb.pairs + tab.pairs - 2.0 * discordant;

    TauResult out;
    out.tau = std::clamp(s / std::sqrt(denom), -1.0, 1.0);

    double dn = static_cast<double>(n);
    double v0 = dn * (dn - 1) * (2 * dn + 5);
    double var = (v0 - ta.v_term - tb.v_term) / 18.0;
    if (n > 2)
        var += ta.t2 * tb.t2 / (9.0 * dn * (dn - 1) * (dn - 2));
    var += ta.t1 * tb.t1 / (2.0 * dn * (dn - 1));
    if (var <= 0.0) {
        out.p = 1.0;
    } else {
        double z = s / std::sqrt(var);
        out.p = std::erfc(std::abs(z) / std::sqrt(2.0));
    }
    return out;
}

TrendFit trend_fit(std::span<const double> x, std::span<const double> y) {
    TrendFit out;
    out.n = x.size();
    LinearFit fit = linfit(x, y);
    out.slope = fit.slope;
    out.intercept = fit.intercept;

    if (x.size() < 3)
        fail(ErrorCode::invalid_argument, "trend_fit needs n >= 3");
    bool constant_y = std::all_of(y.begin(), y.end(),
                                  [&](double v) { return v == y[0]; });
    if (constant_y) {
        out.pearson_r = 0.0;
        out.p_value = 1.0;
    } else {
        Correlation c = pearson(x, y);
        out.pearson_r = c.r;
        out.p_value = c.p;
    }
    return out;
}

} // namespace meco
