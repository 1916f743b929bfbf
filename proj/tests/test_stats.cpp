#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "oracles.hpp"
#include "stats.hpp"

using namespace meco;

TEST_CASE("pearson on exact lines") {
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
        x.push_back(i);
        y.push_back(2.0 * i + 1.0);
    }
    Correlation c = pearson(x, y);
    CHECK(c.r == doctest::Approx(1.0));
    CHECK(c.p == doctest::Approx(0.0).epsilon(1e-12));

    for (auto& v : y) v = -v;
    c = pearson(x, y);
    CHECK(c.r == doctest::Approx(-1.0));
}

TEST_CASE("pearson hand-computed value") {
    std::vector<double> x{1, 2, 3};
    std::vector<double> y{1, 2, 2};
    Correlation c = pearson(x, y);
    CHECK(c.r == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("pearson rejects degenerate input") {
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2},
                            std::vector<double>{1, 2}),
                    Error);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1},
                            std::vector<double>{1, 2, 3}),
                    Error);
}

TEST_CASE("pearson p-value matches the t distribution") {
    // Reference values from an independent statistics package.
    CHECK(student_t_two_sided_p(4.2163702135578375, 10) ==
          doctest::Approx(0.001781840000000003).epsilon(1e-12));
    CHECK(student_t_two_sided_p(1.3, 5) ==
          doctest::Approx(0.25030063417067716).epsilon(1e-12));
    CHECK(student_t_two_sided_p(2.7, 58) ==
          doctest::Approx(0.009071966200606345).epsilon(1e-12));
    CHECK(student_t_two_sided_p(2.2281388519649385, 10) ==
          doctest::Approx(0.05).epsilon(1e-6));
    CHECK(student_t_two_sided_p(0.0, 7) == doctest::Approx(1.0));

    std::vector<double> x, y;
    double noise[] = {0.5, -1, 2, 0, 1, -0.5, 0.25, -2, 1.5, 0, -1, 0.75};
    for (int i = 0; i < 12; ++i) {
        x.push_back(i);
        y.push_back(2.0 * i + 1.0 + noise[i]);
    }
    Correlation c = pearson(x, y);
    CHECK(c.r == doctest::Approx(0.9875280040936291).epsilon(1e-14));
    CHECK(c.p == doctest::Approx(2.3274551660528967e-09).epsilon(1e-10));
}

TEST_CASE("ci95 half-width") {
    CHECK(ci95_halfwidth(std::vector<double>{3, 3, 3, 3}) == doctest::Approx(0.0));
    CHECK(ci95_halfwidth(std::vector<double>{0, 2}) ==
          doctest::Approx(1.96).epsilon(1e-12));
    // Quadrupling n at the same sample stddev halves the width. Rescale the
    // repeated sample so its n-1 stddev matches the original exactly.
    std::vector<double> small{0, 2, 0, 2};
    std::vector<double> big;
    for (int i = 0; i < 4; ++i) big.insert(big.end(), small.begin(), small.end());
    double ratio = sample_stddev(small) / sample_stddev(big);
    for (auto& v : big) v *= ratio;
    CHECK(sample_stddev(big) ==
          doctest::Approx(sample_stddev(small)).epsilon(1e-12));
    CHECK(ci95_halfwidth(big) ==
          doctest::Approx(ci95_halfwidth(small) / 2.0).epsilon(1e-9));
    CHECK_THROWS_AS(ci95_halfwidth(std::vector<double>{1}), Error);
}

TEST_CASE("linfit recovers exact lines") {
    std::vector<double> x{0, 1, 2, 3};
    std::vector<double> y{-2, 1, 4, 7};
    LinearFit f = linfit(x, y);
    CHECK(f.slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(-2.0).epsilon(1e-12));

    LinearFit flat = linfit(x, std::vector<double>{5, 5, 5, 5});
    CHECK(flat.slope == doctest::Approx(0.0));

    LinearFit tri = linfit(std::vector<double>{0, 1, 2},
                           std::vector<double>{0, 1, 0});
    CHECK(tri.slope == doctest::Approx(0.0));
    CHECK(tri.intercept == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(linfit(std::vector<double>{2, 2, 2},
                           std::vector<double>{1, 2, 3}),
                    Error);
}

TEST_CASE("linfit residuals are orthogonal to x") {
    std::mt19937_64 rng(17);
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(static_cast<double>(rng() % 1000) / 10.0);
        y.push_back(static_cast<double>(rng() % 1000) / 7.0);
    }
    LinearFit f = linfit(x, y);
    double dot = 0, scale = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.slope * x[i] + f.intercept);
        dot += r * x[i];
        scale += std::abs(r * x[i]);
    }
    CHECK(std::abs(dot) <= 1e-9 * std::max(1.0, scale));
}

TEST_CASE("kendall tau-b on exact orderings") {
    std::vector<double> identity, reversed;
    for (int i = 0; i < 10; ++i) {
        identity.push_back(i);
        reversed.push_back(9 - i);
    }
    CHECK(kendall_tau_b(identity, identity).tau == doctest::Approx(1.0));
    CHECK(kendall_tau_b(identity, reversed).tau == doctest::Approx(-1.0));
    CHECK_THROWS_AS(kendall_tau_b(std::vector<double>{1, 1, 1},
                                  std::vector<double>{1, 2, 3}),
                    Error);
}

TEST_CASE("kendall tau-b equals the pair-count oracle on tied data") {
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 200; ++round) {
        std::size_t n = 3 + rng() % 48;
        std::vector<double> a, b;
        bool ok = false;
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(static_cast<double>(rng() % 8));
            b.push_back(static_cast<double>(rng() % 8));
        }
        // Need at least one untied pair per side.
        for (std::size_t i = 1; i < n && !ok; ++i)
            ok = a[i] != a[0];
        if (!ok) a[0] += 100;
        ok = false;
        for (std::size_t i = 1; i < n && !ok; ++i)
            ok = b[i] != b[0];
        if (!ok) b[0] += 100;

        TauResult got = kendall_tau_b(a, b);
        testing::NaiveTau expected = testing::kendall_by_pairs(a, b);
        CHECK(std::abs(got.tau - expected.tau) <= 1e-12);
    }
}

TEST_CASE("kendall tau-b p-value matches the reference implementation") {
    // Tie-corrected normal approximation; reference values from an
    // independent statistics package.
    TauResult t1 = kendall_tau_b(std::vector<double>{1, 3, 2, 3, 5, 0, 1},
                                 std::vector<double>{2, 2, 1, 4, 5, 1, 0});
    CHECK(t1.tau == doctest::Approx(0.6842105263157894).epsilon(1e-14));
    CHECK(t1.p == doctest::Approx(0.041136383569940586).epsilon(1e-12));

    TauResult t2 =
        kendall_tau_b(std::vector<double>{4, 1, 1, 2, 7, 7, 3, 0, 5, 5, 5, 2},
                      std::vector<double>{1, 2, 2, 3, 3, 0, 9, 4, 4, 1, 5, 5});
    CHECK(t2.tau == doctest::Approx(-0.16529490122682158).epsilon(1e-14));
    CHECK(t2.p == doctest::Approx(0.48109068193788673).epsilon(1e-12));
}

TEST_CASE("kendall tau-b is symmetric and antisymmetric under reversal") {
    std::vector<double> a{1, 3, 2, 3, 5, 0, 1};
    std::vector<double> b{2, 2, 1, 4, 5, 1, 0};
    TauResult ab = kendall_tau_b(a, b);
    TauResult ba = kendall_tau_b(b, a);
    CHECK(ab.tau == doctest::Approx(ba.tau).epsilon(1e-12));

    std::vector<double> neg_b;
    for (double v : b) neg_b.push_back(-v);
    TauResult flipped = kendall_tau_b(a, neg_b);
    CHECK(flipped.tau == doctest::Approx(-ab.tau).epsilon(1e-12));
    // Monotone transform invariance: cube the scores.
    std::vector<double> cubed;
    for (double v : b) cubed.push_back(v * v * v);
    CHECK(kendall_tau_b(a, cubed).tau == doctest::Approx(ab.tau).epsilon(1e-12));
}

TEST_CASE("incomplete beta sanity") {
    CHECK(incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(incomplete_beta(2, 2, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    // I_x(2,3) = x^2(6 - 8x + 3x^2)
    double x = 0.37;
    CHECK(incomplete_beta(2, 3, x) ==
          doctest::Approx(x * x * (6 - 8 * x + 3 * x * x)).epsilon(1e-12));
}

TEST_CASE("pearson invariance under positive affine transforms") {
    std::vector<double> x{1, 4, 2, 8, 5, 7};
    std::vector<double> y{2, 3, 1, 9, 4, 6};
    double base = pearson(x, y).r;
    std::vector<double> x2;
    for (double v : x) x2.push_back(3.5 * v + 11.0);
    CHECK(pearson(x2, y).r == doctest::Approx(base).epsilon(1e-12));
    std::vector<double> x3;
    for (double v : x) x3.push_back(-2.0 * v);
    CHECK(pearson(x3, y).r == doctest::Approx(-base).epsilon(1e-12));
}

TEST_CASE("trend_fit reports r = 0 for constant y") {
    std::vector<double> x{0, 1, 2, 3};
    std::vector<double> y{4, 4, 4, 4};
    TrendFit t = trend_fit(x, y);
    CHECK(t.slope == doctest::Approx(0.0));
    CHECK(t.pearson_r == 0.0);
    CHECK(t.p_value == 1.0);
}
