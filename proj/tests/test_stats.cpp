#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "traplab/rng.hpp"
#include "traplab/stats.hpp"

using namespace traplab;

TEST_CASE("ks: identical samples give D = 0") {
    std::vector<double> xs{1.0, 2.0, 3.0};
    CHECK(ks_two_sample(xs, xs).d == doctest::Approx(0.0));
}

TEST_CASE("ks: disjoint supports give D = 1") {
    std::vector<double> xs{1.0, 2.0};
    std::vector<double> ys{5.0, 6.0, 7.0};
    CHECK(ks_two_sample(xs, ys).d == doctest::Approx(1.0));
}

TEST_CASE("ks: interleaved hand computation") {
    std::vector<double> xs{1.0, 2.0};
    std::vector<double> ys{1.5, 2.5};
    CHECK(ks_two_sample(xs, ys).d == doctest::Approx(0.5));
}

TEST_CASE("ks: empty sample is an error") {
    std::vector<double> xs{1.0};
    std::vector<double> empty;
    CHECK_THROWS(ks_two_sample(xs, empty));
}

TEST_CASE("ks: D is invariant under common strictly increasing transforms") {
    Rng rng(31);
    std::vector<double> xs(500), ys(700);
    for (auto& v : xs) v = rng.normal();
    for (auto& v : ys) v = rng.normal() * 1.3 + 0.2;
    const double d0 = ks_two_sample(xs, ys).d;
    auto warp = [](double v) { return std::exp(0.7 * v) + std::atan(v); };
    for (auto& v : xs) v = warp(v);
    for (auto& v : ys) v = warp(v);
    CHECK(ks_two_sample(xs, ys).d == doctest::Approx(d0));
}

TEST_CASE("ks: two N(0,1) samples pass at 95%") {
    Rng rng(37);
    std::vector<double> xs(5000), ys(5000);
    for (auto& v : xs) v = rng.normal();
    for (auto& v : ys) v = rng.normal();
    const auto ks = ks_two_sample(xs, ys);
    CHECK(ks.d < ks.critical(0.05));
}

TEST_CASE("binomial ci: boundary counts") {
    CHECK(binomial_ci(0, 10).lo == doctest::Approx(0.0));
    CHECK(binomial_ci(10, 10).hi == doctest::Approx(1.0));
    CHECK_THROWS(binomial_ci(5, 0));
    CHECK_THROWS(binomial_ci(11, 10));
}

TEST_CASE("binomial ci: k=5, n=10 Clopper-Pearson values") {
    // Frozen from the Beta-quantile identity: lo = BetaInv(.025; 5, 6),
    // hi = BetaInv(.975; 6, 5).
    const auto ci = binomial_ci(5, 10, 0.95);
    CHECK(ci.lo == doctest::Approx(0.1871).epsilon(5e-3));
    CHECK(ci.hi == doctest::Approx(0.8129).epsilon(5e-3));
}

TEST_CASE("binomial ci: coverage at p = 0.1 is at least nominal-ish") {
    Rng rng(41);
    const double p = 0.1;
    const int trials = 10000, n = 100;
    int covered = 0;
    for (int t = 0; t < trials; ++t) {
        std::uint64_t k = 0;
        for (int i = 0; i < n; ++i) k += (rng.uniform() < p) ? 1 : 0;
        covered += binomial_ci(k, n, 0.95).contains(p) ? 1 : 0;
    }
    CHECK(static_cast<double>(covered) / trials >= 0.94);
}

TEST_CASE("fit: noiseless exponential tail recovered exactly") {
    std::vector<FitPoint> pts;
    const std::uint64_t n = 1000000000ull;
    for (double y : {1.0, 2.0, 3.0, 4.0, 6.0, 8.0}) {
        const double p = std::exp(-2.0 * y);
        pts.push_back({y, static_cast<std::uint64_t>(std::llround(p * static_cast<double>(n))), n});
    }
    const auto fit = fit_tail_exponent(pts);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit.log_big_c == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("fit: slope invariant under common rescaling of all n") {
    std::vector<FitPoint> pts, pts10;
    for (double y : {1.0, 2.0, 4.0, 8.0}) {
        const double p = std::exp(-1.3 * y + 0.2);
        const auto n1 = static_cast<std::uint64_t>(1e7);
        const auto k1 = static_cast<std::uint64_t>(std::llround(p * 1e7));
        pts.push_back({y, k1, n1});
        pts10.push_back({y, k1 * 10, n1 * 10});
    }
    CHECK(fit_tail_exponent(pts).slope == doctest::Approx(fit_tail_exponent(pts10).slope));
}

TEST_CASE("fit: synthetic binomial data recovers the slope within its CI") {
    Rng rng(43);
    std::vector<FitPoint> pts;
    const std::uint64_t n = 1000000;
    for (double y = 1.0; y <= 8.0; y += 1.0) {
        const double p = std::exp(-2.0 * y);
        std::uint64_t k = rng.poisson(p * static_cast<double>(n)); // binomial at tiny p
        pts.push_back({y, k, n});
    }
    const auto fit = fit_tail_exponent(pts);
    CHECK(fit.slope_ci_lo <= 2.0);
    CHECK(2.0 <= fit.slope_ci_hi);
}

TEST_CASE("fit: dropping any single point moves the slope less than its CI half-width") {
    Rng rng(47);
    std::vector<FitPoint> pts;
    const std::uint64_t n = 4000000;
    for (double y = 1.0; y <= 8.0; y += 1.0) {
        const double p = std::exp(-1.0 * y);
        pts.push_back({y, rng.poisson(p * static_cast<double>(n)), n});
    }
    const auto full = fit_tail_exponent(pts);
    const double half_width = full.slope_ci_hi - full.slope;
    for (std::size_t drop = 0; drop < pts.size(); ++drop) {
        std::vector<FitPoint> sub;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i != drop) sub.push_back(pts[i]);
        }
        const auto fit = fit_tail_exponent(sub);
        CHECK(std::fabs(fit.slope - full.slope) < half_width);
    }
}

TEST_CASE("fit: rows below the success threshold are dropped and reported") {
    std::vector<FitPoint> pts{{1.0, 50000, 1000000},
                              {2.0, 5000, 1000000},
                              {4.0, 500, 1000000},
                              {6.0, 19, 1000000},
                              {0.5, 1000000, 1000000}}; // k == n carries no information
    const auto fit = fit_tail_exponent(pts);
    CHECK(fit.points_used == 3);
    CHECK(fit.points_dropped == 2);
}

TEST_CASE("fit: fewer than three usable points is an error") {
    std::vector<FitPoint> pts{{1.0, 1000, 10000}, {5.0, 10, 10000}};
    CHECK_THROWS_WITH_AS(fit_tail_exponent(pts), doctest::Contains("insufficient resolved tail"),
                         std::runtime_error);
}

TEST_CASE("fit: refuses a y range narrower than a factor of 4") {
    std::vector<FitPoint> pts{{1.0, 9000, 10000}, {1.5, 6000, 10000}, {2.0, 3000, 10000}};
    CHECK_THROWS(fit_tail_exponent(pts));
}
