#include <doctest.h>

#include <cmath>
#include <vector>

#include "traplab/besq.hpp"
#include "traplab/rng.hpp"
#include "traplab/stats.hpp"

using namespace traplab;

TEST_CASE("transition: absorbing state and parameter validation") {
    Rng rng(1);
    CHECK(besq_transition(0, 0.0, 1.0, rng) == 0.0);
    CHECK_THROWS(besq_transition(1, 1.0, 1.0, rng));
    CHECK_THROWS(besq_transition(3, 1.0, 1.0, rng));
    CHECK_THROWS(besq_transition(2, -1.0, 1.0, rng));
    CHECK_THROWS(besq_transition(2, 1.0, 0.0, rng));
}

TEST_CASE("transition: dim 2 from 0 has mean 2t") {
    Rng rng(3);
    const double t = 0.7;
    const int n = 1000000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double y = besq_transition(2, 0.0, t, rng);
        s += y;
        s2 += y * y;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::fabs(mean - 2.0 * t) < 3 * se);
}

TEST_CASE("transition: mean identity E[y'] = y + dim t for both dims") {
    Rng rng(5);
    for (int dim : {0, 2}) {
        for (double y : {0.5, 2.0}) {
            const double t = 0.4;
            const int n = 400000;
            double s = 0, s2 = 0;
            for (int i = 0; i < n; ++i) {
                const double v = besq_transition(dim, y, t, rng);
                s += v;
                s2 += v * v;
            }
            const double mean = s / n;
            const double se = std::sqrt((s2 / n - mean * mean) / n);
            CHECK(std::fabs(mean - besq_mean(dim, y, t)) < 3.5 * se);
        }
    }
}

TEST_CASE("transition: dim 0 absorption probability exp(-y/(2t))") {
    Rng rng(7);
    const int n = 1000000;
    int zeros = 0;
    for (int i = 0; i < n; ++i) zeros += (besq_transition(0, 1.0, 1.0, rng) == 0.0) ? 1 : 0;
    const double p = std::exp(-0.5);
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::fabs(static_cast<double>(zeros) / n - p) < 3 * se);
    CHECK(p == doctest::Approx(0.6065).epsilon(1e-3));
}

TEST_CASE("path: dim 2 from 0 at t=1 is 2 Exp(1) in law") {
    Rng rng(9);
    const int n = 100000;
    std::vector<double> exact(n), reference(n);
    const std::vector<double> grid{1.0};
    for (int i = 0; i < n; ++i) {
        exact[i] = besq_path(2, 0.0, grid, BesqMethod::exact, rng).values[0];
        reference[i] = 2.0 * rng.exponential(1.0);
    }
    const auto ks = ks_two_sample(exact, reference);
    CHECK(ks.d < ks.critical(0.05));
}

TEST_CASE("path: exact vs euler marginals agree at t=1, both dims") {
    Rng rng(11);
    const int n = 4000;
    const std::vector<double> grid{1.0};
    for (int dim : {0, 2}) {
        const double y0 = 1.5;
        std::vector<double> exact(n), euler(n);
        for (int i = 0; i < n; ++i) {
            exact[i] = besq_path(dim, y0, grid, BesqMethod::exact, rng).values[0];
            euler[i] = besq_path(dim, y0, grid, BesqMethod::euler, rng, 2e-4).values[0];
        }
        const auto ks = ks_two_sample(exact, euler);
        CHECK(ks.d < ks.critical(0.05));
    }
}

TEST_CASE("path: euler refuses too coarse a step and a singular start") {
    Rng rng(13);
    const std::vector<double> grid{1.0};
    CHECK_THROWS(besq_path(2, 1.0, grid, BesqMethod::euler, rng, 0.01));
    CHECK_THROWS(besq_path(2, 0.0, grid, BesqMethod::euler, rng));
}

TEST_CASE("path: grid validation and absorption bookkeeping") {
    Rng rng(17);
    const std::vector<double> bad{1.0, 0.5};
    CHECK_THROWS(besq_path(2, 0.0, bad, BesqMethod::exact, rng));

    const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
    for (int i = 0; i < 200; ++i) {
        const auto path = besq_path(0, 1.0, grid, BesqMethod::exact, rng);
        if (path.absorbed_at) {
            for (std::size_t j = *path.absorbed_at; j < path.values.size(); ++j) {
                CHECK(path.values[j] == 0.0);
            }
        }
        for (double v : path.values) CHECK(v >= 0.0);
    }
}

TEST_CASE("markov semigroup: chained transitions equal one long transition in law") {
    Rng rng(19);
    const int n = 30000;
    for (int dim : {0, 2}) {
        std::vector<double> chained(n), direct(n);
        for (int i = 0; i < n; ++i) {
            const double mid = besq_transition(dim, 1.0, 0.6, rng);
            chained[i] = mid > 0.0 || dim == 2 ? besq_transition(dim, mid, 0.9, rng) : 0.0;
            direct[i] = besq_transition(dim, 1.0, 1.5, rng);
        }
        const auto ks = ks_two_sample(chained, direct);
        CHECK(ks.d < ks.critical(0.05));
    }
}

TEST_CASE("scaling: c^{-1} (value at ct from cy) matches (value at t from y)") {
    Rng rng(23);
    const int n = 30000;
    for (double c : {4.0, 16.0}) {
        for (int dim : {0, 2}) {
            std::vector<double> scaled(n), base(n);
            for (int i = 0; i < n; ++i) {
                scaled[i] = besq_transition(dim, c * 1.0, c * 0.8, rng) / c;
                base[i] = besq_transition(dim, 1.0, 0.8, rng);
            }
            const auto ks = ks_two_sample(scaled, base);
            CHECK(ks.d < ks.critical(0.05));
        }
    }
}

TEST_CASE("absorption probability is nondecreasing in t") {
    Rng rng(29);
    const int n = 60000;
    double prev = -1.0;
    for (double t : {0.3, 0.6, 1.2, 2.4}) {
        int zeros = 0;
        for (int i = 0; i < n; ++i) zeros += (besq_transition(0, 1.0, t, rng) == 0.0) ? 1 : 0;
        const double frac = static_cast<double>(zeros) / n;
        CHECK(frac > prev - 0.01);
        prev = frac;
    }
}
