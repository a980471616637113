#include <doctest.h>

#include <cmath>
#include <vector>

#include "traplab/coupling.hpp"
#include "traplab/stats.hpp"

using namespace traplab;

namespace {

// alpha = 1/2 closed form: V_1 is the one-sided stable law with Laplace
// transform exp(-sqrt(pi) sqrt(lambda)), whose CDF is erfc(sqrt(pi)/(2 sqrt(x))).
double levy_cdf(double x) { return x <= 0.0 ? 0.0 : std::erfc(std::sqrt(M_PI) / (2.0 * std::sqrt(x))); }

const CouplingMap& small_map() {
    static const CouplingMap map = build_coupling_map(0.5, 1e5, 1024);
    return map;
}

} // namespace

TEST_CASE("stable cdf: limits") {
    CHECK(stable_cdf_v1(0.0, 0.5) == 0.0);
    CHECK(stable_cdf_v1(-1.0, 0.5) == 0.0);
    CHECK(stable_cdf_v1(1e9, 0.5) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("stable cdf: alpha = 1/2 closed form, including x = pi/4") {
    CHECK(stable_cdf_v1(M_PI / 4.0, 0.5) == doctest::Approx(std::erfc(1.0)).epsilon(1e-5));
    CHECK(std::erfc(1.0) == doctest::Approx(0.1573).epsilon(1e-3));
    double max_err = 0.0;
    for (double lx = std::log(0.01); lx <= std::log(100.0) + 1e-9; lx += 0.1) {
        const double x = std::exp(lx);
        max_err = std::max(max_err, std::fabs(stable_cdf_v1(x, 0.5) - levy_cdf(x)));
    }
    CHECK(max_err < 1e-5);
}

TEST_CASE("stable cdf vs sampler: DKW band at several alphas") {
    for (double alpha : {0.3, 0.8}) {
        Rng rng(7);
        const int n = 40000;
        std::vector<double> draws(n);
        for (auto& v : draws) v = stable_increment(1.0, alpha, rng);
        std::sort(draws.begin(), draws.end());
        // DKW 99% band
        const double band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            const auto idx = static_cast<std::size_t>(i * (n / 40));
            const double x = draws[idx];
            const double ecdf = static_cast<double>(idx + 1) / n;
            worst = std::max(worst, std::fabs(ecdf - stable_cdf_v1(x, alpha, 1e-7)));
        }
        CHECK(worst < band + 1.0 / n);
    }
}

TEST_CASE("coupling map: boundary, monotonicity, generalized-inverse laws") {
    const auto& map = small_map();
    CHECK(map.g[0] == 0.0);
    CHECK(map.g_of(1.0) == 0.0);
    CHECK(map.g_of(0.5) == 0.0);
    for (std::size_t i = 1; i < map.u.size(); ++i) {
        CHECK(map.g[i] >= map.g[i - 1]);
    }
    for (std::size_t i = 1; i < map.u.size(); i += 37) {
        CHECK(map.g_inv(map.g[i]) <= map.u[i] * (1.0 + 1e-9));
        CHECK(map.g_of(map.g_inv(map.g[i])) >= map.g[i] * (1.0 - 1e-9));
    }
}

TEST_CASE("coupling map: tabulation error against direct bisection") {
    const auto& map = small_map();
    Rng rng(11);
    for (int i = 0; i < 12; ++i) {
        const double u = std::exp(rng.uniform(std::log(1.5), std::log(9e4)));
        const double level = 1.0 - std::pow(u, -0.5);
        double lo = 0.0, hi = 1.0;
        while (stable_cdf_v1(hi, 0.5) < level) hi *= 2.0;
        while (hi - lo > 1e-9 * hi) {
            const double mid = 0.5 * (lo + hi);
            (stable_cdf_v1(mid, 0.5) < level ? lo : hi) = mid;
        }
        CHECK(map.g_of(u) == doctest::Approx(0.5 * (lo + hi)).epsilon(2e-3));
    }
}

TEST_CASE("coupling map: G^{-1}(V_1) is Pareto(alpha) in law") {
    const auto& map = small_map();
    Rng rng(13);
    const int n = 20000;
    std::vector<double> mapped(n), pareto(n);
    for (int i = 0; i < n; ++i) {
        mapped[i] = map.g_inv(stable_increment(1.0, 0.5, rng));
        pareto[i] = pareto_depth(0.5, rng.uniform_pos());
    }
    const auto ks = ks_two_sample(mapped, pareto);
    CHECK(ks.d < ks.critical(0.05));
}

TEST_CASE("coupled traps: marginal law and lag-1 independence") {
    const auto& map = small_map();
    Rng rng(17);
    const double eps = 0.125;
    const long z_lo = 0, z_hi = 4095;
    std::vector<double> inc(static_cast<std::size_t>(z_hi - z_lo + 1));
    for (auto& v : inc) v = stable_increment(eps, 0.5, rng);
    const TrapEnvironment env = sample_coupled_traps(eps, z_lo, z_hi, inc, map);

    std::vector<double> pareto(env.depths.size());
    for (auto& v : pareto) v = pareto_depth(0.5, rng.uniform_pos());
    const auto ks = ks_two_sample(env.depths, pareto);
    CHECK(ks.d < ks.critical(0.05));

    // correlate the bounded Pareto-CDF transform of adjacent coupled traps
    auto u = [](double tau) { return 1.0 - std::pow(std::max(tau, 1.0), -0.5); };
    double sx = 0, sxx = 0, sxy = 0;
    const std::size_t n = env.depths.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = u(env.depths[i]);
        const double b = u(env.depths[i + 1]);
        sx += a;
        sxx += a * a;
        sxy += a * b;
    }
    const double mean = sx / static_cast<double>(n);
    const double corr =
        (sxy / static_cast<double>(n) - mean * mean) / (sxx / static_cast<double>(n) - mean * mean);
    CHECK(std::fabs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));

    std::vector<double> wrong(inc.begin(), inc.end() - 1);
    CHECK_THROWS(sample_coupled_traps(eps, z_lo, z_hi, wrong, map));
}

TEST_CASE("subordinator self-similarity: scaled short increments match unit increments") {
    Rng rng(19);
    const double eps = 0.0625;
    const int n = 20000;
    std::vector<double> scaled(n), unit(n);
    for (int i = 0; i < n; ++i) {
        scaled[i] = std::pow(eps, -2.0) * stable_increment(eps, 0.5, rng); // eps^{-1/alpha}
        unit[i] = stable_increment(1.0, 0.5, rng);
    }
    const auto ks = ks_two_sample(scaled, unit);
    CHECK(ks.d < ks.critical(0.05));
}

TEST_CASE("vague convergence: the zero function gives zero differences") {
    const auto& map = small_map();
    Rng rng(23);
    const auto rep = vague_convergence_check(0.5, [](double) { return 0.0; }, map, rng, 3, 6, 8);
    for (double d : rep.diffs) CHECK(d == 0.0);
}

TEST_CASE("vague convergence: triangle bump differences shrink along the dyadic scales") {
    const auto& map = small_map();
    Rng rng(29);
    const auto rep = vague_convergence_check(0.5, triangle_bump, map, rng, 3, 10, 12);
    REQUIRE(rep.diffs.size() == 8);
    CHECK(rep.trend_slope <= 0.0);
    CHECK(rep.final_relative_diff < 0.01);
    CHECK(rep.reference > 0.0);
}

TEST_CASE("vague convergence: raised cosine behaves the same way") {
    const auto& map = small_map();
    Rng rng(31);
    const auto rep = vague_convergence_check(0.5, raised_cosine_bump, map, rng, 3, 10, 12);
    CHECK(rep.trend_slope <= 0.0);
    CHECK(rep.final_relative_diff < 0.02);
}
