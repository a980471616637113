#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "traplab/stats.hpp"
#include "traplab/trap_walk.hpp"

using namespace traplab;

namespace {

// frozen all-ones environment on a window, no randomness in the depths
TrapEnvironment flat_env(long lo, long hi) {
    TrapEnvironment env;
    env.alpha = 0.5;
    env.z_lo = lo;
    env.z_hi = hi;
    env.site_seed = 0xfeed;
    env.depths.assign(static_cast<std::size_t>(hi - lo + 1), 1.0);
    return env;
}

} // namespace

TEST_CASE("trajectory invariants: unit steps, strictly increasing times") {
    Rng rng(51);
    TrapEnvironment env = sample_trap_depths(0.5, -4, 4, rng);
    for (int rep = 0; rep < 100; ++rep) {
        const Trajectory traj = simulate_btm_path(env, 5.0, rng);
        double prev_t = 0.0;
        double prev_x = traj.start;
        for (const auto& [t, x] : traj.events) {
            CHECK(t > prev_t);
            CHECK(std::fabs(x - prev_x) == doctest::Approx(1.0));
            prev_t = t;
            prev_x = x;
        }
    }
}

TEST_CASE("all tau = 1: event count is a rate-1 renewal clock") {
    Rng rng(53);
    const auto env = flat_env(-2000, 2000);
    const double t = 10.0;
    const int n = 200000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += static_cast<double>(btm_endpoint_at(env, t, rng).n_events);
    const double se = std::sqrt(t / n);
    CHECK(std::fabs(s / n - t) < 3 * se);
}

TEST_CASE("annealed symmetry: E[X_t] = 0 within CI") {
    Rng rng(59);
    const double t = 10.0;
    const int n = 50000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        TrapEnvironment env = sample_trap_depths(0.5, -8, 8, rng);
        const double x = static_cast<double>(btm_position_at(env, t, rng));
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::fabs(mean) < 3 * se);
}

TEST_CASE("all tau = 1: Var(X_t) = t by the law of total variance") {
    Rng rng(61);
    const auto env = flat_env(-2000, 2000);
    const double t = 10.0;
    const int n = 100000;
    double s = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(btm_position_at(env, t, rng));
        s += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    const double var = s2 / n; // mean is 0 by symmetry
    const double se_var = std::sqrt((s4 / n - var * var) / n);
    CHECK(std::fabs(var - t) < 3.5 * se_var);
}

TEST_CASE("position at t=0 is the origin; window must contain it") {
    Rng rng(67);
    const auto env = flat_env(-3, 3);
    CHECK(btm_position_at(env, 0.0, rng) == 0);
    auto off = flat_env(2, 8);
    CHECK_THROWS(btm_position_at(off, 1.0, rng));
}

TEST_CASE("memory-light endpoint agrees with the stored path pathwise on paired seeds") {
    const auto env = flat_env(-500, 500);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        Rng a(seed), b(seed);
        const Trajectory traj = simulate_btm_path(env, 7.0, a);
        const long endpoint = btm_position_at(env, 7.0, b);
        const double last = traj.events.empty() ? traj.start : traj.events.back().second;
        CHECK(static_cast<long>(last) == endpoint);
    }
}

TEST_CASE("tail monotonicity: P(|X_t| >= 12) < P(|X_t| >= 8)") {
    Rng rng(71);
    const auto env = flat_env(-400, 400);
    const double t = 10.0;
    const int n = 100000;
    int k8 = 0, k12 = 0;
    for (int i = 0; i < n; ++i) {
        const long x = std::labs(btm_position_at(env, t, rng));
        k8 += (x >= 8) ? 1 : 0;
        k12 += (x >= 12) ? 1 : 0;
    }
    CHECK(k12 < k8);
}

TEST_CASE("hitting time: level 0 is hit immediately; signs are symmetric in law") {
    Rng rng(73);
    const auto env = flat_env(-300, 300);
    CHECK(btm_hitting_time(env, 0, rng).time == 0.0);

    const int n = 4000;
    const std::uint64_t cap = 400000;
    std::vector<double> up(n), down(n);
    for (int i = 0; i < n; ++i) {
        const auto hu = btm_hitting_time(env, 4, rng, cap);
        const auto hd = btm_hitting_time(env, -4, rng, cap);
        // censor both samples at the same value so the comparison stays fair
        up[i] = std::min(hu.time, 1e9);
        down[i] = std::min(hd.time, 1e9);
    }
    const auto ks = ks_two_sample(up, down);
    CHECK(ks.d < ks.critical(0.05));
}

TEST_CASE("two-sided exit of +-5 on tau = 1 takes 25 jumps on average") {
    Rng rng(79);
    const auto env = flat_env(-100, 100);
    const int n = 20000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const auto hit = btm_exit_time(env, 5, rng);
        REQUIRE(!hit.truncated);
        s += hit.time;
        s2 += hit.time * hit.time;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::fabs(mean - 25.0) < 3.5 * se);
}

TEST_CASE("event cap: tiny cap sets the truncated flag, hit returns the sentinel") {
    Rng rng(83);
    const auto env = flat_env(-50, 50);
    const Trajectory traj = simulate_btm_path(env, 1e6, rng, 10);
    CHECK(traj.truncated);
    const auto hit = btm_hitting_time(env, 40, rng, 10);
    CHECK(hit.truncated);
    CHECK(std::isinf(hit.time));
}

TEST_CASE("forward oracle: point mass at t=0 and conservation at t>0") {
    Rng rng(89);
    TrapEnvironment env = sample_trap_depths(0.5, -10, 10, rng);
    const auto p0 = btm_exact_marginal(env, 0.0);
    CHECK(p0[10] == doctest::Approx(1.0));
    const auto p = btm_exact_marginal(env, 3.0);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-8));
    for (double v : p) CHECK(v >= -1e-12);
}

TEST_CASE("forward oracle matches the reflecting walk on a frozen random environment") {
    Rng rng(97);
    TrapEnvironment env = sample_trap_depths(0.5, -6, 6, rng);
    const double t = 1.0;
    const auto oracle = btm_exact_marginal(env, t);

    const int n = 200000;
    std::vector<int> counts(static_cast<std::size_t>(env.width()), 0);
    for (int i = 0; i < n; ++i) {
        const long pos = btm_position_at_reflecting(env, t, rng);
        ++counts[static_cast<std::size_t>(pos - env.z_lo)];
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double p_hat = static_cast<double>(counts[i]) / n;
        const double se = binomial_se(std::max(p_hat, oracle[i]), n);
        CHECK(std::fabs(p_hat - oracle[i]) <= 4 * se + 1e-4);
    }
}

TEST_CASE("forward oracle: window cap") {
    TrapEnvironment env = flat_env(-3000, 3000);
    CHECK_THROWS(btm_exact_marginal(env, 1.0));
}
