#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "traplab/rng.hpp"
#include "traplab/stats.hpp"

namespace traplab {

// Estimated Brownian local-time profile at the first passage of -a, from a
// walk with space step delta: occupation time per width-h bin divided by h.
// Bins are centered at integer multiples of h.
struct LocalTimeProfile {
    double a = 1.0;
    double h = 0.05;
    double delta = 1e-3;
    double hit_time = 0.0;
    long bin_lo = 0;
    std::vector<double> values; // local-time estimate for bin (bin_lo + i)

    double bin_center(long b) const { return static_cast<double>(b) * h; }
    double value_at(double x) const;
    double total_occupation() const; // sum of value * h over bins; equals hit_time
};

enum class ProfileMethod {
    // Literal delta-step walk. Exact but its cost is the realized hit time
    // over delta^2 steps, and first-passage times are heavy tailed; use at
    // coarse delta / small a.
    stepped,
    // Equal-in-law construction from the walk's edge-crossing counts (a
    // critical branching chain with one immigrant per level below the start).
    // Cost scales with the spatial range instead of the hit time.
    crossing,
};

LocalTimeProfile local_time_profile_at_hit(double a, double h, double delta, Rng& rng,
                                           ProfileMethod method = ProfileMethod::crossing,
                                           std::uint64_t step_cap = 40'000'000'000ull);

// One oracle draw of the binned profile at each (ascending) probe point:
// exact squared-Bessel transitions along the delta-grid inside each probe's
// bin — dimension 2 left of the origin, dimension 0 to the right — averaged
// exactly the way the walk profile bins average.
std::vector<double> besq_profile_oracle_draw(double a, double h, double delta,
                                             std::span<const double> probes_sorted, Rng& rng);

struct ProbeStat {
    double x = 0.0;
    KsResult ks;
    double mean_profile = 0.0;
    double mean_oracle = 0.0;
    double zero_frac_profile = 0.0;
    double zero_frac_oracle = 0.0;
};

struct RayKnightReport {
    double a = 1.0;
    double h = 0.05;
    double delta = 1e-3;
    std::size_t n_samples = 0;
    std::vector<ProbeStat> probes;
};

RayKnightReport rayknight_check(double a, std::size_t n_samples, std::span<const double> probes,
                                double delta, double h, Rng& rng,
                                ProfileMethod method = ProfileMethod::crossing);

// Empirical two-sided probe of the product lower bound on the probability
// that the diffusion reaches -n^{1/(1+alpha)}(n+1)/n by time (n+2)/n.
struct LemmaProbeReport {
    int n = 2;
    double alpha = 0.5;
    double a = 1.0;
    std::size_t n_samples = 0;
    double hit_level = 0.0; // n^{1/(1+alpha)} (n+1)/n, probed on the negative side
    double deadline = 0.0;  // (n+2)/n
    double lhs = 0.0;       // P(hit by deadline), fin jump-chain estimate
    double lhs_se = 0.0;
    double factor_x = 0.0; // P_a( sum v_i X(x_i) over (0,inf) <= 1 ), dim-0 side
    double factor_x_se = 0.0;
    double factor_y = 0.0; // P_a( sum v_i Y(x_i) over (0,1] <= 1 ; Y_1 <= a ), dim-2 side
    double factor_y_se = 0.0;
    double rhs = 0.0; // factor_x * factor_y^{n+1}
    double rhs_se = 0.0;
    std::size_t undecided_x = 0; // dim-0 integrals undecided at the window cap (counted as success)
    bool inconclusive = false;
};

LemmaProbeReport probe_lemma_G1(int n, double alpha, double a, std::size_t n_samples, Rng& rng,
                                double v_min_factors = 1e-4, double v_min_chain = 1e-3,
                                double chain_window = 20.0);

} // namespace traplab
