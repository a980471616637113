#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "traplab/environment.hpp"
#include "traplab/rng.hpp"

namespace traplab {

// CDF of the unit subordinator increment V_1, by adaptive quadrature of the
// single-integral representation of positive stable laws (the same Zolotarev
// function that powers the exact sampler). Absolute tolerance abs_tol.
double stable_cdf_v1(double x, double alpha, double abs_tol = 1e-8);

// Tabulated nondecreasing map G defined by P(V_1 > G(u)) = P(tau_0 > u), with
// its right-continuous generalized inverse. Interpolation is linear on the
// first cell (where G vanishes) and log-log linear elsewhere; beyond the
// table both directions extend by the last cell's power law.
struct CouplingMap {
    double alpha = 0.5;
    std::vector<double> u; // log-spaced on [1, u_max]; u[0] == 1
    std::vector<double> g; // G(u) per grid point; g[0] == 0

    double g_of(double uu) const;
    double g_inv(double s) const; // inf{t : G(t) >= s}
};

CouplingMap build_coupling_map(double alpha, double u_max = 1e6, std::size_t table_size = 4096,
                               double cdf_tol = 1e-8);

// Coupled traps tau_z = G^{-1}(eps^{-1/alpha} * increment_z) from exact
// subordinator increments over the cells (eps z, eps (z+1)], z in [z_lo,z_hi].
TrapEnvironment sample_coupled_traps(double epsilon, long z_lo, long z_hi,
                                     std::span<const double> increments, const CouplingMap& map);

// Built-in continuous, compactly supported test functions on [-1, 1].
double triangle_bump(double x);
double raised_cosine_bump(double x);

struct VagueConvergenceReport {
    double alpha = 0.5;
    int k_min = 3;
    int k_max = 10;
    int k_ref = 12;
    double reference = 0.0;          // finest-refinement integral of f against rho
    std::vector<double> diffs;       // |integral against rho^(2^-k) - reference|
    double trend_slope = 0.0;        // OLS slope of diffs vs k
    double final_relative_diff = 0.0;
};

// Couples one subordinator realization across scales: increments are drawn
// once on the dyadic refinement 2^-k_ref of [-2,2] and summed upward, so
// every rho^eps and the reference integral use the same realization exactly.
VagueConvergenceReport vague_convergence_check(double alpha,
                                               const std::function<double(double)>& f,
                                               const CouplingMap& map, Rng& rng, int k_min = 3,
                                               int k_max = 10, int k_ref = 12);

} // namespace traplab
