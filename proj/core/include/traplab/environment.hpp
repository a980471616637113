#pragma once

#include <cstdint>
#include <vector>

#include "traplab/rng.hpp"

namespace traplab {

// Inverse CDF of the unit-minimum Pareto trap law, P(tau >= u) = u^{-alpha}
// for u >= 1. Takes a uniform draw from (0,1).
double pareto_depth(double alpha, double u01);

// Deterministic per-site depth: every lattice site has its own substream of
// the environment's site seed, so lazily extended windows agree with
// pre-materialized ones draw for draw.
double site_depth(std::uint64_t site_seed, double alpha, long z);

// I.i.d. heavy-tailed trap depths on a lattice window.
struct TrapEnvironment {
    double alpha = 0.5;
    std::uint64_t site_seed = 0;
    long z_lo = 0;
    long z_hi = 0;
    std::vector<double> depths; // depths[z - z_lo]

    long width() const { return z_hi - z_lo + 1; }
    bool in_window(long z) const { return z >= z_lo && z <= z_hi; }

    // In-window lookup; throws std::out_of_range outside the window.
    double depth(long z) const;

    // Window lookup with deterministic on-the-fly generation outside it.
    double depth_anywhere(long z) const;
};

TrapEnvironment sample_trap_depths(double alpha, long z_lo, long z_hi, Rng& rng);

// Standard one-sided stable variate S with E[exp(-lambda S)] = exp(-lambda^alpha),
// sampled exactly by Kanter's two-uniform representation.
double standard_positive_stable(double alpha, Rng& rng);

// Subordinator increment over an interval of the given length:
// E[exp(-lambda V)] = exp(-length * Gamma(1-alpha) * lambda^alpha).
double stable_increment(double length, double alpha, Rng& rng);

struct Atom {
    double x = 0.0;
    double v = 0.0;
};

// Truncated atomic approximation of the subordinator's Stieltjes measure on a
// window: a Poisson cloud of atoms with weights >= v_min.
struct AtomicMeasure {
    double alpha = 0.5;
    double lo = 0.0;
    double hi = 0.0;
    double v_min = 1e-3;
    std::vector<Atom> atoms; // strictly increasing in x

    std::size_t size() const { return atoms.size(); }

    // Total weight of atoms with a < x <= b. The queried interval must lie
    // inside [lo, hi]; mass outside the window is not represented.
    double mass(double a, double b) const;
};

AtomicMeasure sample_atoms(double alpha, double lo, double hi, double v_min, Rng& rng);

// Mean mass per unit length removed by truncating atoms below v_min:
// alpha * v_min^{1-alpha} / (1-alpha).
double truncation_deficit(double alpha, double v_min);

} // namespace traplab
