#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "traplab/rng.hpp"

namespace traplab {

// Exact transition of a squared Bessel process of dimension 0 or 2 over a
// time step dt, via the Poisson-Gamma mixture representation. Dimension 0 is
// absorbed at 0; dimension 2 started anywhere stays positive.
double besq_transition(int dim, double y, double dt, Rng& rng);

inline double besq_mean(int dim, double y, double t) { return y + dim * t; }

// Probability that a dimension-0 path started at y is absorbed within t.
inline double besq0_absorption_prob(double y, double t) { return std::exp(-y / (2.0 * t)); }

enum class BesqMethod { exact, euler };

struct BesqPath {
    int dim = 2;
    std::vector<double> grid;
    std::vector<double> values;
    std::optional<std::size_t> absorbed_at; // first grid index at 0 (dim 0)
    bool underflow_flagged = false;         // dim-2 exact draw hit 0 and was redrawn
};

// Samples a path on the given strictly increasing time grid. The exact method
// chains besq_transition; the Euler method integrates the Bessel SDE on the
// square-root coordinate and squares it, reflecting dim-2 paths at a floor of
// 1e-8 and absorbing dim-0 paths at 0. euler_step = 0 picks span/1000; larger
// steps are refused.
BesqPath besq_path(int dim, double y0, std::span<const double> grid, BesqMethod method,
                   Rng& rng, double euler_step = 0.0);

} // namespace traplab
