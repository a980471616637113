#include "traplab/besq.hpp"

#include <cmath>
#include <stdexcept>

namespace traplab {

namespace {

void require_dim(int dim) {
    if (dim != 0 && dim != 2) {
        throw std::invalid_argument("besq: only dimensions 0 and 2 are supported");
    }
}

} // namespace

double besq_transition(int dim, double y, double dt, Rng& rng) {
    require_dim(dim);
    if (y < 0.0) throw std::invalid_argument("besq_transition: negative state");
    if (!(dt > 0.0)) throw std::invalid_argument("besq_transition: dt must be positive");

    const std::uint64_t n = rng.poisson(y / (2.0 * dt));
    if (dim == 0) {
        if (n == 0) return 0.0; // absorbed
        return 2.0 * dt * rng.gamma(static_cast<double>(n));
    }
    return 2.0 * dt * rng.gamma(static_cast<double>(n) + 1.0);
}

BesqPath besq_path(int dim, double y0, std::span<const double> grid, BesqMethod method,
                   Rng& rng, double euler_step) {
    require_dim(dim);
    if (y0 < 0.0) throw std::invalid_argument("besq_path: negative start");
    if (grid.empty()) throw std::invalid_argument("besq_path: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("besq_path: grid not increasing");
    }

    BesqPath path;
    path.dim = dim;
    path.grid.assign(grid.begin(), grid.end());
    path.values.resize(grid.size());

    if (method == BesqMethod::exact) {
        double y = y0;
        double t_prev = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double dt = grid[i] - t_prev;
            if (dt > 0.0) {
                double next = besq_transition(dim, y, dt, rng);
                if (dim == 2 && next == 0.0) {
                    // probability-zero draw; flag the float underflow and redraw
                    path.underflow_flagged = true;
                    do {
                        next = besq_transition(dim, y, dt, rng);
                    } while (next == 0.0);
                }
                y = next;
            }
            path.values[i] = y;
            if (dim == 0 && y == 0.0 && !path.absorbed_at) path.absorbed_at = i;
            t_prev = grid[i];
        }
        return path;
    }

    const double span = grid.back();
    const double max_step = 1e-3 * span;
    double step = (euler_step == 0.0) ? max_step : euler_step;
    if (step > max_step * (1.0 + 1e-12)) {
        throw std::invalid_argument("besq_path: euler step too coarse; require step <= 1e-3 * span");
    }
    if (dim == 2 && y0 == 0.0) {
        throw std::invalid_argument("besq_path: the euler scheme is singular at a zero start for "
                                    "dimension 2; use the exact method there");
    }
    // Stability bound: explicit Euler on the square-root coordinate needs the
    // state to stay above the noise scale sqrt(dt), or the 1/(2r) drift
    // overshoots; the reflection level is therefore max(1e-8, sqrt(dt)/2).
    const double floor = std::max(1e-8, 0.5 * std::sqrt(step));

    // Euler on the Bessel (square-root) coordinate.
    double r = std::sqrt(y0);
    bool absorbed = (dim == 0 && y0 == 0.0);
    double t = 0.0;
    std::size_t gi = 0;
    while (gi < grid.size()) {
        if (grid[gi] <= t + 1e-15 * span) {
            const double val = absorbed ? 0.0 : r * r;
            path.values[gi] = val;
            if (dim == 0 && val == 0.0 && !path.absorbed_at) path.absorbed_at = gi;
            ++gi;
            continue;
        }
        const double dt = std::min(step, grid[gi] - t);
        if (!absorbed) {
            const double drift = (dim == 2 ? 0.5 : -0.5) / r;
            r += drift * dt + std::sqrt(dt) * rng.normal();
            if (dim == 2) {
                r = std::max(std::fabs(r), floor); // reflect, floored away from the singularity
            } else if (r <= 0.0) {
                absorbed = true;
                r = 0.0;
            }
        }
        t += dt;
    }
    return path;
}

} // namespace traplab
