#include "traplab/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace traplab {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("tail index alpha must lie in (0,1)");
    }
}

} // namespace

double pareto_depth(double alpha, double u01) {
    require_alpha(alpha);
    if (!(u01 > 0.0 && u01 < 1.0)) throw std::invalid_argument("pareto_depth: u must be in (0,1)");
    return std::pow(u01, -1.0 / alpha);
}

double site_depth(std::uint64_t site_seed, double alpha, long z) {
    Rng rng = Rng::stream(site_seed, 0x7d2a11ce5eedull, static_cast<std::uint64_t>(z));
    double u;
    do {
        u = rng.uniform();
    } while (u == 0.0);
    return std::pow(u, -1.0 / alpha);
}

double TrapEnvironment::depth(long z) const {
    if (!in_window(z)) throw std::out_of_range("TrapEnvironment::depth: site outside window");
    return depths[static_cast<std::size_t>(z - z_lo)];
}

double TrapEnvironment::depth_anywhere(long z) const {
    if (in_window(z)) return depths[static_cast<std::size_t>(z - z_lo)];
    return site_depth(site_seed, alpha, z);
}

TrapEnvironment sample_trap_depths(double alpha, long z_lo, long z_hi, Rng& rng) {
    require_alpha(alpha);
    if (z_hi < z_lo) throw std::invalid_argument("sample_trap_depths: empty window");
    TrapEnvironment env;
    env.alpha = alpha;
    env.z_lo = z_lo;
    env.z_hi = z_hi;
    env.site_seed = rng.next_u64();
    env.depths.resize(static_cast<std::size_t>(env.width()));
    for (long z = z_lo; z <= z_hi; ++z) {
        env.depths[static_cast<std::size_t>(z - z_lo)] = site_depth(env.site_seed, alpha, z);
    }
    return env;
}

double standard_positive_stable(double alpha, Rng& rng) {
    require_alpha(alpha);
    double u;
    do {
        u = rng.uniform();
    } while (u == 0.0);
    const double phi = std::numbers::pi * u;
    const double w = rng.exponential(1.0);
    // Kanter: S = (A(phi)/W)^{(1-alpha)/alpha} with the Zolotarev function A.
    const double log_a = (alpha / (1.0 - alpha)) * std::log(std::sin(alpha * phi)) +
                         std::log(std::sin((1.0 - alpha) * phi)) -
                         (1.0 / (1.0 - alpha)) * std::log(std::sin(phi));
    return std::exp(((1.0 - alpha) / alpha) * (log_a - std::log(w)));
}

double stable_increment(double length, double alpha, Rng& rng) {
    require_alpha(alpha);
    if (length < 0.0) throw std::invalid_argument("stable_increment: negative interval length");
    if (length == 0.0) return 0.0;
    const double scale = std::pow(length * std::tgamma(1.0 - alpha), 1.0 / alpha);
    return scale * standard_positive_stable(alpha, rng);
}

double AtomicMeasure::mass(double a, double b) const {
    if (a > b) throw std::invalid_argument("AtomicMeasure::mass: interval endpoints out of order");
    if (a < lo || b > hi) throw std::out_of_range("AtomicMeasure::mass: interval outside window");
    auto cmp = [](const Atom& atom, double x) { return atom.x <= x; };
    auto first = std::lower_bound(atoms.begin(), atoms.end(), a, cmp); // first x > a
    double total = 0.0;
    for (auto it = first; it != atoms.end() && it->x <= b; ++it) total += it->v;
    return total;
}

AtomicMeasure sample_atoms(double alpha, double lo, double hi, double v_min, Rng& rng) {
    require_alpha(alpha);
    if (v_min <= 0.0) {
        throw std::invalid_argument("sample_atoms: v_min must be positive (the full measure has "
                                    "infinitely many atoms)");
    }
    if (hi < lo) throw std::invalid_argument("sample_atoms: window endpoints out of order");

    AtomicMeasure m;
    m.alpha = alpha;
    m.lo = lo;
    m.hi = hi;
    m.v_min = v_min;

    const double len = hi - lo;
    if (len == 0.0) return m;
    const double intensity = std::pow(v_min, -alpha);
    for (;;) {
        const auto count = rng.poisson(len * intensity);
        m.atoms.clear();
        m.atoms.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            const double x = rng.uniform(lo, hi);
            const double v = v_min * std::pow(rng.uniform_pos(), -1.0 / alpha);
            m.atoms.push_back({x, v});
        }
        std::sort(m.atoms.begin(), m.atoms.end(),
                  [](const Atom& a, const Atom& b) { return a.x < b.x; });
        const bool tied = std::adjacent_find(m.atoms.begin(), m.atoms.end(),
                                             [](const Atom& a, const Atom& b) {
                                                 return a.x == b.x;
                                             }) != m.atoms.end();
        if (!tied) break; // ties have probability zero; redraw if precision produced one
    }
    return m;
}

double truncation_deficit(double alpha, double v_min) {
    require_alpha(alpha);
    if (v_min <= 0.0) throw std::invalid_argument("truncation_deficit: v_min must be positive");
    return alpha * std::pow(v_min, 1.0 - alpha) / (1.0 - alpha);
}

} // namespace traplab
