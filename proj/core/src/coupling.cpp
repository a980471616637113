#include "traplab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace traplab {

namespace {

// log of the Zolotarev function A(phi) on (0, pi).
double log_zolotarev_a(double alpha, double phi) {
    return (alpha / (1.0 - alpha)) * std::log(std::sin(alpha * phi)) +
           std::log(std::sin((1.0 - alpha) * phi)) -
           (1.0 / (1.0 - alpha)) * std::log(std::sin(phi));
}

struct StableIntegrand {
    double alpha;
    double pow_term; // s^{-alpha/(1-alpha)} for the evaluation point s

    double operator()(double phi) const {
        if (phi <= 0.0) {
            // A(0+) = alpha^{alpha/(1-alpha)} (1-alpha)
            const double a0 = std::pow(alpha, alpha / (1.0 - alpha)) * (1.0 - alpha);
            return std::exp(-a0 * pow_term);
        }
        if (phi >= std::numbers::pi) return 0.0;
        const double log_a = log_zolotarev_a(alpha, phi);
        const double expo = std::exp(log_a) * pow_term;
        return expo > 700.0 ? 0.0 : std::exp(-expo);
    }
};

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    if (depth > 40) {
        std::ostringstream msg;
        msg << "stable_cdf_v1: quadrature failed to converge on [" << a << ", " << b
            << "] at tolerance " << tol;
        throw std::runtime_error(msg.str());
    }
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

} // namespace

double stable_cdf_v1(double x, double alpha, double abs_tol) {
    require_alpha(alpha);
    if (x <= 0.0) return 0.0;
    const double scale = std::pow(std::tgamma(1.0 - alpha), 1.0 / alpha);
    const double s = x / scale;
    StableIntegrand f{alpha, std::pow(s, -alpha / (1.0 - alpha))};
    const double a = 0.0, b = std::numbers::pi;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double integral =
        adaptive_simpson(f, a, b, fa, fm, fb, whole, abs_tol * std::numbers::pi, 0);
    return std::clamp(integral / std::numbers::pi, 0.0, 1.0);
}

CouplingMap build_coupling_map(double alpha, double u_max, std::size_t table_size,
                               double cdf_tol) {
    require_alpha(alpha);
    if (!(u_max > 1.0) || table_size < 8) {
        throw std::invalid_argument("build_coupling_map: need u_max > 1 and a real table");
    }
    CouplingMap map;
    map.alpha = alpha;
    map.u.resize(table_size);
    map.g.resize(table_size);
    const double log_umax = std::log(u_max);
    map.u[0] = 1.0;
    map.g[0] = 0.0; // P(tau > 1) = 1 forces G(1) = 0

    double prev = 0.0;
    for (std::size_t i = 1; i < table_size; ++i) {
        map.u[i] = std::exp(log_umax * static_cast<double>(i) /
                            static_cast<double>(table_size - 1));
        const double level = 1.0 - std::pow(map.u[i], -alpha);
        // bisection bracket warm-started at the previous quantile
        double lo = prev;
        double hi = std::max({prev * 1.3, prev + 1e-8, 1e-8});
        int guard = 0;
        while (stable_cdf_v1(hi, alpha, cdf_tol) < level) {
            lo = hi;
            hi *= 1.6;
            if (++guard > 200) {
                throw std::runtime_error("build_coupling_map: bisection bracket failure");
            }
        }
        while ((hi - lo) > 1e-10 * hi) {
            const double mid = 0.5 * (lo + hi);
            (stable_cdf_v1(mid, alpha, cdf_tol) < level ? lo : hi) = mid;
        }
        map.g[i] = 0.5 * (lo + hi);
        prev = map.g[i];
    }
    return map;
}

double CouplingMap::g_of(double uu) const {
    if (uu <= 1.0) return 0.0;
    const std::size_t n = u.size();
    if (uu >= u.back()) {
        const double slope = std::log(g[n - 1] / g[n - 2]) / std::log(u[n - 1] / u[n - 2]);
        return g.back() * std::pow(uu / u.back(), slope);
    }
    const auto it = std::upper_bound(u.begin(), u.end(), uu);
    const std::size_t i = static_cast<std::size_t>(it - u.begin()) - 1;
    if (i == 0) {
        return g[1] * (uu - 1.0) / (u[1] - 1.0);
    }
    const double t = (std::log(uu) - std::log(u[i])) / (std::log(u[i + 1]) - std::log(u[i]));
    return std::exp(std::log(g[i]) + t * (std::log(g[i + 1]) - std::log(g[i])));
}

double CouplingMap::g_inv(double s) const {
    if (s <= 0.0) return 0.0;
    const std::size_t n = u.size();
    if (s >= g.back()) {
        const double slope = std::log(g[n - 1] / g[n - 2]) / std::log(u[n - 1] / u[n - 2]);
        return u.back() * std::pow(s / g.back(), 1.0 / slope);
    }
    if (s <= g[1]) {
        return 1.0 + (s / g[1]) * (u[1] - 1.0);
    }
    const auto it = std::lower_bound(g.begin(), g.end(), s); // first g >= s
    const std::size_t j = static_cast<std::size_t>(it - g.begin());
    const std::size_t i = j - 1;
    if (g[j] == g[i]) return u[i];
    const double t = (std::log(s) - std::log(g[i])) / (std::log(g[j]) - std::log(g[i]));
    return std::exp(std::log(u[i]) + t * (std::log(u[j]) - std::log(u[i])));
}

TrapEnvironment sample_coupled_traps(double epsilon, long z_lo, long z_hi,
                                     std::span<const double> increments,
                                     const CouplingMap& map) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("sample_coupled_traps: epsilon > 0");
    if (z_hi < z_lo) throw std::invalid_argument("sample_coupled_traps: empty window");
    const auto width = static_cast<std::size_t>(z_hi - z_lo + 1);
    if (increments.size() != width) {
        throw std::invalid_argument("sample_coupled_traps: one increment per lattice cell "
                                    "required");
    }
    TrapEnvironment env;
    env.alpha = map.alpha;
    env.z_lo = z_lo;
    env.z_hi = z_hi;
    env.site_seed = 0;
    env.depths.resize(width);
    const double scale = std::pow(epsilon, -1.0 / map.alpha);
    for (std::size_t i = 0; i < width; ++i) {
        env.depths[i] = map.g_inv(scale * increments[i]);
    }
    return env;
}

double triangle_bump(double x) { return std::max(0.0, 1.0 - std::fabs(x)); }

double raised_cosine_bump(double x) {
    if (std::fabs(x) >= 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * x));
}

VagueConvergenceReport vague_convergence_check(double alpha,
                                               const std::function<double(double)>& f,
                                               const CouplingMap& map, Rng& rng, int k_min,
                                               int k_max, int k_ref) {
    require_alpha(alpha);
    if (!(0 <= k_min && k_min <= k_max && k_max < k_ref && k_ref <= 20)) {
        throw std::invalid_argument("vague_convergence_check: need 0 <= k_min <= k_max < k_ref");
    }

    VagueConvergenceReport rep;
    rep.alpha = alpha;
    rep.k_min = k_min;
    rep.k_max = k_max;
    rep.k_ref = k_ref;

    // One realization: exact increments on the dyadic refinement of [-2, 2].
    const double half_window = 2.0;
    const double w = std::ldexp(1.0, -k_ref);
    const std::size_t n_ref = static_cast<std::size_t>(std::llround(2.0 * half_window / w));
    std::vector<double> inc(n_ref);
    for (auto& v : inc) v = stable_increment(w, alpha, rng);

    double reference = 0.0;
    for (std::size_t j = 0; j < n_ref; ++j) {
        const double mid = -half_window + (static_cast<double>(j) + 0.5) * w;
        reference += f(mid) * inc[j];
    }
    rep.reference = reference;

    for (int k = k_min; k <= k_max; ++k) {
        const double eps = std::ldexp(1.0, -k);
        const std::size_t r = static_cast<std::size_t>(1) << (k_ref - k);
        const std::size_t n_cells = n_ref / r;
        const double eps_scale = std::pow(eps, -1.0 / alpha);
        const double atom_scale = std::pow(eps, 1.0 / alpha);
        double integral = 0.0;
        for (std::size_t c = 0; c < n_cells; ++c) {
            const double x = -half_window + static_cast<double>(c) * eps;
            const double fx = f(x);
            if (fx == 0.0) continue;
            double cell = 0.0;
            for (std::size_t j = c * r; j < (c + 1) * r; ++j) cell += inc[j];
            integral += atom_scale * map.g_inv(eps_scale * cell) * fx;
        }
        rep.diffs.push_back(std::fabs(integral - reference));
    }

    // OLS slope of the differences against k
    const auto nk = static_cast<double>(rep.diffs.size());
    double sk = 0, sd = 0, skk = 0, skd = 0;
    for (std::size_t i = 0; i < rep.diffs.size(); ++i) {
        const double k = static_cast<double>(k_min) + static_cast<double>(i);
        sk += k;
        sd += rep.diffs[i];
        skk += k * k;
        skd += k * rep.diffs[i];
    }
    rep.trend_slope = (nk * skd - sk * sd) / (nk * skk - sk * sk);
    rep.final_relative_diff =
        rep.reference != 0.0 ? rep.diffs.back() / std::fabs(rep.reference) : 0.0;
    return rep;
}

} // namespace traplab
