#include "traplab/tails.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "traplab/parallel.hpp"

namespace traplab {

namespace {

constexpr std::uint64_t tag_btm_tail = 0xb1a5;
constexpr std::uint64_t tag_fin_tail = 0xf1a5;
constexpr std::uint64_t tag_scaling = 0x5ca1;

std::vector<TailRow> rows_from_maxima(std::span<const double> maxima,
                                      std::span<const double> x_grid, double t, double y_scale,
                                      double y_power) {
    std::vector<double> xs(x_grid.begin(), x_grid.end());
    std::sort(xs.begin(), xs.end());
    std::vector<TailRow> rows;
    rows.reserve(xs.size());
    const auto n = static_cast<std::uint64_t>(maxima.size());
    for (double x : xs) {
        TailRow row;
        row.t = t;
        row.x = x;
        row.y = std::pow(x / y_scale, y_power);
        for (double m : maxima) row.k += (m >= x) ? 1 : 0;
        row.n = n;
        row.p_hat = static_cast<double>(row.k) / static_cast<double>(n);
        const Interval ci = binomial_ci(row.k, n);
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
        row.resolved = row.k > 0;
        rows.push_back(row);
    }
    return rows;
}

} // namespace

std::vector<FitPoint> TailCurve::fit_points() const {
    std::vector<FitPoint> pts;
    pts.reserve(rows.size());
    for (const auto& row : rows) pts.push_back({row.y, row.k, row.n});
    return pts;
}

TailCurve estimate_tail_btm(double alpha, double t, std::span<const double> x_grid,
                            std::uint64_t n_rep, std::uint64_t master_seed, unsigned workers,
                            double regime_bound, std::uint64_t event_cap) {
    if (x_grid.empty()) throw std::invalid_argument("estimate_tail_btm: empty x grid");
    if (!(t > 0.0)) throw std::invalid_argument("estimate_tail_btm: t must be positive");
    if (n_rep < 100) throw std::invalid_argument("estimate_tail_btm: need at least 100 replicas");
    const double max_x = *std::max_element(x_grid.begin(), x_grid.end());
    if (max_x / t > regime_bound * (1.0 + 1e-12)) {
        throw std::invalid_argument("estimate_tail_btm: grid leaves the x/t regime bound");
    }

    std::vector<double> maxima(n_rep);
    for_each_replica(n_rep, workers, [&](std::uint64_t r) {
        Rng rng = Rng::stream(master_seed, tag_btm_tail, r);
        TrapEnvironment env = sample_trap_depths(alpha, -8, 8, rng);
        const WalkEndpoint end = btm_endpoint_at(env, t, rng, event_cap);
        maxima[r] = static_cast<double>(end.abs_max);
    });

    TailCurve curve;
    curve.alpha = alpha;
    curve.process = "btm";
    curve.method = "event_walk";
    curve.t = t;
    curve.regime_max_ratio = max_x / t;
    curve.n_rep = n_rep;
    curve.master_seed = master_seed;
    curve.rows = rows_from_maxima(maxima, x_grid, t,
                                  std::pow(t, alpha / (1.0 + alpha)), 1.0 + alpha);
    return curve;
}

TailCurve estimate_tail_fin(double alpha, std::span<const double> x_grid, std::uint64_t n_rep,
                            FinTailMethod method, std::uint64_t master_seed, unsigned workers,
                            double epsilon, double v_min, double window,
                            std::uint64_t event_cap) {
    if (x_grid.empty()) throw std::invalid_argument("estimate_tail_fin: empty x grid");
    if (n_rep < 100) throw std::invalid_argument("estimate_tail_fin: need at least 100 replicas");

    std::vector<double> maxima(n_rep);
    std::atomic<std::uint64_t> edge_exits{0};
    for_each_replica(n_rep, workers, [&](std::uint64_t r) {
        Rng rng = Rng::stream(master_seed, tag_fin_tail, r);
        if (method == FinTailMethod::jump_chain) {
            const FinEndpoint end =
                fin_annealed_endpoint(alpha, v_min, window, 1.0, rng, event_cap);
            maxima[r] = end.abs_max;
            if (end.touched_edge) edge_exits.fetch_add(1, std::memory_order_relaxed);
        } else {
            const FinEndpoint end = fin_rescaled_btm_endpoint(alpha, epsilon, 1.0, rng, event_cap);
            maxima[r] = end.abs_max;
        }
    });

    TailCurve curve;
    curve.alpha = alpha;
    curve.process = "fin";
    curve.method = method == FinTailMethod::jump_chain ? "jump_chain" : "rescaled_btm";
    curve.t = 1.0;
    curve.epsilon = method == FinTailMethod::rescaled_btm ? epsilon : 0.0;
    curve.v_min = method == FinTailMethod::jump_chain ? v_min : 0.0;
    curve.window = method == FinTailMethod::jump_chain ? window : 0.0;
    curve.n_rep = n_rep;
    curve.master_seed = master_seed;
    curve.n_edge_exits = edge_exits.load();
    curve.rows = rows_from_maxima(maxima, x_grid, 1.0, 1.0, 1.0 + alpha);
    return curve;
}

ScalingCheckReport scaling_invariance_check(double alpha, double lambda, std::size_t n,
                                            ScalingExponent mode, std::uint64_t master_seed,
                                            unsigned workers, double v_min, double window) {
    if (!(lambda >= 1.0)) throw std::invalid_argument("scaling check: lambda must be >= 1");
    if (n < 100) throw std::invalid_argument("scaling check: need at least 100 samples");

    ScalingCheckReport rep;
    rep.alpha = alpha;
    rep.lambda = lambda;
    rep.n = n;
    rep.mode = mode;
    const double exponent =
        mode == ScalingExponent::self_similar ? alpha / (1.0 + alpha) : (1.0 + alpha) / alpha;
    rep.scale_factor = std::pow(lambda, -exponent);

    std::vector<double> scaled(n), base(n);
    for_each_replica(n, workers, [&](std::uint64_t r) {
        Rng rng = Rng::stream(master_seed, tag_scaling, 2 * r);
        scaled[r] = rep.scale_factor *
                    fin_annealed_endpoint(alpha, v_min, window, lambda, rng).position;
        Rng rng2 = Rng::stream(master_seed, tag_scaling, 2 * r + 1);
        base[r] = fin_annealed_endpoint(alpha, v_min, window, 1.0, rng2).position;
    });

    rep.ks = ks_two_sample(scaled, base);
    rep.critical = rep.ks.critical(0.05);
    rep.pass = rep.ks.d < rep.critical;
    return rep;
}

} // namespace traplab
