#include "traplab/ray_knight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "traplab/besq.hpp"
#include "traplab/environment.hpp"
#include "traplab/errors.hpp"
#include "traplab/fin_diffusion.hpp"

namespace traplab {

namespace {

long bin_index(double x, double h) { return static_cast<long>(std::floor(x / h + 0.5)); }

// Dense per-bin counter over a contiguous, lazily grown index range.
struct BinAccumulator {
    long lo = 0;
    std::vector<std::uint64_t> counts;

    void add(long b, std::uint64_t c) {
        if (counts.empty()) {
            lo = b;
            counts.push_back(0);
        } else if (b < lo) {
            counts.insert(counts.begin(), static_cast<std::size_t>(lo - b), 0);
            lo = b;
        } else if (b >= lo + static_cast<long>(counts.size())) {
            counts.resize(static_cast<std::size_t>(b - lo) + 1, 0);
        }
        counts[static_cast<std::size_t>(b - lo)] += c;
    }
};

LocalTimeProfile assemble(double a, double h, double delta, const BinAccumulator& acc) {
    LocalTimeProfile prof;
    prof.a = a;
    prof.h = h;
    prof.delta = delta;
    prof.bin_lo = acc.lo;
    prof.values.resize(acc.counts.size());
    const double dt = delta * delta;
    double total = 0.0;
    for (std::size_t i = 0; i < acc.counts.size(); ++i) {
        const double occ = static_cast<double>(acc.counts[i]) * dt;
        prof.values[i] = occ / h;
        total += occ;
    }
    prof.hit_time = total;
    return prof;
}

void validate_profile_params(double a, double h, double delta) {
    if (!(a > 0.0)) throw std::invalid_argument("local time profile: a must be positive");
    if (!(delta > 0.0 && delta < h && h < a)) {
        throw std::invalid_argument("local time profile: require delta << h << a");
    }
}

LocalTimeProfile profile_stepped(double a, double h, double delta, Rng& rng,
                                 std::uint64_t step_cap) {
    const long m = std::max<long>(1, std::lround(a / delta));
    BinAccumulator acc;
    long site = 0;
    std::uint64_t steps = 0;
    while (site != -m) {
        if (steps >= step_cap) {
            throw cap_error("local time profile (stepped): step cap exhausted before first "
                            "passage; use the crossing method or a coarser delta");
        }
        ++steps;
        acc.add(bin_index(static_cast<double>(site) * delta, h), 1);
        site += rng.coin() ? 1 : -1;
    }
    return assemble(a, h, delta, acc);
}

// Walk occupation numbers generated through the edge-crossing chain. With
// W_j the number of up-crossings of the edge (j, j+1) before the walk from 0
// first reaches -m:
//   W_{-m} = 0,
//   W_j | W_{j-1} ~ NB(W_{j-1} + 1, 1/2)  for -m < j <= 0,
//   W_j | W_{j-1} ~ NB(W_{j-1},     1/2)  for j >= 1 (until extinction),
// and the number of departures from site k is W_{k-1} + W_k + 1{k <= 0}.
// This reproduces the joint law of all site occupation counts of the walk.
LocalTimeProfile profile_crossing(double a, double h, double delta, Rng& rng) {
    const long m = std::max<long>(1, std::lround(a / delta));
    BinAccumulator acc;
    std::uint64_t w_prev = 0; // W at the absorption edge
    for (long k = -m + 1;; ++k) {
        const std::uint64_t w =
            k <= 0 ? rng.neg_binomial_half(w_prev + 1) : rng.neg_binomial_half(w_prev);
        const std::uint64_t visits = w_prev + w + (k <= 0 ? 1 : 0);
        if (visits > 0) acc.add(bin_index(static_cast<double>(k) * delta, h), visits);
        w_prev = w;
        if (k >= 1 && w == 0) break;
    }
    return assemble(a, h, delta, acc);
}

} // namespace

double LocalTimeProfile::value_at(double x) const {
    const long b = bin_index(x, h);
    if (b < bin_lo || b >= bin_lo + static_cast<long>(values.size())) return 0.0;
    return values[static_cast<std::size_t>(b - bin_lo)];
}

double LocalTimeProfile::total_occupation() const {
    double total = 0.0;
    for (double v : values) total += v * h;
    return total;
}

LocalTimeProfile local_time_profile_at_hit(double a, double h, double delta, Rng& rng,
                                           ProfileMethod method, std::uint64_t step_cap) {
    validate_profile_params(a, h, delta);
    return method == ProfileMethod::stepped ? profile_stepped(a, h, delta, rng, step_cap)
                                            : profile_crossing(a, h, delta, rng);
}

std::vector<double> besq_profile_oracle_draw(double a, double h, double delta,
                                             std::span<const double> probes_sorted, Rng& rng) {
    validate_profile_params(a, h, delta);
    const long m = std::max<long>(1, std::lround(a / delta));

    double s = -static_cast<double>(m) * delta; // current spatial coordinate
    double y = 0.0;
    bool absorbed = false;

    auto advance_to = [&](double target) {
        if (target <= s) return;
        if (absorbed) {
            s = target;
            return;
        }
        // dimension 2 up to the origin, dimension 0 beyond it
        if (s < 0.0 && target > 0.0) {
            y = besq_transition(2, y, -s, rng);
            s = 0.0;
        }
        const int dim = target <= 0.0 ? 2 : 0;
        y = besq_transition(dim, y, target - s, rng);
        s = target;
        if (dim == 0 && y == 0.0) absorbed = true;
    };

    std::vector<double> out;
    out.reserve(probes_sorted.size());
    long prev_bin = std::numeric_limits<long>::min();
    for (std::size_t p = 0; p < probes_sorted.size(); ++p) {
        if (p > 0 && probes_sorted[p] < probes_sorted[p - 1]) {
            throw std::invalid_argument("besq_profile_oracle_draw: probes must be ascending");
        }
        const long b = bin_index(probes_sorted[p], h);
        if (b == prev_bin) {
            out.push_back(out.back());
            continue;
        }
        if (b < prev_bin) throw std::invalid_argument("besq_profile_oracle_draw: probe order");
        prev_bin = b;

        // site range of bin b, matching the walk's bin assignment
        long k_lo = static_cast<long>(std::ceil((static_cast<double>(b) - 0.5) * h / delta)) - 2;
        while (bin_index(static_cast<double>(k_lo) * delta, h) < b) ++k_lo;
        long k_hi = k_lo;
        while (bin_index(static_cast<double>(k_hi + 1) * delta, h) == b) ++k_hi;

        double occupied = 0.0;
        for (long k = std::max(k_lo, -m + 1); k <= k_hi; ++k) {
            advance_to(static_cast<double>(k) * delta);
            occupied += y * delta;
        }
        out.push_back(occupied / h);
    }
    return out;
}

RayKnightReport rayknight_check(double a, std::size_t n_samples, std::span<const double> probes,
                                double delta, double h, Rng& rng, ProfileMethod method) {
    validate_profile_params(a, h, delta);
    if (n_samples < 100) throw std::invalid_argument("rayknight_check: need at least 100 samples");
    std::vector<double> pts(probes.begin(), probes.end());
    std::sort(pts.begin(), pts.end());
    if (!pts.empty() && pts.front() <= -a) {
        throw std::invalid_argument("rayknight_check: probe points must lie in (-a, inf)");
    }

    const std::size_t np = pts.size();
    std::vector<std::vector<double>> prof_samples(np), oracle_samples(np);
    for (auto& v : prof_samples) v.reserve(n_samples);
    for (auto& v : oracle_samples) v.reserve(n_samples);

    for (std::size_t i = 0; i < n_samples; ++i) {
        const LocalTimeProfile prof = local_time_profile_at_hit(a, h, delta, rng, method);
        for (std::size_t p = 0; p < np; ++p) prof_samples[p].push_back(prof.value_at(pts[p]));
        const auto oracle = besq_profile_oracle_draw(a, h, delta, pts, rng);
        for (std::size_t p = 0; p < np; ++p) oracle_samples[p].push_back(oracle[p]);
    }

    RayKnightReport rep;
    rep.a = a;
    rep.h = h;
    rep.delta = delta;
    rep.n_samples = n_samples;
    for (std::size_t p = 0; p < np; ++p) {
        ProbeStat st;
        st.x = pts[p];
        st.ks = ks_two_sample(prof_samples[p], oracle_samples[p]);
        double mp = 0, mo = 0, zp = 0, zo = 0;
        for (double v : prof_samples[p]) {
            mp += v;
            zp += (v == 0.0);
        }
        for (double v : oracle_samples[p]) {
            mo += v;
            zo += (v == 0.0);
        }
        const auto nn = static_cast<double>(n_samples);
        st.mean_profile = mp / nn;
        st.mean_oracle = mo / nn;
        st.zero_frac_profile = zp / nn;
        st.zero_frac_oracle = zo / nn;
        rep.probes.push_back(st);
    }
    return rep;
}

LemmaProbeReport probe_lemma_G1(int n, double alpha, double a, std::size_t n_samples, Rng& rng,
                                double v_min_factors, double v_min_chain, double chain_window) {
    if (n < 1 || n > 8) {
        throw std::invalid_argument("probe_lemma_G1: n must lie in 1..8 (the probability decays "
                                    "exponentially in n)");
    }
    if (!(a > 0.0)) throw std::invalid_argument("probe_lemma_G1: a must be positive");
    if (n_samples == 0) throw std::invalid_argument("probe_lemma_G1: need samples");

    LemmaProbeReport rep;
    rep.n = n;
    rep.alpha = alpha;
    rep.a = a;
    rep.n_samples = n_samples;
    const double nd = n;
    rep.hit_level = std::pow(nd, 1.0 / (1.0 + alpha)) * (nd + 1.0) / nd;
    rep.deadline = (nd + 2.0) / nd;

    // LHS: annealed jump-chain estimate of the hitting probability.
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const FinHit hit = fin_annealed_hit_below(alpha, v_min_chain, chain_window,
                                                  -rep.hit_level, rep.deadline, rng);
        hits += hit.hit ? 1 : 0;
    }
    const auto ns = static_cast<double>(n_samples);
    rep.lhs = static_cast<double>(hits) / ns;
    rep.lhs_se = binomial_se(rep.lhs, ns);

    // RHS factors over independent (squared-Bessel draw, truncated cloud) pairs.
    std::uint64_t ky = 0, kx = 0;
    constexpr int max_chunks = 4096;
    for (std::size_t i = 0; i < n_samples; ++i) {
        // dim-2 factor on (0,1]
        {
            const AtomicMeasure cloud = sample_atoms(alpha, 0.0, 1.0, v_min_factors, rng);
            double y = a, s = 0.0, integral = 0.0;
            for (const auto& atom : cloud.atoms) {
                y = besq_transition(2, y, atom.x - s, rng);
                s = atom.x;
                integral += atom.v * y;
                if (integral > 1.0) break;
            }
            if (integral <= 1.0) {
                if (s < 1.0) y = besq_transition(2, y, 1.0 - s, rng);
                if (y <= a) ++ky;
            }
        }
        // dim-0 factor on (0,inf): extend the cloud until absorption decides it
        {
            double y = a, s = 0.0, integral = 0.0;
            bool failed = false, decided = false;
            for (int chunk = 0; chunk < max_chunks && !decided; ++chunk) {
                const AtomicMeasure cloud =
                    sample_atoms(alpha, chunk, chunk + 1.0, v_min_factors, rng);
                for (const auto& atom : cloud.atoms) {
                    y = besq_transition(0, y, atom.x - s, rng);
                    s = atom.x;
                    integral += atom.v * y;
                    if (integral > 1.0) {
                        failed = true;
                        decided = true;
                        break;
                    }
                    if (y == 0.0) {
                        decided = true;
                        break;
                    }
                }
                if (!decided && y == 0.0) decided = true;
            }
            if (!decided) ++rep.undecided_x; // counted as success; reported
            if (!failed) ++kx;
        }
    }
    rep.factor_y = static_cast<double>(ky) / ns;
    rep.factor_y_se = binomial_se(rep.factor_y, ns);
    rep.factor_x = static_cast<double>(kx) / ns;
    rep.factor_x_se = binomial_se(rep.factor_x, ns);

    const double fy_pow = std::pow(rep.factor_y, nd + 1.0);
    rep.rhs = rep.factor_x * fy_pow;
    // delta method on the product of independent estimates
    const double d_fx = fy_pow;
    const double d_fy = rep.factor_x * (nd + 1.0) *
                        (rep.factor_y > 0.0 ? fy_pow / rep.factor_y : 0.0);
    rep.rhs_se = std::sqrt(d_fx * d_fx * rep.factor_x_se * rep.factor_x_se +
                           d_fy * d_fy * rep.factor_y_se * rep.factor_y_se);
    rep.inconclusive = (rep.rhs == 0.0) || ((kx == 0 || ky == 0) && n_samples < 1000);
    return rep;
}

} // namespace traplab
