#include "traplab/fin_diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "traplab/errors.hpp"

namespace traplab {

namespace {

// Fixed atom list indexed by vector position.
struct FixedAtoms {
    const AtomicMeasure* m;

    bool ensure(long gi) const { return gi >= 0 && gi < static_cast<long>(m->atoms.size()); }
    double x(long gi) const { return m->atoms[static_cast<std::size_t>(gi)].x; }
    double v(long gi) const { return m->atoms[static_cast<std::size_t>(gi)].v; }

    long first_nonnegative() const {
        auto it = std::lower_bound(m->atoms.begin(), m->atoms.end(), 0.0,
                                   [](const Atom& a, double t) { return a.x < t; });
        return static_cast<long>(it - m->atoms.begin());
    }
};

// Atom cloud grown lazily chunk by chunk inside [-window, window]; chunk k
// covers [k, k+1) clipped to the window and owns a substream keyed by k, so
// the cloud is independent of the order the path explores it.
class LazyAtoms {
  public:
    LazyAtoms(double alpha, double v_min, double window, std::uint64_t cloud_seed)
        : alpha_(alpha), v_min_(v_min), window_(window), seed_(cloud_seed),
          intensity_(std::pow(v_min, -alpha)) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("fin: alpha in (0,1)");
        if (!(v_min > 0.0)) throw std::invalid_argument("fin: v_min must be positive");
        if (!(window >= 1.0)) throw std::invalid_argument("fin: window must be at least 1");
    }

    // gi >= 0 indexes atoms with x >= 0 in ascending order; gi < 0 indexes
    // atoms with x < 0 in descending order (gi = -1 is the closest).
    bool ensure(long gi) {
        if (gi >= 0) {
            while (static_cast<long>(right_.size()) <= gi) {
                if (!grow(next_right_++)) return false;
            }
            return true;
        }
        const long need = -1 - gi;
        while (static_cast<long>(left_.size()) <= need) {
            if (!grow(next_left_--)) return false;
        }
        return true;
    }

    double x(long gi) const {
        return gi >= 0 ? right_[static_cast<std::size_t>(gi)].x
                       : left_[static_cast<std::size_t>(-1 - gi)].x;
    }
    double v(long gi) const {
        return gi >= 0 ? right_[static_cast<std::size_t>(gi)].v
                       : left_[static_cast<std::size_t>(-1 - gi)].v;
    }

  private:
    bool grow(long k) {
        const double lo = std::max(static_cast<double>(k), -window_);
        const double hi = std::min(static_cast<double>(k) + 1.0, window_);
        if (hi <= lo) return false; // window exhausted on this side
        Rng rng = Rng::stream(seed_, 0xc10dull, static_cast<std::uint64_t>(k));
        for (;;) {
            buf_.clear();
            const auto count = rng.poisson((hi - lo) * intensity_);
            buf_.reserve(count);
            for (std::uint64_t i = 0; i < count; ++i) {
                const double x = rng.uniform(lo, hi);
                const double v = v_min_ * std::pow(rng.uniform_pos(), -1.0 / alpha_);
                buf_.push_back({x, v});
            }
            std::sort(buf_.begin(), buf_.end(),
                      [](const Atom& a, const Atom& b) { return a.x < b.x; });
            if (std::adjacent_find(buf_.begin(), buf_.end(), [](const Atom& a, const Atom& b) {
                    return a.x == b.x;
                }) == buf_.end()) {
                break;
            }
        }
        if (k >= 0) {
            right_.insert(right_.end(), buf_.begin(), buf_.end());
        } else {
            left_.insert(left_.end(), buf_.rbegin(), buf_.rend());
        }
        return true;
    }

    double alpha_, v_min_, window_;
    std::uint64_t seed_;
    double intensity_;
    long next_right_ = 0;
    long next_left_ = -1;
    std::vector<Atom> right_; // x >= 0, ascending
    std::vector<Atom> left_;  // x < 0, descending
    std::vector<Atom> buf_;
};

// Starting atom: the two atoms straddling 0, picked with the probabilities a
// Brownian path from 0 hits them (proportional to the opposite distance).
template <class Atoms>
long straddle_start(Atoms& atoms, long right_gi, Rng& rng) {
    const double xr = atoms.x(right_gi);
    if (xr == 0.0) return right_gi;
    const double xl = atoms.x(right_gi - 1);
    return (rng.uniform() * (xr - xl) < xr) ? right_gi - 1 : right_gi;
}

template <class Atoms, class OnArrive>
FinEndpoint run_jumpchain(Atoms& atoms, long start_gi, double t_max, Rng& rng,
                          std::uint64_t event_cap, OnArrive&& on_arrive) {
    FinEndpoint end;
    long gi = start_gi;
    end.abs_max = std::fabs(atoms.x(gi));
    double t = 0.0;
    bool stopped = !on_arrive(0.0, atoms.x(gi));
    while (!stopped) {
        const double x = atoms.x(gi);
        const double v = atoms.v(gi);
        const bool has_l = atoms.ensure(gi - 1);
        const bool has_r = atoms.ensure(gi + 1);
        if (!has_l || !has_r) end.touched_edge = true;
        const double rate_l = has_l ? 0.5 / (v * (x - atoms.x(gi - 1))) : 0.0;
        const double rate_r = has_r ? 0.5 / (v * (atoms.x(gi + 1) - x)) : 0.0;
        const double total = rate_l + rate_r;
        if (!(total > 0.0)) throw std::runtime_error("fin: isolated atom in window");
        t += rng.exponential(1.0 / total);
        if (t > t_max) break;
        if (end.n_events >= event_cap) {
            throw cap_error("fin jump chain: event cap exhausted before t_max");
        }
        ++end.n_events;
        gi += (rng.uniform() * total < rate_l) ? -1 : 1;
        end.abs_max = std::max(end.abs_max, std::fabs(atoms.x(gi)));
        stopped = !on_arrive(t, atoms.x(gi));
    }
    end.position = atoms.x(gi);
    return end;
}

FixedAtoms checked_fixed(const AtomicMeasure& m) {
    if (m.atoms.size() < 3) {
        throw std::invalid_argument("fin jump chain: need at least 3 atoms");
    }
    if (!(m.atoms.front().x < 0.0) || !(m.atoms.back().x > 0.0)) {
        throw std::invalid_argument("fin jump chain: atoms must straddle 0");
    }
    return FixedAtoms{&m};
}

long lazy_start(LazyAtoms& atoms, Rng& rng) {
    if (!atoms.ensure(0) || !atoms.ensure(-1)) {
        throw std::runtime_error("fin: no atoms straddling 0 inside the window");
    }
    return straddle_start(atoms, 0, rng);
}

} // namespace

FinEndpoint fin_jumpchain_endpoint(const AtomicMeasure& m, double t_max, Rng& rng,
                                   std::uint64_t event_cap) {
    if (!(t_max > 0.0)) throw std::invalid_argument("fin: t_max must be positive");
    FixedAtoms atoms = checked_fixed(m);
    const long start = straddle_start(atoms, atoms.first_nonnegative(), rng);
    return run_jumpchain(atoms, start, t_max, rng, event_cap, [](double, double) { return true; });
}

Trajectory simulate_fin_jumpchain(const AtomicMeasure& m, double t_max, Rng& rng,
                                  std::uint64_t event_cap) {
    if (!(t_max > 0.0)) throw std::invalid_argument("fin: t_max must be positive");
    FixedAtoms atoms = checked_fixed(m);
    const long start = straddle_start(atoms, atoms.first_nonnegative(), rng);
    Trajectory traj;
    traj.start = atoms.x(start);
    const auto end =
        run_jumpchain(atoms, start, t_max, rng, event_cap, [&](double t, double x) {
            if (t > 0.0) traj.events.emplace_back(t, x);
            return true;
        });
    traj.t_end = t_max;
    traj.truncated = end.touched_edge;
    return traj;
}

FinHit fin_jumpchain_hit_below(const AtomicMeasure& m, double level, double deadline, Rng& rng,
                               std::uint64_t event_cap) {
    if (!(level < 0.0)) throw std::invalid_argument("fin hit probe: level must be negative");
    FixedAtoms atoms = checked_fixed(m);
    const long start = straddle_start(atoms, atoms.first_nonnegative(), rng);
    FinHit hit;
    const auto end = run_jumpchain(atoms, start, deadline, rng, event_cap,
                                   [&](double t, double x) {
                                       if (x <= level) {
                                           hit.hit = true;
                                           hit.time = t;
                                           return false;
                                       }
                                       return true;
                                   });
    hit.touched_edge = end.touched_edge;
    return hit;
}

FinEndpoint fin_annealed_endpoint(double alpha, double v_min, double window, double t_max,
                                  Rng& rng, std::uint64_t event_cap) {
    if (!(t_max > 0.0)) throw std::invalid_argument("fin: t_max must be positive");
    LazyAtoms atoms(alpha, v_min, window, rng.next_u64());
    const long start = lazy_start(atoms, rng);
    return run_jumpchain(atoms, start, t_max, rng, event_cap, [](double, double) { return true; });
}

FinHit fin_annealed_hit_below(double alpha, double v_min, double window, double level,
                              double deadline, Rng& rng, std::uint64_t event_cap) {
    if (!(level < 0.0)) throw std::invalid_argument("fin hit probe: level must be negative");
    if (-level >= window) throw std::invalid_argument("fin hit probe: level outside window");
    LazyAtoms atoms(alpha, v_min, window, rng.next_u64());
    const long start = lazy_start(atoms, rng);
    FinHit hit;
    const auto end = run_jumpchain(atoms, start, deadline, rng, event_cap,
                                   [&](double t, double x) {
                                       if (x <= level) {
                                           hit.hit = true;
                                           hit.time = t;
                                           return false;
                                       }
                                       return true;
                                   });
    hit.touched_edge = end.touched_edge;
    return hit;
}

FinEndpoint fin_rescaled_btm_endpoint(double alpha, double epsilon, double t, Rng& rng,
                                      std::uint64_t event_cap) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("fin rescaled walk: epsilon must lie in (0,1]");
    }
    if (!(t > 0.0)) throw std::invalid_argument("fin rescaled walk: t must be positive");
    const double horizon = t * std::pow(epsilon, -(1.0 + alpha) / alpha);
    TrapEnvironment env = sample_trap_depths(alpha, -8, 8, rng);
    const WalkEndpoint w = btm_endpoint_at(env, horizon, rng, event_cap);
    if (w.truncated) {
        throw cap_error("fin rescaled walk: horizon t*eps^{-(1+alpha)/alpha} exhausted the event "
                        "cap; increase epsilon");
    }
    FinEndpoint end;
    end.position = epsilon * static_cast<double>(w.position);
    end.abs_max = epsilon * static_cast<double>(w.abs_max);
    end.n_events = w.n_events;
    return end;
}

PathOracleResult fin_pathdiscrete(const AtomicMeasure& m, double t, double h, double delta,
                                  Rng& rng, std::uint64_t step_cap, bool record_occupation) {
    if (!(t > 0.0)) throw std::invalid_argument("fin path oracle: t must be positive");
    if (!(h > 0.0) || !(delta > 0.0) || !(delta < h)) {
        throw std::invalid_argument("fin path oracle: need 0 < delta < h");
    }
    if (m.atoms.empty()) throw std::invalid_argument("fin path oracle: empty measure");

    const auto bin_of = [h](double x) { return static_cast<long>(std::floor(x / h + 0.5)); };
    const long bmin = bin_of(m.atoms.front().x);
    const long bmax = bin_of(m.atoms.back().x);
    // clock gained per step spent in a bin: (weight in bin) * delta^2 / h
    std::vector<double> contrib(static_cast<std::size_t>(bmax - bmin + 1), 0.0);
    for (const auto& atom : m.atoms) {
        contrib[static_cast<std::size_t>(bin_of(atom.x) - bmin)] += atom.v * delta * delta / h;
    }

    std::unordered_map<long, std::uint64_t> occ;
    PathOracleResult res;
    long site = 0;
    double clock = 0.0;
    for (;;) {
        if (res.n_steps >= step_cap) {
            throw cap_error("fin path oracle: step cap exhausted before the clock reached t");
        }
        ++res.n_steps;
        const double x = static_cast<double>(site) * delta;
        const long b = bin_of(x);
        if (record_occupation) ++occ[b];
        if (b >= bmin && b <= bmax) {
            clock += contrib[static_cast<std::size_t>(b - bmin)];
            if (clock > t) {
                // The clock only ticks inside atom bins, so the crossing site
                // sits within h of an atom. The process itself lives on the
                // atoms; report the nearest one rather than the raw site,
                // which is off by the bin resolution.
                auto it = std::lower_bound(m.atoms.begin(), m.atoms.end(), x,
                                           [](const Atom& atom, double p) { return atom.x < p; });
                double best = (it != m.atoms.end()) ? it->x : m.atoms.back().x;
                if (it != m.atoms.begin()) {
                    const double left = std::prev(it)->x;
                    if (std::fabs(left - x) < std::fabs(best - x)) best = left;
                }
                res.position = best;
                break;
            }
        }
        site += rng.coin() ? 1 : -1;
    }

    if (record_occupation) {
        res.bin_occupation.reserve(occ.size());
        double elapsed = 0.0;
        for (const auto& [b, count] : occ) {
            const double o = static_cast<double>(count) * delta * delta;
            res.bin_occupation.emplace_back(b, o);
            elapsed += o;
        }
        std::sort(res.bin_occupation.begin(), res.bin_occupation.end());
        res.elapsed_walk_time = elapsed;
    } else {
        res.elapsed_walk_time = static_cast<double>(res.n_steps) * delta * delta;
    }
    return res;
}

} // namespace traplab
