#include "traplab/trap_walk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "traplab/errors.hpp"

namespace traplab {

namespace {

void require_origin(const TrapEnvironment& env) {
    if (!env.in_window(0)) throw std::invalid_argument("btm: environment window must contain 0");
}

// Core event loop. The observer sees every jump (time, new position) and may
// stop the walk by returning false. Returns at t_max, on observer stop, or
// with `truncated` set when the event cap is exhausted.
template <class Observer>
WalkEndpoint run_walk(const TrapEnvironment& env, double t_max, Rng& rng,
                      std::uint64_t event_cap, Observer&& observe) {
    require_origin(env);
    LazyDepths depths(env);
    WalkEndpoint end;
    long pos = 0;
    double t = 0.0;
    for (;;) {
        const double tau = depths.at(pos);
        const double dt = rng.exponential(tau);
        if (t + dt > t_max) break;
        t += dt;
        if (end.n_events >= event_cap) {
            end.truncated = true;
            break;
        }
        ++end.n_events;
        pos += rng.coin() ? 1 : -1;
        end.abs_max = std::max(end.abs_max, std::labs(pos));
        if (!observe(t, pos)) break;
    }
    end.position = pos;
    return end;
}

} // namespace

Trajectory simulate_btm_path(const TrapEnvironment& env, double t_max, Rng& rng,
                             std::uint64_t event_cap) {
    if (!(t_max > 0.0)) throw std::invalid_argument("simulate_btm_path: t_max must be positive");
    Trajectory traj;
    const auto end = run_walk(env, t_max, rng, event_cap, [&](double t, long pos) {
        traj.events.emplace_back(t, static_cast<double>(pos));
        return true;
    });
    traj.t_end = t_max;
    traj.truncated = end.truncated;
    return traj;
}

long btm_position_at(const TrapEnvironment& env, double t, Rng& rng, std::uint64_t event_cap) {
    if (t < 0.0) throw std::invalid_argument("btm_position_at: negative time");
    if (t == 0.0) {
        require_origin(env);
        return 0;
    }
    return run_walk(env, t, rng, event_cap, [](double, long) { return true; }).position;
}

WalkEndpoint btm_endpoint_at(const TrapEnvironment& env, double t, Rng& rng,
                             std::uint64_t event_cap) {
    if (!(t > 0.0)) throw std::invalid_argument("btm_endpoint_at: t must be positive");
    return run_walk(env, t, rng, event_cap, [](double, long) { return true; });
}

HitResult btm_hitting_time(const TrapEnvironment& env, long b, Rng& rng,
                           std::uint64_t event_cap) {
    HitResult res;
    if (b == 0) {
        require_origin(env);
        res.time = 0.0;
        return res;
    }
    double hit_at = std::numeric_limits<double>::infinity();
    const auto end = run_walk(env, std::numeric_limits<double>::infinity(), rng, event_cap,
                              [&](double t, long pos) {
                                  if (pos == b) {
                                      hit_at = t;
                                      return false;
                                  }
                                  return true;
                              });
    res.time = hit_at;
    res.truncated = end.truncated;
    res.n_events = end.n_events;
    return res;
}

HitResult btm_exit_time(const TrapEnvironment& env, long b, Rng& rng, std::uint64_t event_cap) {
    if (b <= 0) throw std::invalid_argument("btm_exit_time: level must be positive");
    HitResult res;
    double hit_at = std::numeric_limits<double>::infinity();
    const auto end = run_walk(env, std::numeric_limits<double>::infinity(), rng, event_cap,
                              [&](double t, long pos) {
                                  if (pos == b || pos == -b) {
                                      hit_at = t;
                                      return false;
                                  }
                                  return true;
                              });
    res.time = hit_at;
    res.truncated = end.truncated;
    res.n_events = end.n_events;
    return res;
}

long btm_position_at_reflecting(const TrapEnvironment& env, double t, Rng& rng) {
    require_origin(env);
    long pos = 0;
    double now = 0.0;
    for (;;) {
        const double tau = env.depth(pos);
        const bool at_lo = pos == env.z_lo;
        const bool at_hi = pos == env.z_hi;
        // Edge sites jump inward only, at the one-sided rate 1/(2 tau).
        const double mean_hold = (at_lo || at_hi) ? 2.0 * tau : tau;
        now += rng.exponential(mean_hold);
        if (now > t) return pos;
        if (at_lo) {
            ++pos;
        } else if (at_hi) {
            --pos;
        } else {
            pos += rng.coin() ? 1 : -1;
        }
    }
}

namespace {

// dp/dt = Q^T p for the reflecting-window chain; tridiagonal, conservative.
void forward_derivative(const std::vector<double>& half_rates, const std::vector<double>& p,
                        std::vector<double>& dp) {
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double leave = half_rates[i] * ((i > 0 ? 1.0 : 0.0) + (i + 1 < n ? 1.0 : 0.0));
        double in = 0.0;
        if (i > 0) in += half_rates[i - 1] * p[i - 1];
        if (i + 1 < n) in += half_rates[i + 1] * p[i + 1];
        dp[i] = in - leave * p[i];
    }
}

} // namespace

std::vector<double> btm_exact_marginal(const TrapEnvironment& env, double t, double tol) {
    require_origin(env);
    if (t < 0.0) throw std::invalid_argument("btm_exact_marginal: negative time");
    const std::size_t n = static_cast<std::size_t>(env.width());
    if (n > 4096) {
        throw std::invalid_argument("btm_exact_marginal: window too large for the dense oracle");
    }

    std::vector<double> p(n, 0.0);
    p[static_cast<std::size_t>(-env.z_lo)] = 1.0;
    if (t == 0.0) return p;

    std::vector<double> half_rates(n);
    for (std::size_t i = 0; i < n; ++i) half_rates[i] = 0.5 / env.depths[i];

    // Dormand-Prince 5(4) with PI-free step control.
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), p5(n);
    double now = 0.0;
    double hstep = std::min(t, 0.1);
    const double atol = tol * 1e-3;
    std::size_t n_steps = 0, n_rejects = 0;

    forward_derivative(half_rates, p, k1);
    while (now < t) {
        hstep = std::min(hstep, t - now);
        if (hstep < 1e-13 * std::max(1.0, t)) {
            std::ostringstream msg;
            msg << "btm_exact_marginal: step size underflow at t=" << now << " after " << n_steps
                << " steps (" << n_rejects << " rejected); system too stiff for tolerance " << tol;
            throw std::runtime_error(msg.str());
        }

        for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + hstep * a21 * k1[i];
        forward_derivative(half_rates, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + hstep * (a31 * k1[i] + a32 * k2[i]);
        forward_derivative(half_rates, tmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = p[i] + hstep * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        forward_derivative(half_rates, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = p[i] + hstep * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        forward_derivative(half_rates, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = p[i] + hstep * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                     a65 * k5[i]);
        forward_derivative(half_rates, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            p5[i] = p[i] + hstep * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        forward_derivative(half_rates, p5, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = hstep * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]);
            err = std::max(err, std::fabs(e) / (atol + tol * std::fabs(p5[i])));
        }

        if (err <= 1.0) {
            now += hstep;
            p.swap(p5);
            k1.swap(k7); // first-same-as-last
            ++n_steps;
        } else {
            ++n_rejects;
        }
        const double scale = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        hstep *= std::clamp(scale, 0.2, 5.0);
    }
    return p;
}

} // namespace traplab
