#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "traplab/environment.hpp"
#include "traplab/rng.hpp"

namespace traplab {

inline constexpr std::uint64_t default_event_cap = 1'000'000'000ull;

// Piecewise-constant path of a jump process. Positions are lattice sites for
// the trap walk and atom locations for the singular diffusion.
struct Trajectory {
    double start = 0.0;
    std::vector<std::pair<double, double>> events; // (time, new position)
    double t_end = 0.0;
    bool truncated = false;
};

// Read-through depth cache that extends an environment window on demand.
// Sites outside the materialized window come from the environment's per-site
// streams, so lazy extension is deterministic and order-independent.
class LazyDepths {
  public:
    explicit LazyDepths(const TrapEnvironment& env) : env_(&env) {}

    double at(long z) {
        if (env_->in_window(z)) return env_->depths[static_cast<std::size_t>(z - env_->z_lo)];
        if (z < env_->z_lo) {
            const auto idx = static_cast<std::size_t>(env_->z_lo - 1 - z);
            while (left_.size() <= idx) {
                left_.push_back(site_depth(env_->site_seed, env_->alpha,
                                           env_->z_lo - 1 - static_cast<long>(left_.size())));
            }
            return left_[idx];
        }
        const auto idx = static_cast<std::size_t>(z - env_->z_hi - 1);
        while (right_.size() <= idx) {
            right_.push_back(site_depth(env_->site_seed, env_->alpha,
                                        env_->z_hi + 1 + static_cast<long>(right_.size())));
        }
        return right_[idx];
    }

  private:
    const TrapEnvironment* env_;
    std::vector<double> left_;
    std::vector<double> right_;
};

struct WalkEndpoint {
    long position = 0;
    long abs_max = 0; // running max of |position| over the path
    std::uint64_t n_events = 0;
    bool truncated = false;
};

Trajectory simulate_btm_path(const TrapEnvironment& env, double t_max, Rng& rng,
                             std::uint64_t event_cap = default_event_cap);

long btm_position_at(const TrapEnvironment& env, double t, Rng& rng,
                     std::uint64_t event_cap = default_event_cap);

WalkEndpoint btm_endpoint_at(const TrapEnvironment& env, double t, Rng& rng,
                             std::uint64_t event_cap = default_event_cap);

struct HitResult {
    double time = std::numeric_limits<double>::infinity();
    bool truncated = false;
    std::uint64_t n_events = 0;
};

// First time the walk sits at level b; +inf sentinel when the cap is reached.
HitResult btm_hitting_time(const TrapEnvironment& env, long b, Rng& rng,
                           std::uint64_t event_cap = default_event_cap);

// First time |X| = b. Unlike the one-sided hit this has finite mean.
HitResult btm_exit_time(const TrapEnvironment& env, long b, Rng& rng,
                        std::uint64_t event_cap = default_event_cap);

// Frozen-window walk with reflecting edges (outward jumps suppressed); the
// dynamics match btm_exact_marginal site for site.
long btm_position_at_reflecting(const TrapEnvironment& env, double t, Rng& rng);

// Kolmogorov forward equations of the frozen reflecting-window chain started
// at 0, integrated with an adaptive Dormand-Prince scheme to the given
// tolerance. Returns the law of X_t over [z_lo, z_hi].
std::vector<double> btm_exact_marginal(const TrapEnvironment& env, double t, double tol = 1e-9);

} // namespace traplab
