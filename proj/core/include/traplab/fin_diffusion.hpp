#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "traplab/environment.hpp"
#include "traplab/rng.hpp"
#include "traplab/trap_walk.hpp"

namespace traplab {

struct FinEndpoint {
    double position = 0.0;
    double abs_max = 0.0; // running max of |Z| over visited atoms
    std::uint64_t n_events = 0;
    bool touched_edge = false; // visited an extreme atom: window likely too small
};

struct FinHit {
    bool hit = false;
    double time = std::numeric_limits<double>::infinity();
    bool touched_edge = false;
};

// Markov jump chain on the atoms of a fixed measure: from atom i the walk
// jumps left at rate 1/(2 v_i (x_i - x_{i-1})) and right at rate
// 1/(2 v_i (x_{i+1} - x_i)); the initial atom is drawn from the pair
// straddling 0 with gambler's-ruin probabilities. Extreme atoms have only the
// inward rate; visiting one sets touched_edge.
FinEndpoint fin_jumpchain_endpoint(const AtomicMeasure& m, double t_max, Rng& rng,
                                   std::uint64_t event_cap = default_event_cap);

Trajectory simulate_fin_jumpchain(const AtomicMeasure& m, double t_max, Rng& rng,
                                  std::uint64_t event_cap = default_event_cap);

// First arrival at an atom with x <= level (level < 0), before the deadline.
FinHit fin_jumpchain_hit_below(const AtomicMeasure& m, double level, double deadline, Rng& rng,
                               std::uint64_t event_cap = default_event_cap);

// Annealed variants: a fresh truncated atom cloud on [-window, window] grown
// lazily around the path, chunk by chunk, from per-chunk substreams.
FinEndpoint fin_annealed_endpoint(double alpha, double v_min, double window, double t_max,
                                  Rng& rng, std::uint64_t event_cap = default_event_cap);

FinHit fin_annealed_hit_below(double alpha, double v_min, double window, double level,
                              double deadline, Rng& rng,
                              std::uint64_t event_cap = default_event_cap);

// Rescaled-walk route: eps * X_{t * eps^{-(1+alpha)/alpha}} on a fresh Pareto
// environment; position and running max are returned on the diffusive scale.
FinEndpoint fin_rescaled_btm_endpoint(double alpha, double epsilon, double t, Rng& rng,
                                      std::uint64_t event_cap = default_event_cap);

// Brute-force route: a delta-step walk approximating Brownian motion, with
// local time estimated as bin occupation / h and the speed-measure clock
// accumulated atom by atom. Expensive; used as a cross-method oracle.
struct PathOracleResult {
    double position = 0.0;
    double elapsed_walk_time = 0.0;
    std::uint64_t n_steps = 0;
    // (bin index, occupation time); filled only when requested. The summed
    // occupation equals elapsed_walk_time exactly.
    std::vector<std::pair<long, double>> bin_occupation;
};

PathOracleResult fin_pathdiscrete(const AtomicMeasure& m, double t, double h, double delta,
                                  Rng& rng, std::uint64_t step_cap = 8'000'000'000ull,
                                  bool record_occupation = false);

inline double fin_pathdiscrete_position(const AtomicMeasure& m, double t, double h, double delta,
                                        Rng& rng) {
    return fin_pathdiscrete(m, t, h, delta, rng).position;
}

} // namespace traplab
