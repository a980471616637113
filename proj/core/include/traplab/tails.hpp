#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "traplab/fin_diffusion.hpp"
#include "traplab/stats.hpp"

namespace traplab {

struct TailRow {
    double t = 1.0;
    double x = 0.0;
    double y = 0.0; // (x / t^{alpha/(1+alpha)})^{1+alpha}
    std::uint64_t k = 0;
    std::uint64_t n = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool resolved = false; // k > 0
};

struct TailCurve {
    double alpha = 0.5;
    std::string process;      // "btm" or "fin"
    std::string method;       // "event_walk", "jump_chain", "rescaled_btm"
    double t = 1.0;
    double regime_max_ratio = 0.0; // max x/t over the grid (walk curves)
    double epsilon = 0.0;
    double v_min = 0.0;
    double window = 0.0;
    std::uint64_t n_rep = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t n_edge_exits = 0; // paths that touched the window edge
    std::vector<TailRow> rows;      // sorted by y

    std::vector<FitPoint> fit_points() const;
};

// Annealed running-max tail curve for the trap walk: a fresh environment per
// replica, one path serving the whole x grid through its running |X| max.
TailCurve estimate_tail_btm(double alpha, double t, std::span<const double> x_grid,
                            std::uint64_t n_rep, std::uint64_t master_seed, unsigned workers = 1,
                            double regime_bound = 0.1,
                            std::uint64_t event_cap = default_event_cap);

enum class FinTailMethod { jump_chain, rescaled_btm };

// Annealed running-max tail curve for the singular diffusion at t = 1.
TailCurve estimate_tail_fin(double alpha, std::span<const double> x_grid, std::uint64_t n_rep,
                            FinTailMethod method, std::uint64_t master_seed, unsigned workers = 1,
                            double epsilon = 0.01, double v_min = 1e-3, double window = 20.0,
                            std::uint64_t event_cap = default_event_cap);

// Scaling mode for the time-rescaling diagnostic: the self-similar exponent
// alpha/(1+alpha) derivable from the ingredient scale invariances, or the
// reciprocal exponent (1+alpha)/alpha run as a falsification diagnostic.
enum class ScalingExponent { self_similar, reciprocal };

struct ScalingCheckReport {
    double alpha = 0.5;
    double lambda = 16.0;
    std::size_t n = 0;
    ScalingExponent mode = ScalingExponent::self_similar;
    double scale_factor = 0.0; // lambda^{-exponent} applied to Z_lambda samples
    KsResult ks;
    double critical = 0.0;
    bool pass = false;
};

ScalingCheckReport scaling_invariance_check(double alpha, double lambda, std::size_t n,
                                            ScalingExponent mode, std::uint64_t master_seed,
                                            unsigned workers = 1, double v_min = 1e-3,
                                            double window = 20.0);

} // namespace traplab
