#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace traplab {

struct KsResult {
    double d = 0.0;     // sup-distance between the two empirical CDFs
    std::size_t n = 0;  // first sample size
    std::size_t m = 0;  // second sample size

    // Asymptotic two-sample critical value at the given significance level.
    double critical(double level = 0.05) const;
};

KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool contains(double p) const { return lo <= p && p <= hi; }
};

// Clopper-Pearson exact binomial interval.
Interval binomial_ci(std::uint64_t k, std::uint64_t n, double level = 0.95);

inline double binomial_se(double p_hat, double n) {
    return n > 0 ? std::sqrt(p_hat * (1.0 - p_hat) / n) : 0.0;
}

// One tail-curve row: y is the transformed abscissa, k successes out of n.
struct FitPoint {
    double y = 0.0;
    std::uint64_t k = 0;
    std::uint64_t n = 0;
};

// Weighted least-squares fit of -log(k/n) = slope * y + intercept, with
// delta-method binomial weights. The fitted tail is p ~ C exp(-c y) with
// c = slope and log C = -intercept.
struct FitReport {
    double slope = 0.0;
    double intercept = 0.0;
    double log_big_c = 0.0; // -intercept
    double r_squared = 0.0;
    double var_slope = 0.0;
    double var_intercept = 0.0;
    double cov_slope_intercept = 0.0;
    double slope_ci_lo = 0.0;
    double slope_ci_hi = 0.0;
    // Weighted residual sum of squares over (points - 2): near 1 when the
    // binomial noise explains the scatter, larger when the line is only an
    // envelope-level description (slowly drifting local slope).
    double reduced_chi2 = 0.0;
    std::size_t points_used = 0;
    std::size_t points_dropped = 0;
    std::uint64_t min_successes = 20;
    std::vector<double> y_used;
    std::vector<double> observed; // -log p_hat
    std::vector<double> fitted;
    std::vector<double> residuals;
    std::vector<double> observed_se;

    double predict(double y) const { return slope * y + intercept; }
    // Standard error of (observation - prediction) at abscissa y, where the
    // observation itself has standard error obs_se.
    double prediction_se(double y, double obs_se) const;
    // Overdispersion factor for prediction bands: sqrt(max(1, reduced_chi2)),
    // the usual quasi-likelihood variance scaling.
    double dispersion_scale() const { return std::sqrt(std::max(1.0, reduced_chi2)); }
};

FitReport fit_tail_exponent(std::span<const FitPoint> points,
                            std::uint64_t min_successes = 20);

} // namespace traplab
