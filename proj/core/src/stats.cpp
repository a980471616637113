#include "traplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace traplab {

double KsResult::critical(double level) const {
    if (level <= 0.0 || level >= 1.0) throw std::invalid_argument("ks: level must be in (0,1)");
    const double c = std::sqrt(-std::log(level / 2.0) / 2.0);
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return c * std::sqrt((nn + mm) / (nn * mm));
}

KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("ks: empty sample");
    std::vector<double> a(xs.begin(), xs.end());
    std::vector<double> b(ys.begin(), ys.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    KsResult res;
    res.n = a.size();
    res.m = b.size();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        d = std::max(d, std::fabs(fa - fb));
    }
    res.d = d;
    return res;
}

Interval binomial_ci(std::uint64_t k, std::uint64_t n, double level) {
    if (n == 0 || k > n) throw std::invalid_argument("binomial_ci: need 0 <= k <= n, n >= 1");
    if (level <= 0.0 || level >= 1.0) throw std::invalid_argument("binomial_ci: level in (0,1)");
    const double alpha = 1.0 - level;
    Interval ci;
    const double kk = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    ci.lo = (k == 0) ? 0.0 : boost::math::ibeta_inv(kk, nn - kk + 1.0, alpha / 2.0);
    ci.hi = (k == n) ? 1.0 : boost::math::ibeta_inv(kk + 1.0, nn - kk, 1.0 - alpha / 2.0);
    return ci;
}

double FitReport::prediction_se(double y, double obs_se) const {
    const double fit_var = var_intercept + y * y * var_slope + 2.0 * y * cov_slope_intercept;
    return std::sqrt(std::max(0.0, fit_var) + obs_se * obs_se);
}

FitReport fit_tail_exponent(std::span<const FitPoint> points, std::uint64_t min_successes) {
    FitReport rep;
    rep.min_successes = min_successes;

    for (const auto& pt : points) {
        if (pt.n == 0) throw std::invalid_argument("fit_tail_exponent: point with n = 0");
        // k == n carries zero delta-method variance and no tail information.
        if (pt.k < min_successes || pt.k == pt.n) {
            ++rep.points_dropped;
            continue;
        }
        const double p = static_cast<double>(pt.k) / static_cast<double>(pt.n);
        const double obs = -std::log(p);
        const double var = (1.0 - p) / (static_cast<double>(pt.n) * p);
        rep.y_used.push_back(pt.y);
        rep.observed.push_back(obs);
        rep.observed_se.push_back(std::sqrt(var));
    }
    if (rep.y_used.size() < 3) throw std::runtime_error("fit_tail_exponent: insufficient resolved tail");

    const auto [y_min, y_max] = std::minmax_element(rep.y_used.begin(), rep.y_used.end());
    if (*y_min <= 0.0 || *y_max / *y_min < 4.0 * (1.0 - 1e-12)) {
        throw std::runtime_error("fit_tail_exponent: usable y values must span a factor of 4");
    }

    double sw = 0, sy = 0, sl = 0, syy = 0, syl = 0;
    for (std::size_t i = 0; i < rep.y_used.size(); ++i) {
        const double se = rep.observed_se[i];
        const double w = 1.0 / (se * se);
        const double y = rep.y_used[i];
        const double l = rep.observed[i];
        sw += w;
        sy += w * y;
        sl += w * l;
        syy += w * y * y;
        syl += w * y * l;
    }
    const double det = sw * syy - sy * sy;
    if (det <= 0.0) throw std::runtime_error("fit_tail_exponent: degenerate design");

    rep.slope = (sw * syl - sy * sl) / det;
    rep.intercept = (syy * sl - sy * syl) / det;
    rep.log_big_c = -rep.intercept;
    rep.var_slope = sw / det;
    rep.var_intercept = syy / det;
    rep.cov_slope_intercept = -sy / det;
    const double z = 1.959963984540054; // two-sided 95%
    rep.slope_ci_lo = rep.slope - z * std::sqrt(rep.var_slope);
    rep.slope_ci_hi = rep.slope + z * std::sqrt(rep.var_slope);

    const double l_bar = sl / sw;
    double ss_res = 0, ss_tot = 0;
    rep.points_used = rep.y_used.size();
    rep.fitted.resize(rep.points_used);
    rep.residuals.resize(rep.points_used);
    for (std::size_t i = 0; i < rep.points_used; ++i) {
        const double w = 1.0 / (rep.observed_se[i] * rep.observed_se[i]);
        rep.fitted[i] = rep.predict(rep.y_used[i]);
        rep.residuals[i] = rep.observed[i] - rep.fitted[i];
        ss_res += w * rep.residuals[i] * rep.residuals[i];
        ss_tot += w * (rep.observed[i] - l_bar) * (rep.observed[i] - l_bar);
    }
    rep.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 0.0;
    rep.reduced_chi2 =
        rep.points_used > 2 ? ss_res / static_cast<double>(rep.points_used - 2) : 0.0;
    return rep;
}

} // namespace traplab
