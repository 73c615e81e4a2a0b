#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace ccheis::roots {

struct Result {
    double x = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Safeguarded Newton iteration for an increasing function on a bracket
/// (lo, hi) with f(lo) <= 0 <= f(hi). The endpoints are never evaluated,
/// so singular endpoints are fine. `f_df(x)` returns {f(x), f'(x)}.
/// A Newton step is kept when it stays inside the bracket and is at most
/// half the step before last; otherwise the bracket is bisected.
template <class FDF>
Result newton_bisect(FDF&& f_df, double lo, double hi, double xtol, double x0 = NAN,
                     int max_iter = 300)
{
    double x = (std::isfinite(x0) && x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
    double dx_old = hi - lo, dx = dx_old;
    for (int it = 1; it <= max_iter; ++it) {
        auto [f, df] = f_df(x);
        if (f == 0.0) return {x, it, true};
        if (f < 0.0) lo = x; else hi = x;

        const double tol = xtol + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x);
        if (hi - lo <= tol) return {0.5 * (lo + hi), it, true};

        const double step = (std::isfinite(df) && df > 0.0) ? f / df : NAN;
        const double next = x - step;
        if (std::abs(step) <= tol) return {(next > lo && next < hi) ? next : x, it, true};
        const bool newton_ok = std::isfinite(next) && next > lo && next < hi &&
                               std::abs(2.0 * step) <= std::abs(dx_old);
        dx_old = dx;
        if (newton_ok) {
            dx = step;
            x = next;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
    }
    return {x, max_iter, false};
}

/// Plain bisection for an increasing function with the same bracket contract.
template <class F>
Result bisect(F&& f, double lo, double hi, double xtol, int max_iter = 400)
{
    for (int it = 1; it <= max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = f(mid);
        if (v == 0.0) return {mid, it, true};
        if (v < 0.0) lo = mid; else hi = mid;
        if (hi - lo <= xtol + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(mid))
            return {0.5 * (lo + hi), it, true};
    }
    return {0.5 * (lo + hi), max_iter, false};
}

} // namespace ccheis::roots
