#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ccheis/error.hpp"

namespace ccheis::detail {

/// Kronrod nodes on [0, 1] (non-negative half) with Kronrod and embedded Gauss weights.
template <unsigned Points>
struct KronrodRule {
    std::vector<double> x, wk, wg;

    static const KronrodRule& get()
    {
        static const KronrodRule rule = [] {
            using kr = boost::math::quadrature::gauss_kronrod<double, Points>;
            using gr = boost::math::quadrature::gauss<double, Points / 2>;
            KronrodRule r;
            const auto& kx = kr::abscissa();
            const auto& kw = kr::weights();
            r.x.assign(kx.begin(), kx.end());
            r.wk.assign(kw.begin(), kw.end());
            r.wg.assign(r.x.size(), 0.0);
            const auto& gx = gr::abscissa();
            const auto& gw = gr::weights();
            for (std::size_t i = 0; i < gx.size(); ++i)
                for (std::size_t j = 0; j < r.x.size(); ++j)
                    if (std::abs(r.x[j] - gx[i]) < 1e-14) r.wg[j] = gw[i];
            return r;
        }();
        return rule;
    }
};

template <class T>
double magnitude(const T& v)
{
    return std::abs(v);
}

/// Globally adaptive Gauss-Kronrod (QUADPACK error heuristic) on [a, b];
/// endpoints are never sampled. Stops when the summed error estimate is below
/// rel_tol times the integral of |f|, or when the interval to split has
/// already been halved max_depth times. Works for real or complex integrands.
template <unsigned Points, class F>
auto gk_adapt(F&& f, double a, double b, double rel_tol, unsigned max_depth, double* err, double* l1)
{
    using R = std::decay_t<decltype(f(a))>;
    const auto& rule = KronrodRule<Points>::get();
    constexpr double eps = std::numeric_limits<double>::epsilon();

    struct Panel {
        double lo, hi;
        R val;
        double err, l1;
        unsigned depth;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    auto eval = [&](double lo, double hi, unsigned depth) {
        const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
        const std::size_t n = rule.x.size();
        std::vector<R> fv(2 * n);
        R k{}, g{};
        double l1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const R fp = f(c + hw * rule.x[i]);
            const R fm = rule.x[i] == 0.0 ? R{} : f(c - hw * rule.x[i]);
            fv[2 * i] = fp;
            fv[2 * i + 1] = fm;
            k += rule.wk[i] * (fp + fm);
            g += rule.wg[i] * (fp + fm);
            l1 += rule.wk[i] * (magnitude(fp) + magnitude(fm));
        }
        const R mean = 0.5 * k;
        double asc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            asc += rule.wk[i] * magnitude(fv[2 * i] - mean);
            if (rule.x[i] != 0.0) asc += rule.wk[i] * magnitude(fv[2 * i + 1] - mean);
        }
        asc *= hw;
        l1 *= hw;
        double e = magnitude((k - g) * hw);
        if (asc != 0.0 && e != 0.0) e = asc * std::min(1.0, std::pow(200.0 * e / asc, 1.5));
        e = std::max(e, 50.0 * eps * l1);
        return Panel{lo, hi, R(k * hw), e, l1, depth};
    };

    std::priority_queue<Panel> heap;
    Panel first = eval(a, b, 0);
    R total = first.val;
    double total_err = first.err, total_l1 = first.l1;
    heap.push(first);
    // Panel errors are floored at 50 eps times their L1 mass, so tighter
    // requests could never be met.
    rel_tol = std::max(rel_tol, 100.0 * eps);
    while (total_err > rel_tol * total_l1) {
        Panel p = heap.top();
        if (p.depth >= max_depth) break;
        heap.pop();
        const double mid = 0.5 * (p.lo + p.hi);
        const Panel left = eval(p.lo, mid, p.depth + 1), right = eval(mid, p.hi, p.depth + 1);
        total += left.val + right.val - p.val;
        total_err += left.err + right.err - p.err;
        total_l1 += left.l1 + right.l1 - p.l1;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    total = R{};
    total_err = 0.0;
    total_l1 = 0.0;
    while (!heap.empty()) {
        total += heap.top().val;
        total_err += heap.top().err;
        total_l1 += heap.top().l1;
        heap.pop();
    }
    if (!std::isfinite(magnitude(total))) throw Error(ErrorCode::QuadratureFailure, "non-finite integral");
    if (err) *err = total_err;
    if (l1) *l1 = total_l1;
    return total;
}

/// Adaptive 15-point Gauss-Kronrod on [a, b].
template <class F>
auto gk15(F&& f, double a, double b, double rel_tol, unsigned max_depth = 12, double* err = nullptr,
          double* l1 = nullptr)
{
    return gk_adapt<15>(f, a, b, rel_tol, max_depth, err, l1);
}

/// Same with the 31-point pair, for smooth nested integrands.
template <class F>
auto gk31(F&& f, double a, double b, double rel_tol, unsigned max_depth = 12, double* err = nullptr,
          double* l1 = nullptr)
{
    return gk_adapt<31>(f, a, b, rel_tol, max_depth, err, l1);
}

/// Counter-based uniform variate in (0, 1) keyed by four integers.
inline std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                              std::uint64_t lane)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ index);
    h = splitmix64(h ^ lane);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace ccheis::detail
