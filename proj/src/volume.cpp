#include "ccheis/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ccheis/detail/quad.hpp"
#include "ccheis/distance.hpp"
#include "ccheis/roots.hpp"

namespace ccheis {

std::string_view to_string(VolumeMethod m)
{
    return m == VolumeMethod::ThetaQuadrature ? "theta-quadrature" : "monte-carlo";
}

namespace {

constexpr double kPi = std::numbers::pi;

double sphere_area(int k) { return 2.0 * std::pow(kPi, k) / std::tgamma(static_cast<double>(k)); }

double sum(std::span<const double> v)
{
    double acc = 0.0;
    for (double e : v) acc += e;
    return acc;
}

// Integral over the unit sphere S^{d-1} of f(omega) by nested hyperspherical
// Gauss-Kronrod. Used for m >= 3 slices.
double sphere_integral(int d, double rel_tol, const std::function<double(const Vec&)>& f)
{
    Vec omega(d);
    std::function<double(int, double)> rec = [&](int i, double scale) -> double {
        if (i == d - 2) {
            return detail::gk15([&](double az) {
                omega[i] = scale * std::cos(az);
                omega[i + 1] = scale * std::sin(az);
                return f(omega);
            }, 0.0, 2.0 * kPi, rel_tol, 8);
        }
        const int rest = d - 1 - i;
        return detail::gk15([&](double psi) {
            omega[i] = scale * std::cos(psi);
            return std::pow(std::sin(psi), rest - 1) * rec(i + 1, scale * std::sin(psi));
        }, 0.0, kPi, rel_tol, 8);
    };
    return rec(0, 1.0);
}

} // namespace

double euclidean_ball_volume(int k, double R)
{
    return std::exp(0.5 * k * std::log(kPi) - std::lgamma(0.5 * k + 1.0)) * std::pow(R, k);
}

double jacobian_det_fx(const GroupSpec& spec, const Vec& x, const Vec& theta)
{
    if (x.size() != spec.dim_x() || theta.size() != spec.m())
        throw Error(ErrorCode::InvalidSpec, "point dimensions do not match the group");
    const auto norms_sq = block_norms_sq(spec, x);
    if (norms_sq.back() == 0.0) throw Error(ErrorCode::DegenerateX, "x_(top) = 0");
    const Spectral sp(spec);
    const double rho = theta.norm();
    const double a0 = sp.a_profile(norms_sq, rho);
    const double a1 = sp.a_profile_prime_over_rho(norms_sq, rho);
    double prod = 1.0, s = 0.0;
    for (int l = 0; l < spec.m(); ++l) {
        const double e = a0 + 2.0 * spec.b()[l];
        prod *= e;
        s += theta[l] * theta[l] / e;
    }
    return (1.0 + a1 * s) * prod;
}

namespace detail {

double boundary_rho(const Spectral& sp, std::span<const double> norms_sq, const Vec& omega, double R,
                    double guess)
{
    const auto& b = sp.spec().b();
    double bw = 0.0;
    for (std::size_t l = 0; l < b.size(); ++l) bw += b[l] * omega[l] * omega[l];
    // 1 - R/sqrt(d^2) is close to linear near the pole of d^2 at r_max.
    auto f_df = [&](double rho) {
        const double d2 = sc_sum(sp, norms_sq, rho) + 4.0 * bw * rho * rho;
        const double d2p = sc_sum_prime(sp, norms_sq, rho) + 8.0 * bw * rho;
        const double q = R / std::sqrt(d2);
        return std::pair{1.0 - q, 0.5 * q * d2p / d2};
    };
    const auto res = roots::newton_bisect(f_df, 0.0, sp.r_max(), 1e-15 * sp.r_max(), guess);
    if (!res.converged) throw Error(ErrorCode::NoConvergence, "slice boundary root did not converge");
    return res.x;
}

double slice_volume(const Spectral& sp, std::span<const double> norms_sq, double R, double rel_tol)
{
    const auto& spec = sp.spec();
    if (R * R <= sum(norms_sq)) return 0.0;
    if (norms_sq.back() == 0.0) throw Error(ErrorCode::DegenerateX, "x_(top) = 0");
    const auto& b = spec.b();
    const int m = spec.m();

    if (m == 1) {
        Vec e1 = Vec::Ones(1);
        const double th = boundary_rho(sp, norms_sq, e1, R);
        return 2.0 * th * (sp.a_profile(norms_sq, th) + 2.0 * b[0]);
    }

    if (m == 2 && b[0] == b[1]) {
        // Isotropic b: the theta-region is a disk and F_x scales it uniformly.
        Vec e1 = Vec::Unit(2, 0);
        const double th = boundary_rho(sp, norms_sq, e1, R);
        const double e = sp.a_profile(norms_sq, th) + 2.0 * b[0];
        return kPi * th * th * e * e;
    }

    if (m == 2) {
        // Area enclosed by t(omega) = F_x(rho~(omega) omega) via
        // 1/2 closed integral of (t1 dt2 - t2 dt1). The angle is taken as
        // tan omega = sqrt(w1/w2) tan psi, with w_l the quadratic weights of d^2
        // near theta = 0, so elongated regions stay smooth in psi. The integrand
        // is even and pi/2-reflective, so a quarter turn suffices.
        const double cx = sp.a_profile(norms_sq, 0.0) * 2.0;
        const double w1 = cx + 4.0 * b[0], w2 = cx + 4.0 * b[1];
        const double sw = std::sqrt(w1 * w2);
        double rho_prev = NAN;
        auto integrand = [&](double psi) {
            const double cp = std::cos(psi) / std::sqrt(w1), sp_ = std::sin(psi) / std::sqrt(w2);
            const double nrm = std::hypot(cp, sp_);
            const double c = cp / nrm, s = sp_ / nrm;
            const double dw_dpsi = sw / (w2 * std::cos(psi) * std::cos(psi) + w1 * std::sin(psi) * std::sin(psi));
            const double bw = b[0] * c * c + b[1] * s * s;
            Vec om(2);
            om << c, s;
            const double rho = boundary_rho(sp, norms_sq, om, R, rho_prev);
            rho_prev = rho;
            const double a0 = sp.a_profile(norms_sq, rho);
            const double e1 = a0 + 2.0 * b[0], e2 = a0 + 2.0 * b[1];
            double val = e1 * e2;
            if (b[0] != b[1]) {
                const double d_rho = sc_sum_prime(sp, norms_sq, rho) + 8.0 * rho * bw;
                const double d_w = 8.0 * rho * rho * (b[1] - b[0]) * s * c;
                const double rho_p = -d_w / d_rho;
                val += 2.0 * (b[0] - b[1]) * c * s * sp.a_profile_prime(norms_sq, rho) * rho_p;
            }
            return rho * rho * val * dw_dpsi;
        };
        // Adaptive in psi: for large R the region is a disk clipped by a thin
        // ellipse, with sharp corners that defeat the periodic trapezoid rule.
        return 2.0 * gk15(integrand, 0.0, 0.5 * kPi, rel_tol, 14);
    }

    // m >= 3: polar cubature of det DF_x over the star-shaped theta-region.
    auto radial = [&](const Vec& omega) {
        const double rt = boundary_rho(sp, norms_sq, omega, R);
        return gk15([&](double rho) {
            const double a0 = sp.a_profile(norms_sq, rho);
            const double a1 = sp.a_profile_prime_over_rho(norms_sq, rho);
            double prod = 1.0, s = 0.0;
            for (int l = 0; l < m; ++l) {
                const double e = a0 + 2.0 * b[l];
                prod *= e;
                s += rho * rho * omega[l] * omega[l] / e;
            }
            return (1.0 + a1 * s) * prod * std::pow(rho, m - 1);
        }, 0.0, rt, rel_tol);
    };
    return sphere_integral(m, rel_tol, radial);
}

// E f(p) for p ~ Dirichlet(k_1..k_ell) via stick breaking.
double dirichlet_expect(const GroupSpec& spec, double rel_tol,
                        const std::function<double(std::span<const double>)>& f)
{
    const int ell = spec.ell();
    std::vector<double> p(ell);
    // Stick breaking with 1 - q = w^2 at every level: the slice volume has a
    // sqrt(p_top) term when the top block is nearly empty, and p_top is a
    // product of the (1 - q) factors.
    std::function<double(int, double)> rec = [&](int i, double rest) -> double {
        if (i == ell - 1) {
            p[i] = rest;
            return f(p);
        }
        double alpha = spec.k(i), beta = 0.0;
        for (int j = i + 1; j < ell; ++j) beta += spec.k(j);
        const double log_norm = std::lgamma(alpha + beta) - std::lgamma(alpha) - std::lgamma(beta);
        auto integrand = [&](double w) {
            const double w2 = w * w;
            const double q = 1.0 - w2;
            p[i] = rest * q;
            const double dens = std::exp(log_norm + (alpha - 1.0) * std::log(q) + (2.0 * beta - 2.0) * std::log(w));
            return 2.0 * w * dens * rec(i + 1, rest * w2);
        };
        // The density is a polynomial in w of this degree; past 9 the embedded
        // 7-point Gauss rule misses it and the error estimate forces needless splits.
        const double degree = 2.0 * (alpha - 1.0) + 2.0 * beta - 1.0;
        return degree <= 9.0 ? gk15(integrand, 0.0, 1.0, rel_tol, 10) : gk31(integrand, 0.0, 1.0, rel_tol, 10);
    };
    return rec(0, 1.0);
}

double radial_integral(const GroupSpec& spec, double R, double rel_tol,
                       const std::function<double(std::span<const double>)>& f)
{
    // A uniform direction in R^{2n} has squared block fractions ~ Dirichlet(k),
    // so int_{|x|<R} f = |S^{2n-1}| int_0^R rho^{2n-1} E f(rho^2 p) drho.
    const int n = spec.n();
    std::vector<double> norms_sq(spec.ell());
    double rho2 = 0.0;
    auto inner = [&](std::span<const double> p) {
        for (std::size_t j = 0; j < p.size(); ++j) norms_sq[j] = rho2 * p[j];
        return f(norms_sq);
    };
    // rho = R sqrt(1 - v^2) removes the square-root edge at |x| = R.
    auto integrand = [&](double v) {
        rho2 = R * R * (1.0 - v * v);
        return R * R * v * std::pow(rho2, n - 1) * dirichlet_expect(spec, rel_tol, inner);
    };
    const double total = 2 * n - 1 <= 9 ? gk15(integrand, 0.0, 1.0, rel_tol, 10) : gk31(integrand, 0.0, 1.0, rel_tol, 10);
    return sphere_area(n) * total;
}

} // namespace detail

double slice_volume(const GroupSpec& spec, const Vec& x, double R, const QuadConfig& cfg)
{
    if (x.size() != spec.dim_x()) throw Error(ErrorCode::InvalidSpec, "x must have 2n entries");
    if (!(R > 0.0)) throw Error(ErrorCode::DomainError, "R must be positive");
    const Spectral sp(spec);
    const auto norms_sq = block_norms_sq(spec, x);
    if (R * R <= sum(norms_sq)) return 0.0;
    return detail::slice_volume(sp, norms_sq, R, std::min(cfg.rel_tol, 1e-10));
}

namespace {

VolumeResult ball_volume_quad(const Spectral& sp, double R, const QuadConfig& cfg)
{
    long evals = 0;
    const double inner_tol = std::clamp(cfg.rel_tol * 1e-2, 1e-12, 1e-6);
    auto f = [&](std::span<const double> norms_sq) {
        if (++evals > cfg.max_evals)
            throw Error(ErrorCode::BudgetExceeded, "volume quadrature exceeded max_evals");
        return detail::slice_volume(sp, norms_sq, R, inner_tol);
    };
    const double v = detail::radial_integral(sp.spec(), R, cfg.rel_tol, f);
    return {v, cfg.rel_tol * std::abs(v), VolumeMethod::ThetaQuadrature};
}

VolumeResult ball_volume_mc(const Spectral& sp, double R, const QuadConfig& cfg)
{
    const auto& spec = sp.spec();
    const int dim = spec.dim_x();
    const int strata = std::max(1, cfg.mc_strata);
    const long per = std::max(2L, cfg.mc_samples / strata);
    if (cfg.mc_samples > cfg.max_evals)
        throw Error(ErrorCode::BudgetExceeded, "mc_samples exceeds max_evals");
    const double inner_tol = 1e-7;

    std::vector<double> norms_sq(spec.ell());
    Vec z(dim);
    double mean = 0.0, var = 0.0;
    for (int s = 0; s < strata; ++s) {
        double m1 = 0.0, m2 = 0.0;
        for (long i = 0; i < per; ++i) {
            // |x|^{2n} uniform within the stratum, direction from 2n normals.
            const double u = (s + detail::counter_uniform(cfg.seed, s, i, 0)) / strata;
            const double r2 = R * R * std::pow(u, 1.0 / spec.n());
            for (int k = 0; k < dim; k += 2) {
                const double u1 = detail::counter_uniform(cfg.seed, s, i, k + 1);
                const double u2 = detail::counter_uniform(cfg.seed, s, i, k + 2);
                const double rad = std::sqrt(-2.0 * std::log(u1));
                z[k] = rad * std::cos(2.0 * kPi * u2);
                z[k + 1] = rad * std::sin(2.0 * kPi * u2);
            }
            const double zz = z.squaredNorm();
            for (int j = 0; j < spec.ell(); ++j)
                norms_sq[j] = r2 * z.segment(spec.block_offset(j), 2 * spec.k(j)).squaredNorm() / zz;
            const double v = detail::slice_volume(sp, norms_sq, R, inner_tol);
            m1 += v;
            m2 += v * v;
        }
        m1 /= per;
        const double sv = std::max(m2 / per - m1 * m1, 0.0) * per / (per - 1.0);
        mean += m1 / strata;
        var += sv / (per * double(strata) * strata);
    }
    const double ball = euclidean_ball_volume(dim, R);
    return {ball * mean, 3.0 * ball * std::sqrt(var), VolumeMethod::MonteCarlo};
}

} // namespace

VolumeResult ball_volume(const GroupSpec& spec, double R, VolumeMethod method, const QuadConfig& cfg)
{
    if (!(R > 0.0)) throw Error(ErrorCode::DomainError, "R must be positive");
    const Spectral sp(spec);
    return method == VolumeMethod::ThetaQuadrature ? ball_volume_quad(sp, R, cfg)
                                                   : ball_volume_mc(sp, R, cfg);
}

double closed_form_estimate(const GroupSpec& spec, double R)
{
    if (!(R > 0.0)) throw Error(ErrorCode::DomainError, "R must be positive");
    double prod = 1.0;
    for (double bl : spec.b()) prod *= std::sqrt(R * R * spec.C_H() / 12.0 + bl);
    return euclidean_ball_volume(spec.dim_x() + spec.m(), R) * prod;
}

DoublingResult doubling_ratio(const GroupSpec& spec, double R, VolumeMethod method, const QuadConfig& cfg)
{
    const auto v1 = ball_volume(spec, R, method, cfg);
    const auto v2 = ball_volume(spec, 2.0 * R, method, cfg);
    const double ratio = v2.value / v1.value;
    const double rel = std::hypot(v1.abs_error / v1.value, v2.abs_error / v2.value);
    return {ratio, ratio * rel};
}

namespace {

double weighted_sq(const GroupSpec& spec, std::span<const double> p)
{
    double w = 0.0;
    for (int j = 0; j < spec.ell(); ++j) w += spec.a(j) * spec.a(j) * p[j];
    return w;
}

} // namespace

double moment_dnu(const GroupSpec& spec, double nu)
{
    if (!(nu >= 0.0)) throw Error(ErrorCode::DomainError, "nu must be nonnegative");
    const double n2 = 2.0 * spec.n();
    const double e = detail::dirichlet_expect(spec, 1e-14, [&](std::span<const double> p) {
        return std::pow(weighted_sq(spec, p), 0.5 * nu);
    });
    return n2 / (n2 + nu) * e;
}

double ball_average_product(const GroupSpec& spec, std::span<const double> beta, double alpha)
{
    const double n2 = 2.0 * spec.n();
    return detail::dirichlet_expect(spec, 1e-12, [&](std::span<const double> p) {
        const double w = weighted_sq(spec, p);
        return detail::gk15([&](double rho) {
            double prod = 1.0;
            for (double bl : beta) prod *= std::pow(rho * rho * w + bl, alpha);
            return n2 * std::pow(rho, n2 - 1.0) * prod;
        }, 0.0, 1.0, 1e-12, 10);
    });
}

double beta_integral(double n, double m, double v)
{
    if (!(n >= 1.0) || !(m >= 1.0) || !(v >= 0.0) || !(v <= 10.0 * m))
        throw Error(ErrorCode::DomainError, "beta_integral needs n >= 1, m >= 1, 0 <= v <= 10m");
    const double a = n + 0.5 * v, b = 0.5 * m + 1.0;
    return 0.5 * std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

namespace {

// t-radius T with d_G(x, T) = 1; P(T) = sup_s Lambda(s)(... + 4 s T) is convex
// and increasing, so Newton from the upper bracket converges monotonically.
double dg_t_radius(const Spectral& sp, std::span<const double> norms_sq)
{
    if (sum(norms_sq) >= 1.0) return 0.0;
    const double s0 = 0.5 * sp.r_max();
    double t = 1.0 / (4.0 * s0 * sp.lambda_big(s0));
    for (int it = 0; it < 100; ++it) {
        const auto sup = detail::dg_sup(sp, norms_sq, t);
        const double slope = 4.0 * sup.s * sp.lambda_big(sup.s);
        if (!(slope > 0.0)) break;
        const double step = (sup.value - 1.0) / slope;
        t -= step;
        if (std::abs(step) <= 1e-15 * t) break;
    }
    return std::max(t, 0.0);
}

} // namespace

VolumeResult ball_volume_dg(const GroupSpec& spec, double R, const QuadConfig& cfg)
{
    if (!(R > 0.0)) throw Error(ErrorCode::DomainError, "R must be positive");
    const Spectral sp(spec);
    const int m = spec.m();
    const double bm = euclidean_ball_volume(m, 1.0);
    const double unit = detail::radial_integral(spec, 1.0, cfg.rel_tol, [&](std::span<const double> ns) {
        return bm * std::pow(dg_t_radius(sp, ns), m);
    });
    // d_G(sx, s^2 t) = s d_G(x, t)
    const double scale = std::pow(R, spec.dim_x() + 2 * m);
    return {unit * scale, cfg.rel_tol * unit * scale, VolumeMethod::ThetaQuadrature};
}

double dg_closed_form(const GroupSpec& spec, double R)
{
    return euclidean_ball_volume(spec.dim_x() + spec.m(), R) * std::pow(spec.C_H() / 8.0, 0.5 * spec.m()) *
           std::pow(R, spec.m());
}

} // namespace ccheis
