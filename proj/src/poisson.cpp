#include "ccheis/poisson.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "ccheis/detail/quad.hpp"
#include "ccheis/distance.hpp"
#include "ccheis/roots.hpp"
#include "ccheis/volume.hpp"

namespace ccheis {

std::string_view to_string(KernelMethod m)
{
    switch (m) {
    case KernelMethod::Saddle: return "saddle";
    case KernelMethod::DirectQuadrature: return "direct-quadrature";
    case KernelMethod::ShiftedQuadrature: return "shifted-quadrature";
    }
    return "unknown";
}

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;

double diag_quad(const std::vector<double>& b, const Vec& v)
{
    double acc = 0.0;
    for (std::size_t l = 0; l < b.size(); ++l) acc += b[l] * v[l] * v[l];
    return acc;
}

void check_generic(const GroupPoint& g, double h)
{
    if (!(h > 0.0)) throw Error(ErrorCode::DomainError, "h must be positive");
    for (int i = 0; i < g.x.size(); ++i)
        if (g.x[i] == 0.0) throw Error(ErrorCode::OutsideDomainG, "g has a zero x coordinate");
    for (int l = 0; l < g.t.size(); ++l)
        if (g.t[l] == 0.0) throw Error(ErrorCode::OutsideDomainG, "g has a zero t coordinate");
}

// phi(g; lam) on block norms (lam strictly inside the ball).
double phi_inside(const Spectral& sp, std::span<const double> norms_sq, const Vec& t, const Vec& lam)
{
    const auto& spec = sp.spec();
    const double r = lam.norm();
    double acc = 4.0 * t.dot(lam) - 4.0 * diag_quad(spec.b(), lam);
    for (int j = 0; j < spec.ell(); ++j) acc += special::zcot(spec.a(j) * r) * norms_sq[j];
    return acc;
}

// z coth z and log(z / sinh z), even entire-in-the-strip functions.
// exp(z) - 1 without cancellation near z = 0.
cplx expm1(cplx z)
{
    const double x = z.real(), y = z.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// {log(z / sinh z), z coth z}; both are even in z.
std::pair<cplx, cplx> sinh_terms(cplx z)
{
    if (std::abs(z) < 1e-2) {
        const cplx z2 = z * z;
        return {z2 * (-1.0 / 6.0 + z2 * (1.0 / 180.0 - z2 * (1.0 / 2835.0))),
                1.0 + z2 * (1.0 / 3.0 + z2 * (-1.0 / 45.0 + z2 * (2.0 / 945.0)))};
    }
    if (z.real() < 0.0) z = -z;
    // With e = exp(-2z): sinh z = e^z (1 - e) / 2 and coth z = (1 + e) / (1 - e).
    const cplx one_minus_e = -expm1(-2.0 * z);
    return {std::log(2.0 * z / one_minus_e) - z, z * (2.0 - one_minus_e) / one_minus_e};
}

// Complex continuation of V(lam) and Phi(g; lam) to zeta in C^m.
struct KernelCore {
    const GroupSpec& spec;
    std::vector<double> norms_sq;
    Vec t;

    // Returns {log V(zeta), Phi(zeta)}.
    std::pair<cplx, cplx> eval(const CVec& zeta) const
    {
        const cplx w = std::sqrt((zeta.array() * zeta.array()).sum());
        cplx log_v = 0.0, phi = 0.0;
        for (int j = 0; j < spec.ell(); ++j) {
            const auto [log_ratio, zc] = sinh_terms(spec.a(j) * w);
            log_v += double(spec.k(j)) * log_ratio;
            phi += norms_sq[j] * zc;
        }
        for (int l = 0; l < spec.m(); ++l) {
            phi += cplx(0.0, -4.0) * t[l] * zeta[l];
            phi += 4.0 * spec.b()[l] * zeta[l] * zeta[l];
        }
        return {log_v, phi};
    }
};

struct RealIntegral {
    double value = 0.0;
    double imag = 0.0;
    double error = 0.0;
    /// Integral of |f|; error / l1 bounds the attainable relative accuracy.
    double l1 = 0.0;
    long evals = 0;
};

// Integral of a complex integrand together with the integral of its modulus.
struct Acc {
    cplx v;
    double l1 = 0.0;
    Acc& operator+=(const Acc& o) { v += o.v; l1 += o.l1; return *this; }
    friend Acc operator+(Acc a, const Acc& b) { return a += b; }
    friend Acc operator-(Acc a, const Acc& b) { a.v -= b.v; a.l1 -= b.l1; return a; }
    friend Acc operator*(double s, Acc a) { a.v *= s; a.l1 *= s; return a; }
    friend Acc operator*(Acc a, double s) { return s * a; }
};
double magnitude(const Acc& a) { return std::abs(a.v); }

// |det L| int_{R^m} f(L y + i c) dy for f with f(-conj zeta) = conj f(zeta):
// pairs +-y are summed so the imaginary part is a symmetry residual.
// Polar in y: compactified radial Gauss-Kronrod, trapezoid (m = 2) or nested
// Gauss-Kronrod (m = 3) in angle.
template <class F>
RealIntegral integrate_sym(int m, const Mat& L, const Vec& c, double r0, double rel_tol, long max_evals, F&& f)
{
    RealIntegral out;
    const double det = std::abs(L.determinant());
    auto pair_at = [&](const Vec& y) {
        if (++out.evals > max_evals)
            throw Error(ErrorCode::BudgetExceeded, "kernel quadrature exceeded max_evals");
        CVec zp(m), zm(m);
        const Vec ly = L * y;
        for (int l = 0; l < m; ++l) {
            zp[l] = cplx(ly[l], c[l]);
            zm[l] = cplx(-ly[l], c[l]);
        }
        const cplx fp = f(zp), fm = f(zm);
        return Acc{fp + fm, std::abs(fp) + std::abs(fm)};
    };

    // Radial integral on r = r0 u / (1 - u), u in (0, 1).
    auto ray = [&](const Vec& dir) {
        return detail::gk15([&](double u) {
            const double r = r0 * u / (1.0 - u);
            if (!std::isfinite(r)) return Acc{};
            const double jac = r0 / ((1.0 - u) * (1.0 - u));
            const Acc v = pair_at(r * dir);
            return v.l1 == 0.0 ? Acc{} : std::pow(r, m - 1) * jac * v;
        }, 0.0, 1.0, 1e-2 * rel_tol, 20);
    };

    Acc total;
    if (m == 1) {
        total = ray(Vec::Ones(1));
        out.error = rel_tol * total.l1;
    } else if (m == 2) {
        // The pair is pi-periodic in angle, so the trapezoid rule on a half turn
        // converges geometrically. Convergence is judged against the integral
        // of |f| since the value itself may cancel to far below it.
        auto ang = [&](double w) {
            Vec d(2);
            d << std::cos(w), std::sin(w);
            return ray(d);
        };
        int n = 8;
        Acc acc;
        for (int i = 0; i < n; ++i) acc += ang(i * kPi / n);
        Acc prev = (kPi / n) * acc;
        for (;; n *= 2) {
            if (n >= (1 << 14)) throw Error(ErrorCode::QuadratureFailure, "angular kernel quadrature did not converge");
            const double hstep = kPi / (2 * n);
            for (int i = 1; i < 2 * n; i += 2) acc += ang(i * hstep);
            const Acc next = hstep * acc;
            const double diff = std::abs(next.v.real() - prev.v.real());
            prev = next;
            if (diff <= rel_tol * std::max(std::abs(next.v.real()), 0.1 * next.l1)) {
                total = next;
                out.error = std::max(diff, rel_tol * next.l1);
                break;
            }
        }
    } else if (m == 3) {
        // Upper hemisphere; the pair covers the lower one.
        total = detail::gk15([&](double pol) {
            return std::sin(pol) * detail::gk15([&](double az) {
                Vec d(3);
                d << std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol);
                return ray(d);
            }, 0.0, 2.0 * kPi, rel_tol, 8);
        }, 0.0, 0.5 * kPi, rel_tol, 8);
        out.error = rel_tol * total.l1;
    } else {
        throw Error(ErrorCode::DomainError, "kernel quadrature supports m <= 3");
    }
    out.l1 = det * total.l1;
    out.value = det * total.v.real();
    out.imag = det * total.v.imag();
    out.error *= det;
    return out;
}

double log_prefactor(const GroupSpec& spec, double h)
{
    const double n_big = spec.N();
    return spec.m() * std::log(2.0) + std::lgamma(n_big) - n_big * std::log(kPi) + std::log(h);
}

// Poisson integral of Q_h on lam + i c with an optional whitening L.
KernelValue poisson_integral(const GroupSpec& spec, const GroupPoint& g, double h, const Mat& L, const Vec& c,
                             double r0, double log_scale, KernelMethod method, const QuadConfig& cfg)
{
    const KernelCore core{spec, block_norms_sq(spec, g.x), g.t};
    const double n_big = spec.N();
    const double h2 = h * h;
    auto f = [&](const CVec& zeta) {
        const auto [log_v, phi] = core.eval(zeta);
        return std::exp(log_v - n_big * std::log(phi + h2) - log_scale);
    };
    const auto res = integrate_sym(spec.m(), L, c, r0, cfg.rel_tol, cfg.max_evals, f);
    if (std::abs(res.imag) > 1e-8 * std::abs(res.value))
        throw Error(ErrorCode::QuadratureFailure, "imaginary part of the kernel integral does not vanish");
    const double scale = std::exp(log_prefactor(spec, h) + log_scale);
    KernelValue kv;
    kv.value = scale * res.value;
    kv.est_error = scale * res.error;
    kv.method = method;
    kv.evals = res.evals;
    kv.imag_ratio = res.value != 0.0 ? std::abs(res.imag / res.value) : 0.0;
    return kv;
}

} // namespace

double s_value(const GroupSpec& spec, const GroupPoint& g, double h, const Vec& lam)
{
    const double r = lam.norm();
    if (!(r < kPi / spec.a_top())) throw Error(ErrorCode::DomainError, "|lambda| must be below pi/a_top");
    const Spectral sp(spec);
    return sp.lambda_big(r) * (phi_point(spec, g, lam) + h * h);
}

Vec c_map(const GroupSpec& spec, const RadialProfile& profile, const Vec& lam)
{
    const Spectral sp(spec);
    const double w = sp.w_frak(profile, lam);
    Vec out(spec.m());
    for (int l = 0; l < spec.m(); ++l) out[l] = 0.25 * (w + 8.0 * spec.b()[l]) * lam[l];
    return out;
}

SaddleResult saddle_solve(const GroupSpec& spec, const GroupPoint& g, double h)
{
    check_point(spec, g);
    check_generic(g, h);
    const Spectral sp(spec);
    const auto profile = RadialProfile::from_point(spec, g.x, h);
    const auto norms_sq = block_norms_sq(spec, g.x);
    const auto& b = spec.b();
    const int m = spec.m();
    const Vec& t = g.t;
    bool any_b = false;
    for (double bl : b) any_b = any_b || bl > 0.0;

    // For fixed (rho, s = tau^T A tau): tau_l = 4 t_l / (T(rho) + 4 u(rho) s + 8 b_l).
    struct Inner {
        double s, tf, u;
        Vec tau, den;
    };
    auto tau_of = [&](double tf, double u, double s, Inner& in) {
        in.tau.resize(m);
        in.den.resize(m);
        for (int l = 0; l < m; ++l) {
            in.den[l] = tf + 4.0 * u * s + 8.0 * b[l];
            in.tau[l] = 4.0 * t[l] / in.den[l];
        }
    };
    auto inner = [&](double rho) {
        Inner in{0.0, sp.t_frak(profile, rho), sp.u_fun(rho), {}, {}};
        tau_of(in.tf, in.u, 0.0, in);
        if (!any_b) return in;
        const double s_hi = diag_quad(b, in.tau);
        if (s_hi == 0.0) return in;
        // s - sum b_l tau_l(s)^2 is increasing in s.
        Inner tmp = in;
        auto f_df = [&](double s) {
            tau_of(in.tf, in.u, s, tmp);
            double beta = 0.0;
            for (int l = 0; l < m; ++l) beta += b[l] * tmp.tau[l] * tmp.tau[l] / tmp.den[l];
            return std::pair{s - diag_quad(b, tmp.tau), 1.0 + 8.0 * in.u * beta};
        };
        const auto res = roots::newton_bisect(f_df, 0.0, s_hi * (1.0 + 1e-12), 1e-16 * s_hi);
        if (!res.converged) throw Error(ErrorCode::NoConvergence, "inner saddle equation did not converge");
        in.s = res.x;
        tau_of(in.tf, in.u, in.s, in);
        return in;
    };

    const double rstar = sp.r_star();
    auto f_df = [&](double rho) {
        const Inner in = inner(rho);
        const double tp = sp.t_frak_prime(profile, rho);
        const double up = sp.u_prime(rho);
        const double c = tp + 4.0 * up * in.s;
        double beta = 0.0;
        for (int l = 0; l < m; ++l) beta += b[l] * in.tau[l] * in.tau[l] / in.den[l];
        const double sp_ = -2.0 * c * beta / (1.0 + 8.0 * in.u * beta);
        double acc = 0.0;
        for (int l = 0; l < m; ++l) acc += in.tau[l] * in.tau[l] * (c + 4.0 * in.u * sp_) / in.den[l];
        return std::pair{rho * rho - in.tau.squaredNorm(), 2.0 * rho + 2.0 * acc};
    };
    const auto res = roots::newton_bisect(f_df, 0.0, rstar, 1e-15 * rstar);
    if (!res.converged) throw Error(ErrorCode::NoConvergence, "saddle radius did not converge");

    SaddleResult out;
    out.tau = inner(res.x).tau;

    const double h2 = h * h;
    auto gradient = [&](const Vec& tau) {
        const double rho = tau.norm();
        const double phi = phi_inside(sp, norms_sq, t, tau);
        const double q = sp.neg_log_deriv_over_r(rho);
        const double a0 = sp.a_profile(norms_sq, rho);
        Vec gr = -q * (phi + h2) * tau - 4.0 * a0 * tau + 4.0 * t;
        for (int l = 0; l < m; ++l) gr[l] -= 8.0 * b[l] * tau[l];
        return Vec(sp.lambda_big(rho) * gr);
    };

    out.rho = out.tau.norm();
    out.s_value = sp.lambda_big(out.rho) * (phi_inside(sp, norms_sq, t, out.tau) + h2);
    out.neg_hessian = hessian_s(spec, g, h, out);
    Vec gr = gradient(out.tau);
    // One Newton polish in full dimension; kept only if it lowers the residual.
    const Vec cand = out.tau + out.neg_hessian.ldlt().solve(gr);
    if (cand.norm() < rstar) {
        const Vec gc = gradient(cand);
        if (gc.norm() < gr.norm()) {
            out.tau = cand;
            out.rho = cand.norm();
            out.s_value = sp.lambda_big(out.rho) * (phi_inside(sp, norms_sq, t, out.tau) + h2);
            out.neg_hessian = hessian_s(spec, g, h, out);
            gr = gc;
        }
    }
    out.grad_norm = gr.norm();
    return out;
}

Mat hessian_s(const GroupSpec& spec, const GroupPoint& g, double h, const SaddleResult& saddle)
{
    const Spectral sp(spec);
    const auto profile = RadialProfile::from_point(spec, g.x, h);
    const Vec& tau = saddle.tau;
    const double rho = tau.norm();
    const double lam = sp.lambda_big(rho);
    const double w = sp.w_frak(profile, tau);
    const double v = sp.v_frak(profile, tau);
    const double f1 = lam * w;
    // Lambda'/rho = -Lambda q
    const double f2 = lam * (sp.g_fun(rho) * v - sp.neg_log_deriv_over_r(rho) * w);
    Mat out = f2 * tau * tau.transpose();
    for (int l = 0; l < spec.m(); ++l) out(l, l) += f1 + 8.0 * lam * spec.b()[l];
    return out;
}

double s_at_saddle_closed(const GroupSpec& spec, const GroupPoint& g, double h, const SaddleResult& saddle)
{
    const Spectral sp(spec);
    const auto norms_sq = block_norms_sq(spec, g.x);
    const double rho = saddle.rho;
    const double inner = h * h + 4.0 * diag_quad(spec.b(), saddle.tau) + detail::sc_sum(sp, norms_sq, rho);
    return sp.lambda_big(rho) / sp.g_fun(rho) * inner;
}

double log_poisson_saddle(const GroupSpec& spec, const GroupPoint& g, double h, const SaddleResult& saddle)
{
    (void)g;
    const double n_big = spec.N();
    const double m = spec.m();
    const double s = saddle.s_value;
    const Eigen::LLT<Mat> llt(saddle.neg_hessian);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::NoConvergence, "-Hess S is not positive definite");
    double log_det = 0.0;
    for (int l = 0; l < spec.m(); ++l) log_det += 2.0 * std::log(llt.matrixL()(l, l));
    return std::lgamma(n_big) - n_big * std::log(kPi) + std::log(h) + 0.5 * m * std::log(8.0 * kPi * s / n_big) +
           (m + 0.5) * special::log_sinc(spec.a_top() * saddle.rho) - n_big * std::log(s) - 0.5 * log_det;
}

KernelValue poisson_saddle(const GroupSpec& spec, const GroupPoint& g, double h)
{
    const auto saddle = saddle_solve(spec, g, h);
    KernelValue kv;
    kv.value = std::exp(log_poisson_saddle(spec, g, h, saddle));
    kv.method = KernelMethod::Saddle;
    kv.regime_warning = h > distance(spec, g).d / std::sqrt(double(spec.n()));
    return kv;
}

KernelValue poisson_direct(const GroupSpec& spec, const GroupPoint& g, double h, const QuadConfig& cfg)
{
    check_point(spec, g);
    if (!(h > 0.0)) throw Error(ErrorCode::DomainError, "h must be positive");
    const int m = spec.m();
    const auto norms_sq = block_norms_sq(spec, g.x);
    double x2 = 0.0;
    for (double v : norms_sq) x2 += v;
    // Scale of the real-contour integrand: the decay of V, and the width of
    // (Phi + h^2)^{-N} against the linear term 4 t.lam.
    double decay = 0.0;
    for (int j = 0; j < spec.ell(); ++j) decay += spec.a(j) * spec.k(j);
    const double width = (x2 + h * h) / (4.0 * g.t.norm() * std::sqrt(spec.N()) + 1e-300);
    const double r0 = std::min(1.0 / decay, width);
    const double log_scale = -spec.N() * std::log(x2 + h * h);
    return poisson_integral(spec, g, h, Mat::Identity(m, m), Vec::Zero(m), r0, log_scale,
                            KernelMethod::DirectQuadrature, cfg);
}

KernelValue poisson_shifted(const GroupSpec& spec, const GroupPoint& g, double h, const SaddleResult& saddle,
                            const QuadConfig& cfg)
{
    const int m = spec.m();
    // Whitening by the Gaussian approximation N (-Hess S) / S at the peak.
    const Mat prec = saddle.neg_hessian * (spec.N() / saddle.s_value);
    const Eigen::SelfAdjointEigenSolver<Mat> es(prec);
    const Mat L = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal();
    const Spectral sp(spec);
    const double log_peak = -spec.N() * std::log(saddle.s_value / sp.lambda_big(saddle.rho)) +
                            [&] {
                                double acc = 0.0;
                                for (int j = 0; j < spec.ell(); ++j)
                                    acc -= spec.k(j) * special::log_sinc(spec.a(j) * saddle.rho);
                                return acc;
                            }();
    (void)m;
    return poisson_integral(spec, g, h, L, saddle.tau, 1.0, log_peak, KernelMethod::ShiftedQuadrature, cfg);
}

KernelValue poisson_shifted(const GroupSpec& spec, const GroupPoint& g, double h, const QuadConfig& cfg)
{
    return poisson_shifted(spec, g, h, saddle_solve(spec, g, h), cfg);
}

KernelValue heat_kernel(const GroupSpec& spec, const GroupPoint& g, double h, const QuadConfig& cfg)
{
    check_point(spec, g);
    if (!(h > 0.0)) throw Error(ErrorCode::DomainError, "h must be positive");
    const int m = spec.m();
    const KernelCore core{spec, block_norms_sq(spec, g.x), g.t};
    auto f = [&](const CVec& zeta) {
        const auto [log_v, phi] = core.eval(zeta);
        return std::exp(log_v - phi / (4.0 * h));
    };
    double decay = 0.0;
    for (int j = 0; j < spec.ell(); ++j) decay += spec.a(j) * spec.k(j);
    const auto res = integrate_sym(m, Mat::Identity(m, m), Vec::Zero(m), 1.0 / decay, cfg.rel_tol, cfg.max_evals, f);
    if (std::abs(res.imag) > 1e-8 * std::abs(res.value))
        throw Error(ErrorCode::QuadratureFailure, "imaginary part of the heat kernel integral does not vanish");
    const double n = spec.n();
    const double pref = std::pow(h, -n - m) / (std::pow(2.0 * kPi, m) * std::pow(4.0 * kPi, n));
    KernelValue kv;
    kv.value = pref * res.value;
    kv.est_error = pref * res.error;
    kv.method = KernelMethod::DirectQuadrature;
    kv.evals = res.evals;
    kv.imag_ratio = res.value != 0.0 ? std::abs(res.imag / res.value) : 0.0;
    return kv;
}

double maximal_bound_check(const GroupSpec& spec, const GroupPoint& g, double r, double ball, const QuadConfig& cfg)
{
    if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "r must be positive");
    if (distance(spec, g).d >= r) return 0.0;
    if (ball < 0.0) ball = ball_volume(spec, r, VolumeMethod::ThetaQuadrature, cfg).value;
    const double n = spec.n();
    const double top = r / std::sqrt(n);
    const double integral = detail::gk15([&](double h) { return poisson_shifted(spec, g, h, cfg).value; }, 0.0,
                                         top, std::max(cfg.rel_tol, 1e-6), 8);
    const double avg = integral / top;
    const double a2 = spec.a_top() * spec.a_top();
    const double factor = n * std::pow(3.0 * a2 / (2.0 * spec.C_H()), 0.5 * spec.m());
    return (1.0 / ball) / (factor * avg);
}

} // namespace ccheis
