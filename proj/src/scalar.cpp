#include "ccheis/scalar.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "ccheis/roots.hpp"

namespace ccheis {

namespace special {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPiLo = 1.2246467991473532e-16;  // pi - double(pi)
constexpr double kSeriesCut = 0.5;

// z cot z = 1 - sum_k c_k z^{2k}, c_k = 2 zeta(2k) / pi^{2k}.
constexpr std::array<double, 18> kCot = {
    0.333333333333333333333,    0.0222222222222222222222,   0.00211640211640211640212,
    0.000211640211640211640212, 0.0000213777991555769333547, 0.00000216440428080639720851,
    2.19259478518737777997e-7,  2.22146087899796790761e-8,  2.25078465168089928542e-9,
    2.28051512045921828659e-10, 2.31064325990026240965e-11, 2.34117068198248839592e-12,
    2.3721017400233654295e-13,  2.40344153333077061791e-14, 2.43519540291833687311e-15,
    2.46736880451720747059e-16, 2.49996727712208089799e-17, 2.53299643574063483152e-18,
};

// sum_k w(k) c_k z^{2k + shift}, evaluated from the smallest term up.
template <class Weight>
double cot_series(double z, int shift, Weight&& w)
{
    const double z2 = z * z;
    std::array<double, kCot.size()> powers{};
    double p = 1.0;
    for (std::size_t i = 0; i < kCot.size(); ++i) {
        p *= z2;
        powers[i] = p;
    }
    double acc = 0.0;
    for (std::size_t i = kCot.size(); i-- > 0;) {
        const int k = static_cast<int>(i) + 1;
        acc += w(k) * kCot[i] * powers[i];
    }
    // shift is applied as a power of z: z^{2k} * z^{shift}
    return acc * std::pow(z, shift);
}

} // namespace

double sin_reduced(double z)
{
    if (z > 0.5 * kPi) return std::sin((kPi - z) + kPiLo);
    return std::sin(z);
}

double zcot(double z)
{
    if (z < kSeriesCut) return 1.0 - cot_series(z, 0, [](int) { return 1.0; });
    return z * std::cos(z) / sin_reduced(z);
}

double cot_defect(double z)
{
    if (z < kSeriesCut) {
        // sum_k c_k z^{2k-2}
        const double z2 = z * z;
        double acc = 0.0, p = 1.0;
        std::array<double, kCot.size()> powers{};
        for (std::size_t i = 0; i < kCot.size(); ++i) { powers[i] = p; p *= z2; }
        for (std::size_t i = kCot.size(); i-- > 0;) acc += kCot[i] * powers[i];
        return acc;
    }
    return (1.0 - zcot(z)) / (z * z);
}

double cot_defect_prime(double z)
{
    if (z < kSeriesCut) {
        // sum_k (2k-2) c_k z^{2k-3}
        if (z == 0.0) return 0.0;
        return cot_series(z, -3, [](int k) { return 2.0 * k - 2.0; });
    }
    return mu(z) / (z * z) - 2.0 * cot_defect(z) / z;
}

double mu(double z)
{
    if (z < kSeriesCut) {
        if (z == 0.0) return 0.0;
        return cot_series(z, -1, [](int k) { return 2.0 * k; });
    }
    const double s = sin_reduced(z);
    return (z - s * std::cos(z)) / (s * s);
}

double mu_prime(double z)
{
    if (z < kSeriesCut) {
        if (z == 0.0) return 2.0 / 3.0;
        return cot_series(z, -2, [](int k) { return 2.0 * k * (2.0 * k - 1.0); });
    }
    return 2.0 - 2.0 * mu(z) * std::cos(z) / sin_reduced(z);
}

double mu_tilde(double z)
{
    if (z < kSeriesCut) {
        if (z == 0.0) return 1.0 / 6.0;
        return cot_series(z, -2, [](int k) { return 0.5 * k; });
    }
    return mu(z) / (4.0 * z);
}

double mu_tilde_prime(double z)
{
    if (z < kSeriesCut) {
        if (z == 0.0) return 0.0;
        return cot_series(z, -3, [](int k) { return k * (k - 1.0); });
    }
    return (mu_prime(z) * z - mu(z)) / (4.0 * z * z);
}

double mu_tilde_prime_over_z(double z)
{
    if (z < kSeriesCut) {
        if (z == 0.0) return 2.0 * kCot[1];
        return cot_series(z, -4, [](int k) { return k * (k - 1.0); });
    }
    return mu_tilde_prime(z) / z;
}

double sinc(double z)
{
    if (z < kSeriesCut) {
        const double z2 = z * z;
        double term = 1.0, acc = 1.0;
        for (int k = 1; k < 12; ++k) {
            term *= -z2 / ((2.0 * k) * (2.0 * k + 1.0));
            acc += term;
        }
        return acc;
    }
    return sin_reduced(z) / z;
}

double log_sinc(double z)
{
    if (z < kSeriesCut) {
        if (z == 0.0) return 0.0;
        return -cot_series(z, 0, [](int k) { return 0.5 / k; });
    }
    return std::log(sin_reduced(z) / z);
}

double z_over_sin_sq(double z)
{
    if (z < kSeriesCut) return 1.0 + cot_series(z, 0, [](int k) { return 2.0 * k - 1.0; });
    const double q = z / sin_reduced(z);
    return q * q;
}

double z_over_sin_sq_prime(double z) { return z * mu_prime(z); }

} // namespace special

RadialProfile RadialProfile::from_point(const GroupSpec& spec, const Vec& x, double h)
{
    return {block_norms(spec, x), h};
}

namespace {

std::vector<double> squares(const std::vector<double>& v)
{
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
    return out;
}

double find_r_star(const GroupSpec& spec)
{
    const double top = spec.a_top();
    const auto& c = spec.c_frak();
    auto f_df = [&](double r) {
        double g = 0.0, dg = 0.0;
        for (int j = 0; j < spec.ell(); ++j) {
            const double z = spec.a(j) * r;
            g += c[j] * special::zcot(z);
            dg -= c[j] * spec.a(j) * special::mu(z);
        }
        // G is decreasing; hand the solver -G.
        return std::pair{-g, -dg};
    };
    const double lo = 0.5 * std::numbers::pi / top;
    const double hi = std::numbers::pi / top;
    if (f_df(lo).first >= 0.0) return lo;
    const auto res = roots::newton_bisect(f_df, lo, hi, 1e-15);
    return res.x;
}

} // namespace

Spectral::Spectral(const GroupSpec& spec)
    : spec_(spec), r_max_(std::numbers::pi / spec.a_top()), r_star_(find_r_star(spec))
{
}

void Spectral::check_domain(double r) const
{
    if (!(r >= 0.0) || !(r < r_max_))
        throw Error(ErrorCode::DomainError, "radius outside [0, pi/a_top)");
}

void Spectral::check_rstar(double r) const
{
    check_domain(r);
    if (r >= r_star_) throw Error(ErrorCode::BeyondRStar, "radius at or beyond r_*");
}

double Spectral::log_lambda(double r) const
{
    check_domain(r);
    double acc = 0.0;
    for (int j = 0; j < spec_.ell(); ++j) acc += spec_.c_frak()[j] * special::log_sinc(spec_.a(j) * r);
    return acc;
}

double Spectral::lambda_big(double r) const { return std::exp(log_lambda(r)); }

double Spectral::neg_log_deriv_over_r(double r) const
{
    check_domain(r);
    double acc = 0.0;
    for (int j = 0; j < spec_.ell(); ++j) {
        const double a = spec_.a(j);
        acc += spec_.c_frak()[j] * a * a * special::cot_defect(a * r);
    }
    return acc;
}

double Spectral::log_deriv(double r) const { return -r * neg_log_deriv_over_r(r); }

double Spectral::log_deriv_prime(double r) const
{
    check_domain(r);
    double q = 0.0, dq = 0.0;
    for (int j = 0; j < spec_.ell(); ++j) {
        const double a = spec_.a(j);
        const double c = spec_.c_frak()[j];
        q += c * a * a * special::cot_defect(a * r);
        dq += c * a * a * a * special::cot_defect_prime(a * r);
    }
    return -q - r * dq;
}

double Spectral::g_fun(double r) const
{
    check_domain(r);
    double acc = 0.0;
    for (int j = 0; j < spec_.ell(); ++j) acc += spec_.c_frak()[j] * special::zcot(spec_.a(j) * r);
    return acc;
}

double Spectral::g_prime(double r) const
{
    check_domain(r);
    double acc = 0.0;
    for (int j = 0; j < spec_.ell(); ++j)
        acc -= spec_.c_frak()[j] * spec_.a(j) * special::mu(spec_.a(j) * r);
    return acc;
}

double Spectral::u_fun(double r) const
{
    check_rstar(r);
    return neg_log_deriv_over_r(r) / g_fun(r);
}

double Spectral::u_prime(double r) const
{
    check_rstar(r);
    double q = 0.0, dq = 0.0;
    for (int j = 0; j < spec_.ell(); ++j) {
        const double a = spec_.a(j);
        const double c = spec_.c_frak()[j];
        q += c * a * a * special::cot_defect(a * r);
        dq += c * a * a * a * special::cot_defect_prime(a * r);
    }
    const double g = g_fun(r);
    return (dq * g - q * g_prime(r)) / (g * g);
}

double Spectral::t_frak(const RadialProfile& p, double r) const
{
    const double u = u_fun(r);
    double acc = u * p.h * p.h;
    for (int j = 0; j < spec_.ell(); ++j) {
        const double a = spec_.a(j);
        const double z = a * r;
        const double x2 = p.r_norms[j] * p.r_norms[j];
        acc += (u * special::z_over_sin_sq(z) + 4.0 * a * a * special::mu_tilde(z)) * x2;
    }
    return acc;
}

double Spectral::t_frak_prime(const RadialProfile& p, double r) const
{
    const double u = u_fun(r);
    const double du = u_prime(r);
    double acc = du * p.h * p.h;
    for (int j = 0; j < spec_.ell(); ++j) {
        const double a = spec_.a(j);
        const double z = a * r;
        const double x2 = p.r_norms[j] * p.r_norms[j];
        acc += (du * special::z_over_sin_sq(z) + u * a * special::z_over_sin_sq_prime(z) +
                4.0 * a * a * a * special::mu_tilde_prime(z)) *
               x2;
    }
    return acc;
}

double Spectral::a_lambda_quad(const Vec& lam) const
{
    if (lam.size() != spec_.m()) throw Error(ErrorCode::InvalidSpec, "lambda must have m entries");
    double acc = 0.0;
    for (int l = 0; l < spec_.m(); ++l) acc += spec_.b()[l] * lam[l] * lam[l];
    return acc;
}

double Spectral::w_frak(const RadialProfile& p, const Vec& lam) const
{
    const double q = a_lambda_quad(lam);
    const double r = lam.norm();
    return t_frak(p, r) + 4.0 * u_fun(r) * q;
}

double Spectral::v_frak(const RadialProfile& p, const Vec& lam) const
{
    const double q = a_lambda_quad(lam);
    const double r = lam.norm();
    if (r == 0.0) throw Error(ErrorCode::DomainError, "V is defined for lambda != 0");
    return (t_frak_prime(p, r) + 4.0 * u_prime(r) * q) / r;
}

double Spectral::a_profile(std::span<const double> norms_sq, double rho) const
{
    check_domain(rho);
    double acc = 0.0;
    for (int j = 0; j < spec_.ell(); ++j) {
        const double a = spec_.a(j);
        acc += a * a * special::mu_tilde(a * rho) * norms_sq[j];
    }
    return acc;
}

double Spectral::a_profile_prime(std::span<const double> norms_sq, double rho) const
{
    check_domain(rho);
    double acc = 0.0;
    for (int j = 0; j < spec_.ell(); ++j) {
        const double a = spec_.a(j);
        acc += a * a * a * special::mu_tilde_prime(a * rho) * norms_sq[j];
    }
    return acc;
}

double Spectral::a_profile_prime_over_rho(std::span<const double> norms_sq, double rho) const
{
    check_domain(rho);
    double acc = 0.0;
    for (int j = 0; j < spec_.ell(); ++j) {
        const double a = spec_.a(j);
        acc += a * a * a * a * special::mu_tilde_prime_over_z(a * rho) * norms_sq[j];
    }
    return acc;
}

double mu(double r)
{
    if (!(r >= 0.0) || !(r < std::numbers::pi)) throw Error(ErrorCode::DomainError, "mu needs 0 <= r < pi");
    return special::mu(r);
}

double mu_tilde(double r)
{
    if (!(r >= 0.0) || !(r < std::numbers::pi))
        throw Error(ErrorCode::DomainError, "mu_tilde needs 0 <= r < pi");
    return special::mu_tilde(r);
}

double lambda_big(const GroupSpec& spec, double r) { return Spectral(spec).lambda_big(r); }
double log_deriv(const GroupSpec& spec, double r) { return Spectral(spec).log_deriv(r); }
double g_fun(const GroupSpec& spec, double r) { return Spectral(spec).g_fun(r); }
double u_fun(const GroupSpec& spec, double r) { return Spectral(spec).u_fun(r); }
double r_star(const GroupSpec& spec) { return Spectral(spec).r_star(); }

double t_frak(const GroupSpec& spec, const RadialProfile& p, double r)
{
    return Spectral(spec).t_frak(p, r);
}

double w_frak(const GroupSpec& spec, const RadialProfile& p, const Vec& lam)
{
    return Spectral(spec).w_frak(p, lam);
}

double v_frak(const GroupSpec& spec, const RadialProfile& p, const Vec& lam)
{
    return Spectral(spec).v_frak(p, lam);
}

double a_profile(const GroupSpec& spec, const RadialProfile& p, double rho)
{
    return Spectral(spec).a_profile(squares(p.r_norms), rho);
}

} // namespace ccheis
