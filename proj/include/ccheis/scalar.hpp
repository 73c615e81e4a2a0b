#pragma once

#include <vector>

#include "ccheis/group.hpp"

namespace ccheis {

// One-variable building blocks on [0, pi). Each switches to its Taylor series
// below z = 0.5, where the closed forms cancel, and evaluates sin/cot through
// pi - z near the right end.
namespace special {

/// z cot z
double zcot(double z);
/// (1 - z cot z) / z^2, equal to 1/3 at 0.
double cot_defect(double z);
double cot_defect_prime(double z);
/// mu(z) = -d/dz (z cot z) = (2z - sin 2z) / (2 sin^2 z).
double mu(double z);
double mu_prime(double z);
/// mu(z) / (4z), equal to 1/6 at 0.
double mu_tilde(double z);
double mu_tilde_prime(double z);
/// mu_tilde'(z) / z, finite at 0.
double mu_tilde_prime_over_z(double z);
/// sin z / z
double sinc(double z);
double log_sinc(double z);
/// (z / sin z)^2 and its derivative z mu'(z).
double z_over_sin_sq(double z);
double z_over_sin_sq_prime(double z);
/// sin z computed through pi - z when z > pi/2.
double sin_reduced(double z);

} // namespace special

/// Block norms of x together with the subordination parameter h.
struct RadialProfile {
    std::vector<double> r_norms;
    double h = 0.0;

    static RadialProfile from_point(const GroupSpec& spec, const Vec& x, double h);
};

/// Radial special functions of a group spectrum (Lambda, its log-derivative,
/// G, u, and the profile functions built from them). Caches r_*.
class Spectral {
public:
    explicit Spectral(const GroupSpec& spec);

    const GroupSpec& spec() const { return spec_; }
    /// Right end of the admissible interval, pi / a_top.
    double r_max() const { return r_max_; }
    double r_star() const { return r_star_; }

    double lambda_big(double r) const;
    double log_lambda(double r) const;
    /// phi(r) = d/dr ln Lambda(r)
    double log_deriv(double r) const;
    double log_deriv_prime(double r) const;
    /// -phi(r) / r, finite at 0.
    double neg_log_deriv_over_r(double r) const;
    double g_fun(double r) const;
    double g_prime(double r) const;
    double u_fun(double r) const;
    double u_prime(double r) const;

    double t_frak(const RadialProfile& p, double r) const;
    double t_frak_prime(const RadialProfile& p, double r) const;
    double w_frak(const RadialProfile& p, const Vec& lam) const;
    double v_frak(const RadialProfile& p, const Vec& lam) const;

    /// sum_j a_j^2 mu_tilde(a_j rho) |x_(j)|^2
    double a_profile(std::span<const double> norms_sq, double rho) const;
    double a_profile_prime(std::span<const double> norms_sq, double rho) const;
    /// a_profile'(rho) / rho, finite at 0.
    double a_profile_prime_over_rho(std::span<const double> norms_sq, double rho) const;

private:
    void check_domain(double r) const;
    void check_rstar(double r) const;
    double a_lambda_quad(const Vec& lam) const;

    GroupSpec spec_;
    double r_max_;
    double r_star_;
};

// Free-function forms of the operations above.
double mu(double r);
double mu_tilde(double r);
double lambda_big(const GroupSpec& spec, double r);
double log_deriv(const GroupSpec& spec, double r);
double g_fun(const GroupSpec& spec, double r);
double u_fun(const GroupSpec& spec, double r);
double r_star(const GroupSpec& spec);
double t_frak(const GroupSpec& spec, const RadialProfile& p, double r);
double w_frak(const GroupSpec& spec, const RadialProfile& p, const Vec& lam);
double v_frak(const GroupSpec& spec, const RadialProfile& p, const Vec& lam);
double a_profile(const GroupSpec& spec, const RadialProfile& p, double rho);

} // namespace ccheis
