#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "ccheis/config.hpp"
#include "ccheis/group.hpp"
#include "ccheis/scalar.hpp"

namespace ccheis {

enum class VolumeMethod { ThetaQuadrature, MonteCarlo };
std::string_view to_string(VolumeMethod m);

struct VolumeResult {
    double value = 0.0;
    double abs_error = 0.0;
    VolumeMethod method = VolumeMethod::ThetaQuadrature;
};

/// det DF_x(theta) from the rank-one structure of DF_x.
double jacobian_det_fx(const GroupSpec& spec, const Vec& x, const Vec& theta);

/// Lebesgue measure of {t : d_B(x, t) < R}.
double slice_volume(const GroupSpec& spec, const Vec& x, double R, const QuadConfig& cfg = {});

VolumeResult ball_volume(const GroupSpec& spec, double R, VolumeMethod method,
                         const QuadConfig& cfg = {});

/// |B_{2n+m}(R)| prod_l (R^2 C_H / 12 + b_l)^{1/2}
double closed_form_estimate(const GroupSpec& spec, double R);

struct DoublingResult {
    double ratio = 0.0;
    double abs_error = 0.0;
};
DoublingResult doubling_ratio(const GroupSpec& spec, double R, VolumeMethod method,
                              const QuadConfig& cfg = {});

/// Average of |Wx|^nu over the unit ball of R^{2n}.
double moment_dnu(const GroupSpec& spec, double nu);

/// Average over the unit ball of prod_l (|Wx|^2 + beta_l)^alpha.
double ball_average_product(const GroupSpec& spec, std::span<const double> beta, double alpha);

/// int_0^1 (1 - r^2)^{m/2} r^{2n+v-1} dr = B(n + v/2, m/2 + 1) / 2.
double beta_integral(double n, double m, double v);

/// Volume of {g : d_G(g) < R}.
VolumeResult ball_volume_dg(const GroupSpec& spec, double R, const QuadConfig& cfg = {});
/// |B_{2n+m}(R)| (C_H/8)^{m/2} R^m
double dg_closed_form(const GroupSpec& spec, double R);

/// Volume of the Euclidean unit ball in R^k times R^k.
double euclidean_ball_volume(int k, double R);

namespace detail {

/// Slice volume from squared block norms; zero when R^2 <= |x|^2.
double slice_volume(const Spectral& sp, std::span<const double> norms_sq, double R, double rel_tol);

/// Boundary radius rho~ in the theta-ball along the unit direction omega.
double boundary_rho(const Spectral& sp, std::span<const double> norms_sq, const Vec& omega, double R,
                    double guess = NAN);

/// E f(p) for p ~ Dirichlet(k_1..k_ell), by stick breaking.
double dirichlet_expect(const GroupSpec& spec, double rel_tol,
                        const std::function<double(std::span<const double>)>& f);

/// Integral of f over {x in R^{2n} : |x| < R}, for f depending on x only through its squared
/// block norms and vanishing like (R^2 - |x|^2)^{p} at the sphere.
double radial_integral(const GroupSpec& spec, double R, double rel_tol,
                       const std::function<double(std::span<const double>)>& f);

} // namespace detail

} // namespace ccheis
