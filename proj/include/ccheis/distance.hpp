#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "ccheis/config.hpp"
#include "ccheis/group.hpp"
#include "ccheis/scalar.hpp"

namespace ccheis {

enum class DistanceMethod { GeodesicCoordinates, SupFormula };
std::string_view to_string(DistanceMethod m);

struct DistanceResult {
    double d = 0.0;
    /// Geodesic parameter, set when the geodesic-coordinate route was used.
    std::optional<Vec> theta;
    DistanceMethod method = DistanceMethod::GeodesicCoordinates;
};

/// phi(g; lam) = sum_j (a_j|lam|) cot(a_j|lam|) |x_(j)|^2 + 4 t.lam - 4 lam^T A lam.
/// On the sphere |lam| = pi/a_top this is only defined when x_(top) = 0.
double phi_point(const GroupSpec& spec, const GroupPoint& g, const Vec& lam);

/// t_l = theta_l (A(|theta|) + 2 b_l) with A the a-profile of x.
Vec f_x_forward(const GroupSpec& spec, const Vec& x, const Vec& theta);
/// Inverse of f_x_forward through the scalar equation for rho = |theta|.
Vec f_x_inverse(const GroupSpec& spec, const Vec& x, const Vec& t);

DistanceResult distance(const GroupSpec& spec, const GroupPoint& g);
/// sqrt of the sup of phi_point over the closed ball |lam| <= pi/a_top.
double distance_sup(const GroupSpec& spec, const GroupPoint& g, const QuadConfig& cfg = {});
/// d_G(g): 1-d sup over s in [0, pi/a_top) of Lambda(s) (sum zcot |x_j|^2 + 4 s |t|).
double homogeneous_norm(const GroupSpec& spec, const GroupPoint& g);

namespace detail {

/// Fast paths on block norms for the volume and kernel code. All of these
/// take the squared block norms of x and, where relevant, |t| or t.

/// rho solving rho^2 = sum_l t_l^2 / (A(rho) + 2 b_l)^2.
double inverse_rho(const Spectral& sp, std::span<const double> norms_sq, const Vec& t);

/// d^2 along the geodesic with parameter |theta| = rho, given 4 sum b_l theta_l^2.
double geodesic_d2(const Spectral& sp, std::span<const double> norms_sq, double rho, double b_term);

/// The x-part sum_j (a_j rho / sin(a_j rho))^2 |x_j|^2.
double sc_sum(const Spectral& sp, std::span<const double> norms_sq, double rho);
/// Its derivative in rho.
double sc_sum_prime(const Spectral& sp, std::span<const double> norms_sq, double rho);

/// sup over s of Lambda(s) (sum zcot(a_j s) |x_j|^2 + 4 s tnorm), with the argmax.
struct DgSup {
    double value;
    double s;
};
DgSup dg_sup(const Spectral& sp, std::span<const double> norms_sq, double tnorm);

} // namespace detail

} // namespace ccheis
