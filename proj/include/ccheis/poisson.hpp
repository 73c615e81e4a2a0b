#pragma once

#include <string_view>

#include "ccheis/config.hpp"
#include "ccheis/group.hpp"
#include "ccheis/scalar.hpp"

namespace ccheis {

struct SaddleResult {
    Vec tau;
    double rho = 0.0;
    double s_value = 0.0;
    /// -Hess S(tau)
    Mat neg_hessian;
    double grad_norm = 0.0;
};

enum class KernelMethod { Saddle, DirectQuadrature, ShiftedQuadrature };
std::string_view to_string(KernelMethod m);

struct KernelValue {
    double value = 0.0;
    KernelMethod method = KernelMethod::Saddle;
    double est_error = 0.0;
    /// Saddle formula evaluated with h > d_B(g)/sqrt(n).
    bool regime_warning = false;
    /// Integrand evaluations used by a quadrature.
    long evals = 0;
    /// |imaginary part| / |real part| of a quadrature result.
    double imag_ratio = 0.0;
};

/// S(lam) = Lambda(|lam|) (phi(g; lam) + h^2)
double s_value(const GroupSpec& spec, const GroupPoint& g, double h, const Vec& lam);

/// C(lam) = (W(lam) I + 8A) lam / 4
Vec c_map(const GroupSpec& spec, const RadialProfile& profile, const Vec& lam);

/// The unique maximizer of S. Requires g in the generic set (no zero coordinate) and h > 0.
SaddleResult saddle_solve(const GroupSpec& spec, const GroupPoint& g, double h);

/// F1 I + 8 Lambda A + F2 tau tau^T at the saddle.
Mat hessian_s(const GroupSpec& spec, const GroupPoint& g, double h, const SaddleResult& saddle);

/// Closed form of S at the saddle: Lambda/G (h^2 + 4 tau^T A tau + sum (a_j rho/sin a_j rho)^2 |x_j|^2).
double s_at_saddle_closed(const GroupSpec& spec, const GroupPoint& g, double h, const SaddleResult& saddle);

KernelValue poisson_saddle(const GroupSpec& spec, const GroupPoint& g, double h);
/// Natural log of the saddle approximation (avoids underflow for large N).
double log_poisson_saddle(const GroupSpec& spec, const GroupPoint& g, double h, const SaddleResult& saddle);

/// 2^m Gamma(N)/pi^N h int_{R^m} Q_h(g; lam) dlam on the real contour.
KernelValue poisson_direct(const GroupSpec& spec, const GroupPoint& g, double h, const QuadConfig& cfg = {});
/// Same integral along lam + i tau_h.
KernelValue poisson_shifted(const GroupSpec& spec, const GroupPoint& g, double h, const SaddleResult& saddle,
                            const QuadConfig& cfg = {});
KernelValue poisson_shifted(const GroupSpec& spec, const GroupPoint& g, double h, const QuadConfig& cfg = {});

/// p_h(g) = h^{-n-m} / ((2 pi)^m (4 pi)^n) int V(lam) exp(-Phi(g; lam) / (4h)) dlam
KernelValue heat_kernel(const GroupSpec& spec, const GroupPoint& g, double h, const QuadConfig& cfg = {});

/// Ratio |B(o,r)|^{-1} / [n (3 a_top^2/(2 C_H))^{m/2} avg_{0<h<r/sqrt n} P_h(g)];
/// zero when d_B(g) >= r. `ball` is |B(o, r)|; pass a negative value to compute it.
double maximal_bound_check(const GroupSpec& spec, const GroupPoint& g, double r, double ball = -1.0,
                           const QuadConfig& cfg = {});

} // namespace ccheis
