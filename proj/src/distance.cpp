#include "ccheis/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ccheis/roots.hpp"

namespace ccheis {

std::string_view to_string(DistanceMethod m)
{
    return m == DistanceMethod::GeodesicCoordinates ? "geodesic-coordinates" : "sup-formula";
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double diag_quad(const std::vector<double>& b, const Vec& v)
{
    double acc = 0.0;
    for (std::size_t l = 0; l < b.size(); ++l) acc += b[l] * v[l] * v[l];
    return acc;
}

// phi(g; lam) and its derivatives on block norms. Empty blocks are skipped so
// that the top sphere is admissible when x_(top) = 0.
struct PhiEval {
    const GroupSpec& spec;
    std::span<const double> norms_sq;
    const Vec& t;

    bool admissible(double r) const
    {
        for (int j = 0; j < spec.ell(); ++j) {
            const double z = spec.a(j) * r;
            if (z > kPi || (z == kPi && norms_sq[j] > 0.0)) return false;
        }
        return true;
    }

    double value(const Vec& lam) const
    {
        const double r = lam.norm();
        if (!admissible(r)) return kNegInf;
        double acc = 4.0 * t.dot(lam) - 4.0 * diag_quad(spec.b(), lam);
        for (int j = 0; j < spec.ell(); ++j)
            if (norms_sq[j] > 0.0) acc += special::zcot(spec.a(j) * r) * norms_sq[j];
        return acc;
    }

    // A(r) and A'(r)/r restricted to the nonempty blocks.
    std::pair<double, double> profile(double r) const
    {
        double a0 = 0.0, a1 = 0.0;
        for (int j = 0; j < spec.ell(); ++j) {
            if (norms_sq[j] == 0.0) continue;
            const double a = spec.a(j);
            a0 += a * a * special::mu_tilde(a * r) * norms_sq[j];
            a1 += a * a * a * a * special::mu_tilde_prime_over_z(a * r) * norms_sq[j];
        }
        return {a0, a1};
    }

    // grad = -4 A lam + 4 t - 8 B lam, Hess = -4 A I - 8 B - 4 (A'/r) lam lam^T
    void grad_hess(const Vec& lam, Vec& g, Mat& h) const
    {
        const auto [a0, a1] = profile(lam.norm());
        const int m = spec.m();
        g = 4.0 * t - 4.0 * a0 * lam;
        h = -4.0 * a1 * lam * lam.transpose();
        for (int l = 0; l < m; ++l) {
            g[l] -= 8.0 * spec.b()[l] * lam[l];
            h(l, l) -= 4.0 * a0 + 8.0 * spec.b()[l];
        }
    }
};

struct Candidate {
    double value;
    Vec lam;
};

Vec project(const Vec& v, double radius)
{
    const double nv = v.norm();
    return nv > radius ? Vec(v * (radius / nv)) : v;
}

// Projected Newton ascent with Armijo backtracking; concavity of phi makes
// every start converge to the same maximum, the others only guard against
// stalls on the boundary.
Candidate ascend(const PhiEval& phi, Vec lam, double radius)
{
    lam = project(lam, radius);
    double val = phi.value(lam);
    Vec g;
    Mat h;
    for (int it = 0; it < 200; ++it) {
        phi.grad_hess(lam, g, h);
        if (g.norm() == 0.0) break;

        Vec dir;
        Eigen::LDLT<Mat> ldlt(-h);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (-h).diagonal().minCoeff() > 0.0)
            dir = ldlt.solve(g);
        else
            dir = g;

        bool accepted = false;
        Vec next;
        double next_val = kNegInf;
        for (int pass = 0; pass < 2 && !accepted; ++pass) {
            if (pass == 1) dir = g * (radius / g.norm());
            for (double alpha = 1.0; alpha > 1e-14; alpha *= 0.5) {
                next = project(lam + alpha * dir, radius);
                next_val = phi.value(next);
                if (next_val >= val + 1e-4 * g.dot(next - lam) && next_val >= val) {
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) break;
        const double step = (next - lam).norm();
        lam = next;
        val = next_val;
        if (step <= 1e-15 * (1.0 + radius)) break;
    }
    return {val, lam};
}

// KKT point on the sphere |lam| = radius when x_(top) = 0:
// lam_l = 4 t_l / (4 A(radius) + 8 b_l + kappa) with kappa >= 0.
std::optional<Candidate> boundary_kkt(const PhiEval& phi, double radius)
{
    const auto& spec = phi.spec;
    const double a0 = phi.profile(radius).first;
    auto lam_of = [&](double kappa) {
        Vec lam(spec.m());
        for (int l = 0; l < spec.m(); ++l) {
            const double den = 4.0 * a0 + 8.0 * spec.b()[l] + kappa;
            lam[l] = phi.t[l] == 0.0 ? 0.0 : 4.0 * phi.t[l] / den;
        }
        return lam;
    };
    if (phi.t.norm() == 0.0) return std::nullopt;
    const double k0 = 0.0;
    double denom_min = std::numeric_limits<double>::infinity();
    for (int l = 0; l < spec.m(); ++l)
        if (phi.t[l] != 0.0) denom_min = std::min(denom_min, 4.0 * a0 + 8.0 * spec.b()[l]);
    if (denom_min > 0.0 && lam_of(k0).norm() <= radius) return std::nullopt;

    // |lam(kappa)| decreases in kappa; bracket the crossing of radius.
    double hi = 1.0;
    while (lam_of(hi).norm() > radius) hi *= 2.0;
    auto f = [&](double kappa) { return radius - lam_of(kappa).norm(); };
    const auto res = roots::bisect(f, 0.0, hi, 1e-15 * hi, 2000);
    Vec lam = project(lam_of(res.x), radius);
    lam *= radius / lam.norm();
    return Candidate{phi.value(lam), lam};
}

} // namespace

double phi_point(const GroupSpec& spec, const GroupPoint& g, const Vec& lam)
{
    check_point(spec, g);
    if (lam.size() != spec.m()) throw Error(ErrorCode::InvalidSpec, "lambda must have m entries");
    const auto norms_sq = block_norms_sq(spec, g.x);
    const double r = lam.norm();
    const double edge = kPi / spec.a_top();
    if (r > edge) throw Error(ErrorCode::DomainError, "|lambda| exceeds pi/a_top");
    if (r == edge && norms_sq.back() > 0.0)
        throw Error(ErrorCode::DomainError, "phi is singular on |lambda| = pi/a_top when x_(top) != 0");
    return PhiEval{spec, norms_sq, g.t}.value(lam);
}

namespace detail {

double sc_sum(const Spectral& sp, std::span<const double> norms_sq, double rho)
{
    const auto& spec = sp.spec();
    double acc = 0.0;
    for (int j = 0; j < spec.ell(); ++j)
        if (norms_sq[j] > 0.0) acc += special::z_over_sin_sq(spec.a(j) * rho) * norms_sq[j];
    return acc;
}

double sc_sum_prime(const Spectral& sp, std::span<const double> norms_sq, double rho)
{
    const auto& spec = sp.spec();
    double acc = 0.0;
    for (int j = 0; j < spec.ell(); ++j)
        if (norms_sq[j] > 0.0)
            acc += spec.a(j) * special::z_over_sin_sq_prime(spec.a(j) * rho) * norms_sq[j];
    return acc;
}

double geodesic_d2(const Spectral& sp, std::span<const double> norms_sq, double rho, double b_term)
{
    return sc_sum(sp, norms_sq, rho) + b_term;
}

double inverse_rho(const Spectral& sp, std::span<const double> norms_sq, const Vec& t)
{
    const auto& spec = sp.spec();
    const auto& b = spec.b();
    if (t.norm() == 0.0) return 0.0;
    auto f_df = [&](double rho) {
        const double a0 = sp.a_profile(norms_sq, rho);
        const double a1 = sp.a_profile_prime(norms_sq, rho);
        double r2 = 0.0, s3 = 0.0;
        for (int l = 0; l < spec.m(); ++l) {
            const double e = a0 + 2.0 * b[l];
            r2 += t[l] * t[l] / (e * e);
            s3 += t[l] * t[l] / (e * e * e);
        }
        const double r = std::sqrt(r2);
        return std::pair{rho - r, 1.0 + a1 * s3 / r};
    };
    const double hi = sp.r_max();
    const auto res = roots::newton_bisect(f_df, 0.0, hi, 1e-15 * hi);
    if (!res.converged) throw Error(ErrorCode::NoConvergence, "inverse of F_x did not converge");
    return res.x;
}

DgSup dg_sup(const Spectral& sp, std::span<const double> norms_sq, double tnorm)
{
    const auto& spec = sp.spec();
    const double edge = sp.r_max();
    auto p = [&](double s) {
        double q = 4.0 * s * tnorm, loglam = 0.0;
        for (int j = 0; j < spec.ell(); ++j) {
            const double z = spec.a(j) * s;
            loglam += spec.c_frak()[j] * special::log_sinc(z);
            if (norms_sq[j] > 0.0) q += special::zcot(z) * norms_sq[j];
        }
        return std::exp(loglam) * q;
    };

    constexpr int grid = 64;
    int best = 0;
    double best_val = p(0.0);
    for (int i = 1; i < grid; ++i) {
        const double v = p(edge * i / grid);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double lo = edge * std::max(best - 1, 0) / grid;
    double hi = edge * (best + 1) / grid;
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = p(x1), f2 = p(x2);
    while (hi - lo > 1e-13 * edge) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = p(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = p(x1);
        }
    }
    DgSup out{best_val, edge * best / grid};
    const double s = 0.5 * (lo + hi);
    const double v = p(s);
    if (v > out.value) out = {v, s};
    return out;
}

} // namespace detail

Vec f_x_forward(const GroupSpec& spec, const Vec& x, const Vec& theta)
{
    if (x.size() != spec.dim_x() || theta.size() != spec.m())
        throw Error(ErrorCode::InvalidSpec, "point dimensions do not match the group");
    const auto norms_sq = block_norms_sq(spec, x);
    if (norms_sq.back() == 0.0) throw Error(ErrorCode::DegenerateX, "x_(top) = 0");
    const Spectral sp(spec);
    const double a0 = sp.a_profile(norms_sq, theta.norm());
    Vec t(spec.m());
    for (int l = 0; l < spec.m(); ++l) t[l] = theta[l] * (a0 + 2.0 * spec.b()[l]);
    return t;
}

Vec f_x_inverse(const GroupSpec& spec, const Vec& x, const Vec& t)
{
    if (x.size() != spec.dim_x() || t.size() != spec.m())
        throw Error(ErrorCode::InvalidSpec, "point dimensions do not match the group");
    const auto norms_sq = block_norms_sq(spec, x);
    if (norms_sq.back() == 0.0) throw Error(ErrorCode::DegenerateX, "x_(top) = 0");
    const Spectral sp(spec);
    const double rho = detail::inverse_rho(sp, norms_sq, t);
    const double a0 = sp.a_profile(norms_sq, rho);
    Vec theta(spec.m());
    for (int l = 0; l < spec.m(); ++l) theta[l] = t[l] / (a0 + 2.0 * spec.b()[l]);
    return theta;
}

DistanceResult distance(const GroupSpec& spec, const GroupPoint& g)
{
    check_point(spec, g);
    const auto norms_sq = block_norms_sq(spec, g.x);
    if (norms_sq.back() == 0.0) return {distance_sup(spec, g), std::nullopt, DistanceMethod::SupFormula};

    const Spectral sp(spec);
    const double rho = detail::inverse_rho(sp, norms_sq, g.t);
    const double a0 = sp.a_profile(norms_sq, rho);
    Vec theta(spec.m());
    double b_term = 0.0;
    for (int l = 0; l < spec.m(); ++l) {
        theta[l] = g.t[l] / (a0 + 2.0 * spec.b()[l]);
        b_term += 4.0 * spec.b()[l] * theta[l] * theta[l];
    }
    const double d2 = detail::geodesic_d2(sp, norms_sq, rho, b_term);
    return {std::sqrt(d2), theta, DistanceMethod::GeodesicCoordinates};
}

double distance_sup(const GroupSpec& spec, const GroupPoint& g, const QuadConfig&)
{
    check_point(spec, g);
    const auto norms_sq = block_norms_sq(spec, g.x);
    const PhiEval phi{spec, norms_sq, g.t};
    const double edge = kPi / spec.a_top();
    const bool closed = norms_sq.back() == 0.0;
    const double radius = closed ? edge : edge * (1.0 - 1e-12);

    std::vector<Vec> starts;
    starts.push_back(Vec::Zero(spec.m()));
    const double tn = g.t.norm();
    for (double frac : {0.5, 0.9}) {
        if (tn > 0.0) starts.push_back(g.t * (frac * radius / tn));
        for (int l = 0; l < spec.m(); ++l) {
            Vec e = Vec::Zero(spec.m());
            e[l] = frac * radius;
            starts.push_back(e);
            starts.push_back(-e);
        }
    }

    std::vector<Candidate> found;
    for (const auto& s : starts) found.push_back(ascend(phi, s, radius));
    if (closed)
        if (auto c = boundary_kkt(phi, edge)) found.push_back(*c);

    // Largest value; near-ties go to the candidate farthest out.
    const Candidate* best = &found.front();
    for (const auto& c : found) {
        const double tie = 1e-13 * (1.0 + std::abs(best->value));
        if (c.value > best->value + tie ||
            (std::abs(c.value - best->value) <= tie && c.lam.norm() > best->lam.norm()))
            best = &c;
    }
    return std::sqrt(std::max(best->value, 0.0));
}

double homogeneous_norm(const GroupSpec& spec, const GroupPoint& g)
{
    check_point(spec, g);
    const auto norms_sq = block_norms_sq(spec, g.x);
    const Spectral sp(spec);
    const auto sup = detail::dg_sup(sp, norms_sq, g.t.norm());
    return std::sqrt(std::max(sup.value, 0.0));
}

} // namespace ccheis
