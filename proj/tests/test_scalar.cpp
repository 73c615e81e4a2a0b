#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ccheis/scalar.hpp"
#include "oracle.hpp"

using namespace ccheis;
using std::numbers::pi;

namespace {

// Frozen from a 30-digit evaluation of the closed forms.
constexpr double kMu1 = 0.770190311503061211602915017947;
constexpr double kMuTilde1 = 0.192547577875765302900728754487;
constexpr double kLambdaTwoBlock1 = 0.87345910903545351340974499024;
constexpr double kRStarTwoBlock = 1.73824440601458594978459629768;

GroupSpec two_block() { return GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.0}); }
GroupSpec h21() { return GroupSpec::create({{1.0, 1}}, 1, {0.0}); }

} // namespace

TEST(Mu, Values)
{
    EXPECT_EQ(mu(0.0), 0.0);
    EXPECT_NEAR(mu(pi / 2), pi / 2, 1e-15);
    EXPECT_NEAR(mu(1.0), kMu1, 1e-15);
    EXPECT_NEAR(mu_tilde(0.0), 1.0 / 6, 1e-16);
    EXPECT_NEAR(mu_tilde(pi / 2), 0.25, 1e-16);
    EXPECT_NEAR(mu_tilde(1.0), kMuTilde1, 1e-16);
}

TEST(Mu, DomainErrors)
{
    EXPECT_THROW(mu(pi), Error);
    EXPECT_THROW(mu(-0.1), Error);
    EXPECT_THROW(mu_tilde(4.0), Error);
}

TEST(Mu, AgreesWithPartialFractionSeries)
{
    for (double r = 0.01; r <= 3.1; r += 0.0137) {
        const double ref = static_cast<double>(oracle::mu(r));
        EXPECT_NEAR(mu(r), ref, 1e-12 * std::abs(ref)) << r;
    }
}

TEST(Mu, StrictlyIncreasing)
{
    double prev = -1;
    for (int i = 0; i < 10000; ++i) {
        const double v = mu(i * (pi - 1e-3) / 10000);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Mu, SmallArgumentSeriesIsSmooth)
{
    // Across the closed-form/series switch the relative change must match the slope 2/3.
    for (double r : {1e-8, 1e-4, 0.009, 0.0101, 0.49, 0.51}) {
        EXPECT_NEAR(mu(r) / r, static_cast<double>(oracle::mu(r)) / r, 1e-13) << r;
    }
}

TEST(Lambda, Values)
{
    const Spectral sp(h21());
    EXPECT_EQ(sp.lambda_big(0.0), 1.0);
    EXPECT_NEAR(sp.lambda_big(pi / 2), 2 / pi, 1e-15);
    const auto s = two_block();
    EXPECT_NEAR(lambda_big(s, 1.0), kLambdaTwoBlock1, 1e-15);
    EXPECT_NEAR(lambda_big(s, 1.0), static_cast<double>(oracle::lambda_big(s, 1.0L)), 1e-15);
}

TEST(Lambda, DecreasingAndBounded)
{
    const Spectral sp(GroupSpec::create({{0.25, 2}, {0.5, 2}, {1.0, 4}}, 2, {0, 0}));
    double prev = 1.0 + 1e-15;
    for (int i = 0; i < 1000; ++i) {
        const double v = sp.lambda_big(i * (pi - 1e-6) / 1000);
        EXPECT_LT(v, prev);
        EXPECT_GT(v, 0.0);
        prev = v;
    }
}

TEST(Lambda, ExpOfIntegratedLogDerivative)
{
    const Spectral sp(GroupSpec::create({{0.5, 2}, {1.0, 1}}, 1, {0.0}));
    for (double r : {0.3, 1.0, 2.0, 3.0}) {
        const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double s) { return sp.log_deriv(s); }, 0.0, r, 10, 1e-14);
        EXPECT_NEAR(sp.lambda_big(r) * std::exp(-integral), 1.0, 1e-10) << r;
    }
}

TEST(LogDeriv, Values)
{
    const Spectral sp(h21());
    EXPECT_EQ(sp.log_deriv(0.0), 0.0);
    EXPECT_NEAR(sp.log_deriv(pi / 2), -2 / pi, 1e-15);
    EXPECT_NEAR(sp.log_deriv(1e-6) / 1e-6, -1.0 / 3, 1e-10);
    EXPECT_NEAR(sp.neg_log_deriv_over_r(0.0), 1.0 / 3, 1e-15);
}

TEST(LogDeriv, AgreesWithCotangentForm)
{
    const auto s = two_block();
    const Spectral sp(s);
    for (double r : {0.05, 0.5, 1.5, 2.5, 3.0}) {
        double direct = 0;
        for (int j = 0; j < s.ell(); ++j)
            direct += s.c_frak()[j] * (s.a(j) / std::tan(s.a(j) * r) - 1 / r);
        EXPECT_NEAR(sp.log_deriv(r), direct, 1e-12 * std::max(1.0, std::abs(direct))) << r;
    }
}

TEST(LogDeriv, DerivativeMatchesFiniteDifference)
{
    const Spectral sp(two_block());
    for (double r : {0.2, 1.0, 2.0, 2.8}) {
        const double h = 1e-5;
        const double fd = (sp.log_deriv(r + h) - sp.log_deriv(r - h)) / (2 * h);
        EXPECT_NEAR(sp.log_deriv_prime(r), fd, 1e-8 * std::max(1.0, std::abs(fd)));
    }
}

TEST(GFun, ConsistencyAndExamples)
{
    const Spectral h(h21());
    EXPECT_EQ(h.g_fun(0.0), 1.0);
    for (double r : {0.3, 1.0, 1.5}) EXPECT_NEAR(h.g_fun(r), r / std::tan(r), 1e-14);
    EXPECT_NEAR(h.u_fun(0.0), 1.0 / 3, 1e-15);

    const Spectral sp(two_block());
    for (double r = 0.0; r < 3.1; r += 0.05) EXPECT_NEAR(sp.g_fun(r), 1 + r * sp.log_deriv(r), 1e-12) << r;
}

TEST(GFun, UIncreasingBeforeRootAndErrorsBeyond)
{
    const Spectral sp(two_block());
    double prev = 0;
    for (int i = 0; i < 1000; ++i) {
        const double v = sp.u_fun(i * sp.r_star() / 1000);
        EXPECT_GT(v, prev);
        prev = v;
    }
    try {
        sp.u_fun(sp.r_star() + 1e-3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BeyondRStar);
    }
}

TEST(GFun, UDerivativeMatchesFiniteDifference)
{
    const Spectral sp(two_block());
    for (double r : {0.1, 0.8, 1.5}) {
        const double h = 1e-5;
        EXPECT_NEAR(sp.u_prime(r), (sp.u_fun(r + h) - sp.u_fun(r - h)) / (2 * h), 1e-7);
        EXPECT_NEAR(sp.g_prime(r), (sp.g_fun(r + h) - sp.g_fun(r - h)) / (2 * h), 1e-8);
    }
}

TEST(RStar, Values)
{
    EXPECT_NEAR(r_star(h21()), pi / 2, 1e-13);
    const double rs = r_star(two_block());
    EXPECT_NEAR(rs, kRStarTwoBlock, 1e-13);
    EXPECT_LT(std::abs(g_fun(two_block(), rs)), 1e-12);
}

TEST(RStar, ApproachesPiWhenTopWeightSmall)
{
    double prev = pi / 2;
    for (int k : {2, 10, 50}) {
        const double rs = r_star(GroupSpec::create({{0.5, k}, {1.0, 1}}, 1, {0.0}));
        EXPECT_GT(rs, prev);
        EXPECT_LT(rs, pi);
        prev = rs;
    }
    EXPECT_GT(prev, 2.7);
}

TEST(TFrak, ValuesAndMonotonicity)
{
    const auto s = two_block();
    const Spectral sp(s);
    const RadialProfile only_h{{0.0, 0.0}, 1.0};
    EXPECT_NEAR(sp.t_frak(only_h, 0.0), sp.u_fun(0.0), 1e-15);

    const RadialProfile p{{0.7, 1.3}, 0.4};
    double prev = 0;
    for (int i = 0; i < 500; ++i) {
        const double r = i * sp.r_star() * 0.999 / 500;
        const double v = sp.t_frak(p, r);
        EXPECT_GT(v, prev);
        prev = v;
        if (i > 0) {
            const double h = 1e-6 * std::max(r, 1e-2);
            const double fd = (sp.t_frak(p, r + h) - sp.t_frak(p, r - h)) / (2 * h);
            EXPECT_NEAR(sp.t_frak_prime(p, r), fd, 1e-6 * std::max(1.0, std::abs(fd))) << r;
        }
    }
}

TEST(WFrak, ReducesToTFrakWithoutWeights)
{
    const Spectral sp(GroupSpec::create({{0.5, 2}, {1.0, 2}}, 2, {0.0, 0.0}));
    const RadialProfile p{{0.5, 0.9}, 0.3};
    EXPECT_NEAR(sp.w_frak(p, Vec::Zero(2)), sp.t_frak(p, 0.0), 1e-15);
    const Vec lam = (Vec(2) << 0.6, -0.3).finished();
    EXPECT_NEAR(sp.w_frak(p, lam), sp.t_frak(p, lam.norm()), 1e-14);
}

TEST(VFrak, RadialDerivativeOfWFrak)
{
    const auto s = GroupSpec::create({{0.5, 2}, {1.0, 2}}, 2, {0.3, 2.0});
    const Spectral sp(s);
    const RadialProfile p{{0.5, 0.9}, 0.3};
    const Vec dir = (Vec(2) << 0.6, -0.8).finished();
    for (double r : {0.2, 0.7, 1.2}) {
        // d/dr W(r dir) = r V(r dir) + 8 u(r) r dir^T A dir.
        const double h = 1e-5;
        const double fd = (sp.w_frak(p, (r + h) * dir) - sp.w_frak(p, (r - h) * dir)) / (2 * h);
        const double quad = s.b()[0] * dir[0] * dir[0] + s.b()[1] * dir[1] * dir[1];
        const double an = r * sp.v_frak(p, r * dir) + 8 * sp.u_fun(r) * r * quad;
        EXPECT_NEAR(an, fd, 1e-6 * std::abs(fd)) << r;
    }
}

TEST(AProfile, ValuesAndMonotonicity)
{
    const Spectral h(h21());
    const double one[] = {1.0};
    EXPECT_NEAR(h.a_profile(one, pi / 2), 0.25, 1e-15);
    const double zero[] = {0.0};
    EXPECT_EQ(h.a_profile(zero, 1.0), 0.0);

    const Spectral sp(GroupSpec::create({{0.25, 1}, {0.5, 2}, {1.0, 1}}, 1, {0.0}));
    const double nsq[] = {0.4, 1.1, 0.2};
    double prev = 0;
    for (int i = 0; i < 1000; ++i) {
        const double v = sp.a_profile(nsq, i * (pi - 1e-6) / 1000);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Identities, CotangentDerivativeIdentity)
{
    // r cot r - r d/dr(r cot r) = (r / sin r)^2
    for (double r = 0.01; r < 3.1; r += 0.01) {
        const double lhs = special::zcot(r) + r * special::mu(r);
        EXPECT_NEAR(lhs, special::z_over_sin_sq(r), 1e-12 * special::z_over_sin_sq(r)) << r;
    }
}

TEST(Identities, ClassicalInequalities)
{
    for (double r = 0.001; r < pi; r += 0.001) {
        const double sc = std::sin(r) / r;
        EXPECT_LE(special::mu(r) / r * sc * sc, 2.0 / 3 + 1e-15) << r;
        EXPECT_GE(r / std::sin(r), 1 + r * r / 6) << r;
    }
}

TEST(Special, DerivativesMatchFiniteDifferences)
{
    for (double z : {0.05, 0.4, 0.6, 1.5, 2.9}) {
        const double h = 1e-5;
        auto fd = [&](double (*f)(double)) { return (f(z + h) - f(z - h)) / (2 * h); };
        EXPECT_NEAR(special::mu_prime(z), fd(special::mu), 1e-7 * std::max(1.0, std::abs(special::mu_prime(z))));
        EXPECT_NEAR(special::mu_tilde_prime(z), fd(special::mu_tilde), 1e-8 * std::max(1.0, special::mu_tilde_prime(z)));
        EXPECT_NEAR(special::cot_defect_prime(z), fd(special::cot_defect), 1e-8);
        EXPECT_NEAR(special::z_over_sin_sq_prime(z), fd(special::z_over_sin_sq),
                    1e-7 * std::max(1.0, std::abs(special::z_over_sin_sq_prime(z))));
    }
}

TEST(Special, ReducedSineNearPi)
{
    const double z = pi - 1e-9;
    const double ref = static_cast<double>(std::sin(static_cast<long double>(z)));
    EXPECT_NEAR(special::sin_reduced(z), ref, 1e-12 * ref);
}
